"""
Clusters of the union of balls.

Two points are linked when their distance is at most ``2 * ball_radius``
(closed comparison). Candidate pairs come from a spatial hash with cell size
``2 * ball_radius``, so only points in the same or adjacent cells are
compared; the result is exact.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ..cox import CoxConfiguration
from ..utils import get_logger

logger = get_logger(__name__)

# Half of the 3x3 neighbourhood: every unordered cell pair is visited once
_HALF_NEIGHBOURS = ((0, 0), (1, -1), (1, 0), (1, 1), (0, 1))


class SpatialHash:
    """Points bucketed into square cells, with vectorized neighbour lookups."""

    def __init__(self, points: np.ndarray, cell: float):
        if not cell > 0:
            raise ValueError(f"Cell size must be positive, got {cell}")
        self.points = np.asarray(points, dtype=float).reshape(-1, 2)
        self.cell = float(cell)
        n = self.points.shape[0]
        cells = np.floor(self.points / self.cell).astype(np.int64) if n else np.zeros((0, 2), dtype=np.int64)
        self.base = cells.min(axis=0) - 1 if n else np.zeros(2, dtype=np.int64)
        self.stride = int(cells[:, 1].max() - self.base[1] + 2) if n else 1
        keys = self._key(cells)
        self.order = np.argsort(keys, kind="stable")
        self.sorted_keys = keys[self.order]

    def _key(self, cells: np.ndarray) -> np.ndarray:
        return (cells[:, 0] - self.base[0]) * self.stride + (cells[:, 1] - self.base[1])

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def pairs_within(self, distance: float) -> Tuple[np.ndarray, np.ndarray]:
        """
        All pairs ``i < j`` at distance at most ``distance`` (which must not
        exceed the cell size), sorted lexicographically.
        """
        if distance > self.cell:
            raise ValueError("Pair distance exceeds the hash cell size")
        n = len(self)
        if n < 2:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        keys = self.sorted_keys
        pos = np.arange(n)
        firsts: List[np.ndarray] = []
        seconds: List[np.ndarray] = []
        for dx, dy in _HALF_NEIGHBOURS:
            target = keys + dx * self.stride + dy
            lo = np.searchsorted(keys, target, side="left")
            hi = np.searchsorted(keys, target, side="right")
            if dx == 0 and dy == 0:
                lo = np.maximum(lo, pos + 1)
            counts = np.maximum(hi - lo, 0)
            total = int(counts.sum())
            if total == 0:
                continue
            a = np.repeat(pos, counts)
            starts = np.repeat(lo - np.concatenate([[0], np.cumsum(counts)[:-1]]), counts)
            b = starts + np.arange(total)
            firsts.append(self.order[a])
            seconds.append(self.order[b])
        if not firsts:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        i = np.concatenate(firsts)
        j = np.concatenate(seconds)
        d = np.hypot(self.points[i, 0] - self.points[j, 0], self.points[i, 1] - self.points[j, 1])
        keep = d <= distance
        i, j = np.minimum(i[keep], j[keep]), np.maximum(i[keep], j[keep])
        order = np.lexsort((j, i))
        return i[order].astype(np.int64), j[order].astype(np.int64)

    def query(self, point: Sequence[float], distance: float) -> np.ndarray:
        """Indices of the points within ``distance`` of ``point``, ascending."""
        if len(self) == 0:
            return np.empty(0, dtype=np.int64)
        reach = int(np.ceil(distance / self.cell))
        c = np.floor(np.asarray(point, dtype=float) / self.cell).astype(np.int64)
        found: List[np.ndarray] = []
        for dx in range(-reach, reach + 1):
            for dy in range(-reach, reach + 1):
                key = self._key(np.array([[c[0] + dx, c[1] + dy]]))[0]
                lo = np.searchsorted(self.sorted_keys, key, side="left")
                hi = np.searchsorted(self.sorted_keys, key, side="right")
                found.append(self.order[lo:hi])
        idx = np.unique(np.concatenate(found))
        d = np.hypot(self.points[idx, 0] - point[0], self.points[idx, 1] - point[1])
        return idx[d <= distance]


class UnionFind:
    """Disjoint sets over ``0..n-1`` with union by rank and path halving."""

    def __init__(self, n: int = 0):
        self.parent: List[int] = list(range(n))
        self.rank: List[int] = [0] * n

    def add(self) -> int:
        self.parent.append(len(self.parent))
        self.rank.append(0)
        return len(self.parent) - 1

    def find(self, i: int) -> int:
        parent = self.parent
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(self, a: int, b: int) -> Tuple[int, int]:
        """
        Merge the sets of ``a`` and ``b``.

        Returns:
            Tuple of (surviving root, absorbed root); equal if already merged
        """
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra, rb
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return ra, rb


@dataclass(frozen=True)
class ClusterLabels:
    """
    Cluster id per point.

    Cluster ids are numbered in order of their smallest point index, so labels
    do not depend on how the components were found.

    Attributes:
        labels: ``(N,)`` cluster id of every point
        n_clusters: Number of clusters
        pairs: ``(i, j)`` arrays of linked point pairs
    """

    labels: np.ndarray
    n_clusters: int
    pairs: Tuple[np.ndarray, np.ndarray]

    @property
    def parent(self) -> np.ndarray:
        """Representative (smallest point index) of each point's cluster."""
        first = np.full(self.n_clusters, -1, dtype=np.int64)
        order = np.arange(self.labels.shape[0])[::-1]
        first[self.labels[order]] = order
        return first[self.labels]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_clusters)

    def same_cluster(self, i: int, j: int) -> bool:
        return bool(self.labels[i] == self.labels[j])


def canonical_labels(raw: np.ndarray) -> Tuple[np.ndarray, int]:
    """Renumber component ids by their first occurrence."""
    if raw.shape[0] == 0:
        return np.empty(0, dtype=np.int64), 0
    uniq, first = np.unique(raw, return_index=True)
    mapping = np.empty(int(uniq.max()) + 1, dtype=np.int64)
    mapping[raw[np.sort(first)]] = np.arange(uniq.shape[0])
    return mapping[raw], int(uniq.shape[0])


def close_pairs(points: np.ndarray, ball_radius: float) -> Tuple[np.ndarray, np.ndarray]:
    """Pairs of points whose balls of radius ``ball_radius`` intersect."""
    return SpatialHash(points, 2.0 * ball_radius).pairs_within(2.0 * ball_radius)


def build_clusters(config: Union[CoxConfiguration, np.ndarray], ball_radius: float) -> ClusterLabels:
    """
    Connected components of the union of balls.

    Args:
        config: Configuration or ``(N, 2)`` point array
        ball_radius: Ball radius (> 0)

    Returns:
        ClusterLabels
    """
    if not ball_radius > 0:
        raise ValueError(f"ball_radius must be positive, got {ball_radius}")
    points = config.points if isinstance(config, CoxConfiguration) else np.asarray(config, dtype=float)
    points = points.reshape(-1, 2)
    n = points.shape[0]
    i, j = close_pairs(points, ball_radius)
    if n == 0:
        return ClusterLabels(np.empty(0, dtype=np.int64), 0, (i, j))
    graph = coo_matrix((np.ones(i.shape[0], dtype=np.int8), (i, j)), shape=(n, n)).tocsr()
    _, raw = connected_components(graph, directed=False)
    labels, count = canonical_labels(raw)
    logger.debug(f"{n} points, {i.shape[0]} links, {count} clusters")
    return ClusterLabels(labels, count, (i, j))
