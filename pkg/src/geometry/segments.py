"""
Segment clipping, lengths and point-to-segment distances.
"""

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..utils.errors import EmptySetError
from .sampling import Box, Point2


@dataclass(frozen=True)
class Segment:
    """Straight segment with cached Euclidean length."""

    a: Point2
    b: Point2
    length: float

    @classmethod
    def between(cls, a: Sequence[float], b: Sequence[float]) -> "Segment":
        a = (float(a[0]), float(a[1]))
        b = (float(b[0]), float(b[1]))
        return cls(a, b, math.hypot(b[0] - a[0], b[1] - a[1]))

    def normalized(self) -> "Segment":
        """Same segment with the lexicographically smaller endpoint first."""
        if self.b < self.a:
            return Segment(self.b, self.a, self.length)
        return self

    def point_at(self, frac: float) -> Point2:
        return (
            self.a[0] + frac * (self.b[0] - self.a[0]),
            self.a[1] + frac * (self.b[1] - self.a[1]),
        )

    def as_row(self) -> Tuple[float, float, float, float]:
        return (self.a[0], self.a[1], self.b[0], self.b[1])


SegmentsLike = Union[np.ndarray, Iterable[Segment]]


def as_segment_array(segments: SegmentsLike) -> np.ndarray:
    """Convert segments to an ``(k, 4)`` array of ``(ax, ay, bx, by)`` rows."""
    if isinstance(segments, np.ndarray):
        return segments.reshape(-1, 4).astype(float, copy=False)
    rows = [s.as_row() for s in segments]
    return np.asarray(rows, dtype=float).reshape(-1, 4)


def liang_barsky(a: Sequence[float], b: Sequence[float], box: Box) -> Optional[Tuple[float, float]]:
    """
    Parameter interval ``[t0, t1]`` of ``a + t (b - a)`` inside a closed box.

    Returns:
        The interval, or None if the segment misses the box
    """
    dx = float(b[0]) - float(a[0])
    dy = float(b[1]) - float(a[1])
    t0, t1 = 0.0, 1.0
    for p, q in (
        (-dx, float(a[0]) - box.x0),
        (dx, box.x1 - float(a[0])),
        (-dy, float(a[1]) - box.y0),
        (dy, box.y1 - float(a[1])),
    ):
        if p == 0.0:
            if q < 0.0:
                return None
            continue
        r = q / p
        if p < 0.0:
            if r > t1:
                return None
            t0 = max(t0, r)
        else:
            if r < t0:
                return None
            t1 = min(t1, r)
    return t0, t1


def clip_segments_to_cube(edges: SegmentsLike, cube: Box) -> Tuple[List[Segment], float]:
    """
    Clip edges to a closed cube.

    Pieces of zero length are dropped; surviving pieces have their
    lexicographically smaller endpoint first and are sorted by
    ``(ax, ay, bx, by)``.

    Args:
        edges: Segments or an ``(k, 4)`` array
        cube: Clipping box

    Returns:
        Tuple of (clipped segments, total clipped length)
    """
    rows = as_segment_array(edges)
    pieces: List[Segment] = []
    for ax, ay, bx, by in rows:
        interval = liang_barsky((ax, ay), (bx, by), cube)
        if interval is None:
            continue
        t0, t1 = interval
        if not t1 > t0:
            continue
        pa = (ax, ay) if t0 == 0.0 else (ax + t0 * (bx - ax), ay + t0 * (by - ay))
        pb = (bx, by) if t1 == 1.0 else (ax + t1 * (bx - ax), ay + t1 * (by - ay))
        seg = Segment.between(pa, pb)
        if seg.length > 0.0:
            pieces.append(seg.normalized())
    pieces.sort(key=lambda s: s.as_row())
    total = 0.0
    for seg in pieces:
        total += seg.length
    return pieces, total


def _ragged_arange(counts: np.ndarray) -> np.ndarray:
    """Concatenation of ``arange(c)`` for every ``c`` in ``counts``."""
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    starts = np.cumsum(counts) - counts
    return np.arange(total, dtype=np.int64) - np.repeat(starts, counts)


def normalize_segment_rows(rows: np.ndarray) -> np.ndarray:
    """Orient every row so that ``(ax, ay) <= (bx, by)`` lexicographically."""
    rows = np.asarray(rows, dtype=float).reshape(-1, 4)
    swap = (rows[:, 0] > rows[:, 2]) | ((rows[:, 0] == rows[:, 2]) & (rows[:, 1] > rows[:, 3]))
    out = rows.copy()
    out[swap] = rows[swap][:, [2, 3, 0, 1]]
    return out


@dataclass(frozen=True)
class GridPieces:
    """
    Edge pieces clipped into the site cubes of a rectangular site range.

    Rows are sorted by site then by ``(ax, ay, bx, by)``.

    Attributes:
        sites: ``(k, 2)`` integer site indices
        segments: ``(k, 4)`` clipped segments
        lengths: ``(k,)`` piece lengths
    """

    sites: np.ndarray
    segments: np.ndarray
    lengths: np.ndarray


def clip_edges_to_grid(
    edges: np.ndarray,
    M: float,
    inv_b: int,
    site_lo: Tuple[int, int],
    site_hi: Tuple[int, int],
) -> GridPieces:
    """
    Clip an edge set into every site cube ``M b k + [0, M b)^2`` of a site range.

    Each edge is cut at the cube lines it crosses and every piece is assigned
    to the cube containing its midpoint, so a piece lying on a cube boundary is
    counted once (half-open cubes). The pieces of one edge depend only on that
    edge.

    Args:
        edges: ``(E, 4)`` segment rows
        M: Coarse scale
        inv_b: Reciprocal fine scale
        site_lo: Lower site index (inclusive)
        site_hi: Upper site index (exclusive)

    Returns:
        GridPieces sorted by site and endpoints
    """
    rows = normalize_segment_rows(edges)
    x0, y0 = site_lo[0] * M / inv_b, site_lo[1] * M / inv_b
    x1, y1 = site_hi[0] * M / inv_b, site_hi[1] * M / inv_b

    keep = (
        (np.maximum(rows[:, 0], rows[:, 2]) >= x0) & (np.minimum(rows[:, 0], rows[:, 2]) <= x1)
        & (np.maximum(rows[:, 1], rows[:, 3]) >= y0) & (np.minimum(rows[:, 1], rows[:, 3]) <= y1)
    )
    rows = rows[keep]
    n_edges = rows.shape[0]
    if n_edges == 0:
        return GridPieces(np.empty((0, 2), dtype=np.int64), np.empty((0, 4)), np.empty(0))

    a = rows[:, 0:2]
    b = rows[:, 2:4]
    d = b - a

    edge_ids = [np.arange(n_edges), np.arange(n_edges)]
    params = [np.zeros(n_edges), np.ones(n_edges)]
    for axis in (0, 1):
        lo_c = np.floor(np.minimum(a[:, axis], b[:, axis]) * inv_b / M).astype(np.int64)
        hi_c = np.floor(np.maximum(a[:, axis], b[:, axis]) * inv_b / M).astype(np.int64)
        counts = np.where(d[:, axis] != 0.0, hi_c - lo_c, 0)
        rep = np.repeat(np.arange(n_edges), counts)
        lines = lo_c[rep] + 1 + _ragged_arange(counts)
        t = (lines * M / inv_b - a[rep, axis]) / d[rep, axis]
        inside = (t > 0.0) & (t < 1.0)
        edge_ids.append(rep[inside])
        params.append(t[inside])

    all_e = np.concatenate(edge_ids)
    all_t = np.concatenate(params)
    order = np.lexsort((all_t, all_e))
    all_e = all_e[order]
    all_t = all_t[order]

    same = all_e[1:] == all_e[:-1]
    e = all_e[:-1][same]
    t0 = all_t[:-1][same]
    t1 = all_t[1:][same]
    proper = t1 > t0
    e, t0, t1 = e[proper], t0[proper], t1[proper]

    p0 = a[e] + t0[:, None] * d[e]
    p1 = a[e] + t1[:, None] * d[e]
    p0[t0 == 0.0] = a[e][t0 == 0.0]
    p1[t1 == 1.0] = b[e][t1 == 1.0]

    mid = 0.5 * (p0 + p1)
    cube = np.floor(mid * inv_b / M).astype(np.int64)
    lengths = np.hypot(p1[:, 0] - p0[:, 0], p1[:, 1] - p0[:, 1])
    ok = (
        (cube[:, 0] >= site_lo[0]) & (cube[:, 0] < site_hi[0])
        & (cube[:, 1] >= site_lo[1]) & (cube[:, 1] < site_hi[1])
        & (lengths > 0.0)
    )
    cube, p0, p1, lengths = cube[ok], p0[ok], p1[ok], lengths[ok]

    segs = np.column_stack([p0, p1])
    order = np.lexsort((segs[:, 3], segs[:, 2], segs[:, 1], segs[:, 0], cube[:, 1], cube[:, 0]))
    return GridPieces(cube[order], segs[order], lengths[order])


def segmented_cumsum(values: np.ndarray, starts: np.ndarray, sizes: np.ndarray) -> np.ndarray:
    """
    Cumulative sums restarted at every group, summed left to right per group.

    Args:
        values: Values, groups stored contiguously
        starts: First index of every group
        sizes: Size of every group

    Returns:
        Array of per-group running sums
    """
    out = np.array(values, dtype=float, copy=True)
    if sizes.size == 0:
        return out
    for k in range(1, int(sizes.max())):
        idx = starts[sizes > k] + k
        out[idx] = out[idx - 1] + values[idx]
    return out


def distances_to_segments(points: np.ndarray, segments: SegmentsLike, chunk: int = 4096) -> np.ndarray:
    """
    Euclidean distance from every point to the nearest segment.

    Args:
        points: ``(P, 2)`` query points
        segments: Segments or ``(K, 4)`` rows (K >= 1)
        chunk: Points processed per vectorized block

    Returns:
        ``(P,)`` distances
    """
    segs = as_segment_array(segments)
    if segs.shape[0] == 0:
        raise EmptySetError("Distance to an empty segment set is undefined")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    a = segs[:, 0:2]
    d = segs[:, 2:4] - a
    dd = np.einsum("ij,ij->i", d, d)
    safe_dd = np.where(dd > 0.0, dd, 1.0)

    out = np.empty(pts.shape[0])
    for start in range(0, pts.shape[0], chunk):
        p = pts[start:start + chunk]
        rel = p[:, None, :] - a[None, :, :]
        t = np.einsum("pkj,kj->pk", rel, d) / safe_dd
        t = np.clip(np.where(dd > 0.0, t, 0.0), 0.0, 1.0)
        diff = rel - t[:, :, None] * d[None, :, :]
        out[start:start + chunk] = np.sqrt(np.min(np.einsum("pkj,pkj->pk", diff, diff), axis=1))
    return out


def min_distance_to_segments(point: Sequence[float], segments: SegmentsLike) -> float:
    """
    Exact Euclidean distance from a point to a nonempty segment set.

    Raises:
        EmptySetError: If the segment set is empty
    """
    return float(distances_to_segments(np.asarray(point, dtype=float).reshape(1, 2), segments)[0])
