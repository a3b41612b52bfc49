"""
Delaunay triangulation with deterministic tie breaking.

The bulk triangulation comes from Qhull (``scipy.spatial.Delaunay``). Qhull's
choice among cocircular configurations is arbitrary, and its predicates are
floating point, so the result is repaired with Lawson edge flips driven by the
exact perturbed in-circle predicate. The perturbation ranks points in
lexicographic order, which makes the output unique: for a set of cocircular
points it is the fan from the lexicographically smallest one.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from scipy.spatial import Delaunay, QhullError

from ..utils.errors import BadHeaderError, DegenerateInputError
from ..utils.logger import get_logger
from .predicates import incircle_batch, inside_circumcircle, orient2d_batch
from .sampling import Box

logger = get_logger(__name__)

TRIANGULATION_HEADER = "# coxperc-triangulation v1"


@dataclass(frozen=True)
class Triangulation:
    """
    Planar triangulation.

    Attributes:
        vertices: ``(N, 2)`` distinct vertices in lexicographic order
        triangles: ``(T, 3)`` counterclockwise vertex indices, smallest index
            first, rows sorted
        edges: ``(E, 2)`` vertex index pairs ``i < j``, rows sorted
    """

    vertices: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    def segments(self) -> np.ndarray:
        """Edges as ``(E, 4)`` coordinate rows."""
        return np.hstack([self.vertices[self.edges[:, 0]], self.vertices[self.edges[:, 1]]])

    def circumcircles(self) -> Tuple[np.ndarray, np.ndarray]:
        """Circumcenters ``(T, 2)`` and circumradii ``(T,)`` of all triangles."""
        return circumcircles(
            self.vertices[self.triangles[:, 0]],
            self.vertices[self.triangles[:, 1]],
            self.vertices[self.triangles[:, 2]],
        )


def circumcircles(pa: np.ndarray, pb: np.ndarray, pc: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized circumcenters and radii of triangles given by corner arrays."""
    bx, by = pb[:, 0] - pa[:, 0], pb[:, 1] - pa[:, 1]
    cx, cy = pc[:, 0] - pa[:, 0], pc[:, 1] - pa[:, 1]
    denom = 2.0 * (bx * cy - by * cx)
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / denom
    uy = (bx * c2 - cx * b2) / denom
    centers = np.column_stack([pa[:, 0] + ux, pa[:, 1] + uy])
    return centers, np.hypot(ux, uy)


def _dedupe_sorted(points: np.ndarray) -> np.ndarray:
    order = np.lexsort((points[:, 1], points[:, 0]))
    pts = points[order]
    if pts.shape[0] == 0:
        return pts
    keep = np.ones(pts.shape[0], dtype=bool)
    keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
    return pts[keep]


def _all_collinear(pts: np.ndarray) -> bool:
    a = np.repeat(pts[:1], pts.shape[0] - 2, axis=0)
    b = np.repeat(pts[1:2], pts.shape[0] - 2, axis=0)
    return not np.any(orient2d_batch(a, b, pts[2:]))


def _frame_points(pts: np.ndarray) -> np.ndarray:
    """Four far points whose hull strictly contains the input with no collinearity."""
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    cx, cy = 0.5 * (lo + hi)
    hx, hy = np.maximum(0.5 * (hi - lo), 1.0)
    return np.array([
        [cx, cy - 3.0 * hy],
        [cx + 3.0 * hx, cy],
        [cx, cy + 3.0 * hy],
        [cx - 3.0 * hx, cy],
    ])


def _qhull(points: np.ndarray, options: Optional[str]) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Run Qhull and return ccw simplices with neighbors, or None if unusable."""
    try:
        tri = Delaunay(points, qhull_options=options)
    except QhullError as exc:
        logger.debug(f"Qhull failed with options {options!r}: {exc}")
        return None

    simplices = np.array(tri.simplices, dtype=np.int64)
    neighbors = np.array(tri.neighbors, dtype=np.int64)
    if np.unique(simplices).size != points.shape[0]:
        logger.debug("Qhull dropped input points")
        return None

    signs = orient2d_batch(points[simplices[:, 0]], points[simplices[:, 1]], points[simplices[:, 2]])
    if np.any(signs == 0):
        logger.debug("Qhull returned zero-area triangles")
        return None
    cw = signs < 0
    simplices[cw] = simplices[cw][:, [0, 2, 1]]
    neighbors[cw] = neighbors[cw][:, [0, 2, 1]]
    return simplices, neighbors


def _opposite_vertices(tri: np.ndarray, nbr: np.ndarray) -> np.ndarray:
    """Vertex of the neighbor across each edge (-1 on the hull)."""
    q = np.roll(tri, -1, axis=1)
    r = np.roll(tri, -2, axis=1)
    u = np.where(nbr >= 0, nbr, 0)
    s = tri[u].sum(axis=2) - q - r
    return np.where(nbr >= 0, s, -1)


def _lawson_repair(points: np.ndarray, tri: np.ndarray, nbr: np.ndarray) -> int:
    """
    Flip edges in place until every edge is locally Delaunay under the
    perturbed predicate.

    Returns:
        Number of flips performed
    """
    opp = _opposite_vertices(tri, nbr)
    t_idx, i_idx = np.nonzero(opp >= 0)
    p = tri[t_idx, i_idx]
    q = tri[t_idx, (i_idx + 1) % 3]
    r = tri[t_idx, (i_idx + 2) % 3]
    s = opp[t_idx, i_idx]
    screen = incircle_batch(points[p], points[q], points[r], points[s], exact=False)
    # Rows with a certain "outside" verdict need no work
    cand = screen >= 0
    stack = list(zip(t_idx[cand].tolist(), i_idx[cand].tolist()))

    flips = 0
    while stack:
        t, i = stack.pop()
        u = nbr[t, i]
        if u < 0:
            continue
        p, q, r = tri[t, i], tri[t, (i + 1) % 3], tri[t, (i + 2) % 3]
        row = tri[u]
        k = int(np.flatnonzero((row != q) & (row != r))[0])
        s = row[k]
        if row[(k + 1) % 3] != r or row[(k + 2) % 3] != q:
            raise DegenerateInputError("Inconsistent triangle adjacency during edge flips")
        if not inside_circumcircle(points[p], points[q], points[r], points[s], (p, q, r, s)):
            continue

        a_rp = nbr[t, (i + 1) % 3]
        a_pq = nbr[t, (i + 2) % 3]
        a_qs = nbr[u, (k + 1) % 3]
        a_sr = nbr[u, (k + 2) % 3]

        tri[t] = (p, q, s)
        nbr[t] = (a_qs, u, a_pq)
        tri[u] = (s, r, p)
        nbr[u] = (a_rp, t, a_sr)
        if a_qs >= 0:
            nbr[a_qs][nbr[a_qs] == u] = t
        if a_rp >= 0:
            nbr[a_rp][nbr[a_rp] == t] = u

        stack.extend(((t, 0), (t, 2), (u, 0), (u, 2)))
        flips += 1
    return flips


def _canonical(tri: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    shift = np.argmin(tri, axis=1)
    rows = np.arange(tri.shape[0])[:, None]
    cols = (shift[:, None] + np.arange(3)[None, :]) % 3
    tri = tri[rows, cols]
    tri = tri[np.lexsort((tri[:, 2], tri[:, 1], tri[:, 0]))]

    edges = np.vstack([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
    edges.sort(axis=1)
    edges = np.unique(edges, axis=0)
    return tri, edges


def delaunay_triangulate(points, frame: bool = False) -> Triangulation:
    """
    Delaunay triangulation with lexicographic symbolic tie breaking.

    Args:
        points: ``(n, 2)`` array-like; exact duplicates are merged
        frame: Triangulate together with four far auxiliary points and drop
            every triangle touching them. This keeps collinear points on the
            hull away from Qhull; the triangles near the hull of the input are
            then not returned.

    Returns:
        Triangulation over the distinct input points, in lexicographic order

    Raises:
        DegenerateInputError: Fewer than 3 distinct points, all collinear, or
            no valid triangulation could be built
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(pts)):
        raise DegenerateInputError("Point coordinates must be finite")
    pts = _dedupe_sorted(pts)
    if pts.shape[0] < 3:
        raise DegenerateInputError(f"Need at least 3 distinct points, got {pts.shape[0]}")
    if _all_collinear(pts):
        raise DegenerateInputError("All points are collinear")

    n = pts.shape[0]
    work = np.vstack([pts, _frame_points(pts)]) if frame else pts

    result = _qhull(work, None)
    if result is None:
        result = _qhull(work, "QJ")
    if result is None:
        raise DegenerateInputError(f"Could not triangulate {n} points")
    tri, nbr = result

    flips = _lawson_repair(work, tri, nbr)
    if flips:
        logger.debug(f"Delaunay repair performed {flips} flips on {n} points")

    if frame:
        tri = tri[np.all(tri < n, axis=1)]
    triangles, edges = _canonical(tri)
    return Triangulation(vertices=pts, triangles=triangles, edges=edges)


def max_circumradius_ratio(triangulation: Triangulation, window: Box, L: float) -> Tuple[float, int]:
    """
    Largest circumradius relative to ``L sqrt(2) / 2`` among triangles whose
    circumcenter lies in the window.

    Returns:
        Tuple of (max ratio, number of triangles checked); ratio is 0 if none
    """
    if triangulation.triangles.shape[0] == 0:
        return 0.0, 0
    centers, radii = triangulation.circumcircles()
    inside = window.contains(centers)
    if not np.any(inside):
        return 0.0, 0
    bound = L * math.sqrt(2.0) / 2.0
    return float(np.max(radii[inside]) / bound), int(np.count_nonzero(inside))


def write_triangulation(triangulation: Triangulation, path: Union[str, Path]) -> None:
    """
    Write a triangulation as line-based text.

    Layout::

        # coxperc-triangulation v1
        vertices N
        x y            (N lines, 17 significant digits)
        triangles T
        i j k          (T lines)
    """
    lines = [TRIANGULATION_HEADER, f"vertices {triangulation.n_vertices}"]
    lines += [f"{x:.17g} {y:.17g}" for x, y in triangulation.vertices]
    lines.append(f"triangles {triangulation.triangles.shape[0]}")
    lines += [f"{i} {j} {k}" for i, j, k in triangulation.triangles]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_triangulation(path: Union[str, Path]) -> Triangulation:
    """Read a triangulation written by ``write_triangulation``."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != TRIANGULATION_HEADER:
        raise BadHeaderError(f"{path} is not a coxperc triangulation file")
    n = int(lines[1].split()[1])
    vertices = np.array([[float(v) for v in line.split()] for line in lines[2:2 + n]]).reshape(-1, 2)
    t = int(lines[2 + n].split()[1])
    triangles = np.array(
        [[int(v) for v in line.split()] for line in lines[3 + n:3 + n + t]], dtype=np.int64
    ).reshape(-1, 3)
    _, edges = _canonical(triangles) if t else (triangles, np.empty((0, 2), dtype=np.int64))
    return Triangulation(vertices=vertices, triangles=triangles, edges=edges)
