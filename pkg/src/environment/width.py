"""
Thickened street systems.

The WIDTH variant replaces the segment measure by Lebesgue measure on the set
of points within ``w0`` of the street edges. Membership is exact; the area of
the set inside a cube is computed by midpoint quadrature on a ``q x q``
subgrid, with shortcuts for cubes that are missed entirely or covered by a
single capsule.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..geometry import Box, distances_to_segments, liang_barsky, normalize_segment_rows


@dataclass(frozen=True)
class WidthMass:
    """Quadrature area of one cube with its error bound."""

    area: float
    error_bound: float


def segment_box_distance(segment: np.ndarray, box: Box) -> float:
    """Euclidean distance between one segment ``(ax, ay, bx, by)`` and a closed box."""
    ax, ay, bx, by = (float(c) for c in segment)
    if liang_barsky((ax, ay), (bx, by), box) is not None:
        return 0.0
    corners = np.array([[box.x0, box.y0], [box.x1, box.y0], [box.x0, box.y1], [box.x1, box.y1]])
    d_corners = float(np.min(distances_to_segments(corners, segment.reshape(1, 4))))
    ends = np.array([[ax, ay], [bx, by]])
    dx = np.maximum(np.maximum(box.x0 - ends[:, 0], ends[:, 0] - box.x1), 0.0)
    dy = np.maximum(np.maximum(box.y0 - ends[:, 1], ends[:, 1] - box.y1), 0.0)
    return min(d_corners, float(np.min(np.hypot(dx, dy))))


def _bbox_candidates(edges: np.ndarray, box: Box, reach: float) -> np.ndarray:
    return (
        (np.maximum(edges[:, 0], edges[:, 2]) >= box.x0 - reach)
        & (np.minimum(edges[:, 0], edges[:, 2]) <= box.x1 + reach)
        & (np.maximum(edges[:, 1], edges[:, 3]) >= box.y0 - reach)
        & (np.minimum(edges[:, 1], edges[:, 3]) <= box.y1 + reach)
    )


def edges_near_box(edges: np.ndarray, box: Box, w0: float) -> np.ndarray:
    """
    Edges at distance at most ``w0`` from a box, normalized and sorted.

    The result depends only on the edges near the box, so it is identical for
    any triangulation that agrees there.
    """
    edges = np.asarray(edges, dtype=float).reshape(-1, 4)
    cand = edges[_bbox_candidates(edges, box, w0)]
    keep = [i for i, row in enumerate(cand) if segment_box_distance(row, box) <= w0]
    near = normalize_segment_rows(cand[keep])
    order = np.lexsort((near[:, 3], near[:, 2], near[:, 1], near[:, 0]))
    return near[order]


def within_width(points: np.ndarray, edges: np.ndarray, w0: float) -> np.ndarray:
    """Boolean mask of points within ``w0`` of the edge set."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if edges.shape[0] == 0 or pts.shape[0] == 0:
        return np.zeros(pts.shape[0], dtype=bool)
    return distances_to_segments(pts, edges) <= w0


def width_cube_mass(cube: Box, edges: np.ndarray, w0: float, q: int = 256) -> WidthMass:
    """
    Area of ``{p in cube : dist(p, edges) <= w0}``.

    Args:
        cube: Site cube
        edges: Candidate street edges (any superset of those near the cube)
        w0: Street half-width
        q: Subgrid resolution per axis

    Returns:
        WidthMass with the quadrature area and a bound on its error (the area
        of subcells that the boundary of the set may cross)
    """
    near = edges[_bbox_candidates(edges, cube, w0)] if edges.shape[0] else edges
    if near.shape[0] == 0:
        return WidthMass(0.0, 0.0)

    corners = np.array([[cube.x0, cube.y0], [cube.x1, cube.y0], [cube.x0, cube.y1], [cube.x1, cube.y1]])
    for row in near:
        # A capsule is convex: it holds the cube iff it holds all corners
        if np.all(distances_to_segments(corners, row.reshape(1, 4)) <= w0):
            return WidthMass(cube.area, 0.0)

    h = cube.width / q
    centers = cube.x0 + h * (np.arange(q) + 0.5)
    ys = cube.y0 + h * (np.arange(q) + 0.5)
    gx, gy = np.meshgrid(centers, ys, indexing="ij")
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    dist = distances_to_segments(pts, near)
    inside = int(np.count_nonzero(dist <= w0))
    band = int(np.count_nonzero(np.abs(dist - w0) <= h * np.sqrt(0.5)))
    cell = h * h
    return WidthMass(min(inside * cell, cube.area), band * cell)


def width_block_masses(
    cubes: np.ndarray, edges: np.ndarray, w0: float, q: int
) -> Tuple[np.ndarray, float]:
    """
    Masses of all cubes of a block.

    Args:
        cubes: ``(S, 4)`` cube boxes ``(x0, y0, x1, y1)`` in local site order
        edges: The block's width edges
        w0: Street half-width
        q: Subgrid resolution

    Returns:
        Tuple of (masses, largest quadrature error bound)
    """
    masses = np.zeros(cubes.shape[0])
    worst = 0.0
    for s, row in enumerate(cubes):
        result = width_cube_mass(Box.from_tuple(row), edges, w0, q)
        masses[s] = result.area
        worst = max(worst, result.error_bound)
    return masses, worst
