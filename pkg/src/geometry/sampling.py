"""
Planar point sampling and grid superposition.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

Point2 = Tuple[float, float]


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``[x0, x1] x [y0, y1]``."""

    x0: float
    y0: float
    x1: float
    y1: float

    @classmethod
    def from_tuple(cls, t: Sequence[float]) -> "Box":
        return cls(float(t[0]), float(t[1]), float(t[2]), float(t[3]))

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def area(self) -> float:
        return max(self.width, 0.0) * max(self.height, 0.0)

    @property
    def center(self) -> Point2:
        return (0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))

    def is_empty(self) -> bool:
        return not (self.x1 > self.x0 and self.y1 > self.y0)

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return (
            (pts[:, 0] >= self.x0) & (pts[:, 0] <= self.x1)
            & (pts[:, 1] >= self.y0) & (pts[:, 1] <= self.y1)
        )

    def expand(self, r: float) -> "Box":
        return Box(self.x0 - r, self.y0 - r, self.x1 + r, self.y1 + r)

    def shift(self, dx: float, dy: float) -> "Box":
        return Box(self.x0 + dx, self.y0 + dy, self.x1 + dx, self.y1 + dy)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.x0, self.y0, self.x1, self.y1)


def sample_poisson_block(rng: np.random.Generator, intensity: float, cube: Box) -> np.ndarray:
    """
    Homogeneous Poisson points in a box.

    Draw order is fixed: the count, then all x coordinates, then all y
    coordinates.

    Args:
        rng: Generator of the block's stream
        intensity: Points per unit area (>= 0)
        cube: Sampling box

    Returns:
        ``(n, 2)`` array of points
    """
    if intensity < 0:
        raise ValueError(f"Intensity must be nonnegative, got {intensity}")
    if cube.is_empty():
        raise ValueError(f"Sampling box {cube} is empty")
    if intensity == 0:
        return np.empty((0, 2))

    n = int(rng.poisson(intensity * cube.area))
    xs = cube.x0 + cube.width * rng.random(n)
    ys = cube.y0 + cube.height * rng.random(n)
    return np.column_stack([xs, ys])


def grid_points(L: float, window: Box) -> np.ndarray:
    """Points of ``L Z^2`` inside the closed window, lexicographically sorted."""
    kx = np.arange(math.ceil(window.x0 / L), math.floor(window.x1 / L) + 1)
    ky = np.arange(math.ceil(window.y0 / L), math.floor(window.y1 / L) + 1)
    if kx.size == 0 or ky.size == 0:
        return np.empty((0, 2))
    gx, gy = np.meshgrid(kx * L, ky * L, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def superimpose_grid(points, L: float, window: Box) -> np.ndarray:
    """
    Union of a point set with the grid points of ``L Z^2`` in a window.

    Coincident points are merged; the result is sorted lexicographically,
    which is the rank order used for in-circle tie breaking.

    Args:
        points: ``(n, 2)`` array-like of points
        L: Grid spacing (>= 1)
        window: Closed window for the grid points

    Returns:
        ``(m, 2)`` array of distinct points
    """
    if L < 1:
        raise ValueError(f"Grid spacing must be at least 1, got {L}")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    allpts = np.vstack([pts, grid_points(L, window)])
    if allpts.shape[0] == 0:
        return allpts
    return np.unique(allpts, axis=0)
