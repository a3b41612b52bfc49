"""
Target regions of crossing events and the connection predicate.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np

from ..cox import CoxConfiguration
from ..utils.errors import RegionsOverlapError
from .clusters import ClusterLabels


class RegionKind(str, Enum):
    BOX = "box"
    ANNULUS = "annulus"


@dataclass(frozen=True)
class RegionSpec:
    """
    ``BOX``: the square ``[-a, a]^2``. ``ANNULUS``: the square shell
    ``{a - 2M < |p|_inf <= a - M}``.
    """

    kind: RegionKind
    a: float
    M: float = 1.0

    def __post_init__(self):
        if self.kind is RegionKind.ANNULUS and not self.a > 2 * self.M:
            raise ValueError(f"Annulus needs a > 2M, got a={self.a}, M={self.M}")
        if self.kind is RegionKind.BOX and self.a < 0:
            raise ValueError(f"Box half-size must be nonnegative, got {self.a}")

    @classmethod
    def box(cls, a: float) -> "RegionSpec":
        return cls(RegionKind.BOX, float(a))

    @classmethod
    def annulus(cls, a: float, M: float) -> "RegionSpec":
        return cls(RegionKind.ANNULUS, float(a), float(M))

    def sup_interval(self) -> Tuple[float, float]:
        """Range of ``|p|_inf`` covered by the region (open below for ANNULUS)."""
        if self.kind is RegionKind.BOX:
            return 0.0, self.a
        return self.a - 2 * self.M, self.a - self.M

    def distances(self, points: np.ndarray) -> np.ndarray:
        """Euclidean distance from each point to the region."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        if self.kind is RegionKind.BOX:
            return _box_distance(pts, self.a)
        inner, outer = self.sup_interval()
        sup = np.max(np.abs(pts), axis=1)
        return np.where(sup <= inner, inner - sup, _box_distance(pts, outer))

    def near(self, points: np.ndarray, radius: float) -> np.ndarray:
        return self.distances(points) <= radius

    def overlaps(self, other: "RegionSpec") -> bool:
        lo_a, hi_a = self.sup_interval()
        lo_b, hi_b = other.sup_interval()
        # BOX intervals are closed at 0; ANNULUS intervals are open below
        if self.kind is RegionKind.BOX and other.kind is RegionKind.BOX:
            return True
        return max(lo_a, lo_b) < min(hi_a, hi_b)


def _box_distance(pts: np.ndarray, a: float) -> np.ndarray:
    dx = np.maximum(np.abs(pts[:, 0]) - a, 0.0)
    dy = np.maximum(np.abs(pts[:, 1]) - a, 0.0)
    return np.hypot(dx, dy)


def connects(
    config: Union[CoxConfiguration, np.ndarray],
    labels: ClusterLabels,
    A: RegionSpec,
    B: RegionSpec,
    ball_radius: float,
) -> bool:
    """
    Whether some cluster has a point within ``ball_radius`` of ``A`` and a
    point within ``ball_radius`` of ``B``.

    Raises:
        RegionsOverlapError: ``A`` and ``B`` intersect
    """
    if A.overlaps(B):
        raise RegionsOverlapError(f"Regions {A} and {B} overlap")
    pts = config.points if isinstance(config, CoxConfiguration) else np.asarray(config, dtype=float)
    pts = pts.reshape(-1, 2)
    if pts.shape[0] == 0:
        return False
    near_a = np.zeros(labels.n_clusters, dtype=bool)
    near_b = np.zeros(labels.n_clusters, dtype=bool)
    near_a[labels.labels[A.near(pts, ball_radius)]] = True
    near_b[labels.labels[B.near(pts, ball_radius)]] = True
    return bool(np.any(near_a & near_b))
