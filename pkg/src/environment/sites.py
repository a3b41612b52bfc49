"""
Per-site environment records and the arc-length inverse map.

Sites of one block are stored together in ``BlockSites``: a piece table of the
clipped street segments, grouped by local site index, with a running length
table per site. The position law of a site is the uniform distribution on its
clipped segments, realized by walking the concatenated segments by arc length.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..lattice import BlockId, SiteId, Variant
from ..utils.errors import EmptySupportError, VariantMismatchError


@dataclass(frozen=True)
class BlockSites:
    """
    Environment data of all sites of one block.

    Attributes:
        block: Block id
        total: ``(S,)`` uncapped clipped length per local site
        mass: ``(S,)`` site masses, or None for WIDTH (computed on demand)
        offsets: ``(S + 1,)`` piece offsets per local site
        segments: ``(K, 4)`` clipped pieces grouped by site
        lengths: ``(K,)`` piece lengths
        cum: ``(K,)`` running length within each site, ends at ``total``
        width_edges: ``(E, 4)`` street edges within ``w0`` of the block (WIDTH)
    """

    block: BlockId
    total: np.ndarray
    mass: Optional[np.ndarray]
    offsets: np.ndarray
    segments: np.ndarray
    lengths: np.ndarray
    cum: np.ndarray
    width_edges: Optional[np.ndarray] = None

    @property
    def n_sites(self) -> int:
        return int(self.total.shape[0])

    def site_slice(self, local: int) -> slice:
        return slice(int(self.offsets[local]), int(self.offsets[local + 1]))

    def same_as(self, other: "BlockSites", local: Optional[int] = None) -> bool:
        """Bit-identical comparison of the whole block or one local site."""
        if local is None:
            fields = ("total", "offsets", "segments", "cum")
            same = all(np.array_equal(getattr(self, f), getattr(other, f)) for f in fields)
            if self.mass is not None or other.mass is not None:
                same = same and self.mass is not None and other.mass is not None \
                    and np.array_equal(self.mass, other.mass)
        else:
            a, b = self.site_slice(local), other.site_slice(local)
            same = (
                self.total[local] == other.total[local]
                and np.array_equal(self.segments[a], other.segments[b])
                and np.array_equal(self.cum[a], other.cum[b])
            )
            if self.mass is not None and other.mass is not None:
                same = same and self.mass[local] == other.mass[local]
        if self.width_edges is not None or other.width_edges is not None:
            same = same and self.width_edges is not None and other.width_edges is not None \
                and np.array_equal(self.width_edges, other.width_edges)
        return bool(same)


@dataclass(frozen=True)
class EnvironmentSite:
    """
    Environment entry of one site.

    ``segments`` and ``cum`` are empty for WIDTH; ``width_edges`` is set only
    for WIDTH.
    """

    site: SiteId
    variant: Variant
    mass: float
    total: float
    segments: np.ndarray
    lengths: np.ndarray
    cum: np.ndarray
    width_edges: Optional[np.ndarray] = None


def locate_arc(
    cum: np.ndarray,
    lengths: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    target: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized arc-length lookup in grouped running-length tables.

    For every query the piece index is the first ``i`` in ``[lo, hi)`` with
    ``cum[i] >= target`` (the last piece if none), and the fraction is the
    position inside that piece.

    Returns:
        Tuple of (piece indices, fractions in [0, 1])
    """
    left = lo.astype(np.int64).copy()
    right = (hi - 1).astype(np.int64)
    while True:
        open_ = left < right
        if not np.any(open_):
            break
        mid = (left + right) // 2
        below = cum[mid] < target
        left = np.where(open_ & below, mid + 1, left)
        right = np.where(open_ & ~below, mid, right)
    idx = left
    prev = np.where(idx > lo, cum[np.maximum(idx - 1, 0)], 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(lengths[idx] > 0.0, (target - prev) / lengths[idx], 0.0)
    return idx, np.clip(frac, 0.0, 1.0)


def points_on_pieces(segments: np.ndarray, idx: np.ndarray, frac: np.ndarray) -> np.ndarray:
    a = segments[idx, 0:2]
    b = segments[idx, 2:4]
    return a + frac[:, None] * (b - a)


def inverse_position(site: EnvironmentSite, v: float) -> np.ndarray:
    """
    Point at arc length ``v * total`` along the ordered clipped segments.

    Args:
        site: Environment entry with a segment table
        v: Position coordinate in [0, 1]

    Returns:
        ``(2,)`` point in the site's cube

    Raises:
        EmptySupportError: The site has mass 0
        VariantMismatchError: WIDTH sites carry no segment table
    """
    if site.variant is Variant.WIDTH:
        raise VariantMismatchError("WIDTH sites are sampled by thinning, not by arc length")
    if not site.mass > 0 or site.segments.shape[0] == 0:
        raise EmptySupportError(f"Site {site.site} has empty support")
    idx, frac = locate_arc(
        site.cum,
        site.lengths,
        np.zeros(1, dtype=np.int64),
        np.array([site.cum.shape[0]], dtype=np.int64),
        np.array([float(v) * site.total]),
    )
    return points_on_pieces(site.segments, idx, frac)[0]
