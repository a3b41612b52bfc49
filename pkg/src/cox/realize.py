"""
Realization of the Cox configuration from driver marks and an environment.

A mark ``(v, u, t)`` of site ``x`` becomes a point when ``t <= lambda`` and
``u <= U_x``; its position is the point at arc length ``v * total`` along the
site's clipped streets. For thickened streets the mark is instead turned into
one uniform proposal in the cube, kept when it lies within ``w0`` of the
streets.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import numpy as np
import pandas as pd

from ..environment import Environment, locate_arc, points_on_pieces, within_width
from ..lattice import BlockId, Variant, zigzag
from ..utils import get_logger
from ..utils.errors import MarkRangeError, OutOfWindowError, ScaleMismatchError
from .driver import BlockMarks, Driver

logger = get_logger(__name__)

_UNIT = 2.0 ** -53


@dataclass(frozen=True)
class CoxConfiguration:
    """
    Realized point configuration.

    Attributes:
        points: ``(N, 2)`` point coordinates
        sites: ``(N, 2)`` site index of each point
        mark_index: Index of the generating mark in its block's mark list
        lam: Realization level
        ceiling_hits: Sites whose mass exceeds the driver ceiling ``rho``
        width_rejections: WIDTH marks whose proposal fell off the streets
    """

    points: np.ndarray
    sites: np.ndarray
    mark_index: np.ndarray
    lam: float
    ceiling_hits: int = 0
    width_rejections: int = 0

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0])

    @classmethod
    def empty(cls, lam: float) -> "CoxConfiguration":
        return cls(np.empty((0, 2)), np.empty((0, 2), dtype=np.int64), np.empty(0, dtype=np.int64), float(lam))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "x": self.points[:, 0],
            "y": self.points[:, 1],
            "site_x": self.sites[:, 0],
            "site_y": self.sites[:, 1],
            "mark_index": self.mark_index,
        })


@dataclass(frozen=True)
class BlockPoints:
    points: np.ndarray
    sites: np.ndarray
    mark_index: np.ndarray
    ceiling_hits: int
    width_rejections: int


def width_proposals(v: np.ndarray, sites: np.ndarray, cube_side: float, inv_b: int, M: float) -> np.ndarray:
    """
    One uniform proposal per WIDTH mark, seeded by the mark.

    The generator of a mark is seeded with the bits of ``v`` and the zigzag
    encoded site index; the first draw gives ``x``, the second ``y``.
    """
    out = np.empty((v.shape[0], 2))
    bits = np.asarray(v, dtype=np.float64).view(np.uint64)
    for i in range(v.shape[0]):
        kx, ky = int(sites[i, 0]), int(sites[i, 1])
        state = np.random.SeedSequence([int(bits[i]), zigzag(kx), zigzag(ky)]).generate_state(2, np.uint64)
        ux, uy = (float(s >> np.uint64(11)) * _UNIT for s in state)
        out[i, 0] = kx * M / inv_b + cube_side * ux
        out[i, 1] = ky * M / inv_b + cube_side * uy
    return out


def realize_block(env: Environment, z: BlockId, marks: BlockMarks, lam: float) -> BlockPoints:
    """Points of block ``z`` at level ``lam``."""
    p = env.params
    n = p.inv_b
    active = np.nonzero(marks.t <= lam)[0]
    masses = env.block_mass(z)
    hits = int(np.count_nonzero(masses > p.rho)) if p.variant in (Variant.DEL, Variant.DEL_GRID) else 0
    if active.shape[0] == 0:
        return BlockPoints(np.empty((0, 2)), np.empty((0, 2), dtype=np.int64), np.empty(0, dtype=np.int64), hits, 0)

    site = marks.site[active]
    local = (site[:, 0] - z[0] * n) * n + (site[:, 1] - z[1] * n)
    data = env.block(z)

    if p.variant is Variant.WIDTH:
        idx = active
        proposals = width_proposals(marks.v[idx], marks.site[idx], p.cube_side, n, p.M)
        inside = within_width(proposals, data.width_edges, p.w0)
        rejected = int(idx.shape[0] - np.count_nonzero(inside))
        idx = idx[inside]
        return BlockPoints(proposals[inside], marks.site[idx], idx, hits, rejected)

    accept = marks.u[active] <= masses[local]
    accept &= masses[local] > 0
    idx = active[accept]
    loc = local[accept]
    piece, frac = locate_arc(
        data.cum, data.lengths, data.offsets[loc], data.offsets[loc + 1], marks.v[idx] * data.total[loc]
    )
    pts = points_on_pieces(data.segments, piece, frac)
    return BlockPoints(pts, marks.site[idx], idx, hits, 0)


def _check_compatible(driver: Driver, env: Environment, lam: float) -> None:
    if not driver.params.same_scales(env.params):
        raise ScaleMismatchError("Driver and environment were built with different parameters")
    if not 0.0 <= lam <= driver.lambda_max:
        raise MarkRangeError(f"lambda={lam} outside [0, lambda_max={driver.lambda_max}]")


def realize_blocks(
    driver: Driver, env: Environment, lam: float, blocks: Iterable[BlockId]
) -> CoxConfiguration:
    """
    Realize the configuration restricted to some blocks.

    Raises:
        ScaleMismatchError: Driver and environment disagree on the scales
        MarkRangeError: ``lam`` outside ``[0, lambda_max]``
        OutOfWindowError: A block outside the driver or environment window
    """
    lam = float(lam)
    _check_compatible(driver, env, lam)
    parts: List[BlockPoints] = []
    for z in blocks:
        if not env.window.contains(z):
            raise OutOfWindowError(f"Block {z} is outside the environment window")
        parts.append(realize_block(env, z, driver.marks(z), lam))
    return assemble(parts, lam)


def assemble(parts: Sequence[BlockPoints], lam: float) -> CoxConfiguration:
    if not parts:
        return CoxConfiguration.empty(lam)
    hits = sum(b.ceiling_hits for b in parts)
    if hits:
        logger.warning(f"{hits} sites exceed the driver ceiling rho; their intensity is truncated")
    return CoxConfiguration(
        points=np.vstack([b.points for b in parts]).reshape(-1, 2),
        sites=np.vstack([b.sites for b in parts]).reshape(-1, 2).astype(np.int64),
        mark_index=np.concatenate([b.mark_index for b in parts]).astype(np.int64),
        lam=lam,
        ceiling_hits=hits,
        width_rejections=sum(b.width_rejections for b in parts),
    )


def realize(driver: Driver, env: Environment, lam: float) -> CoxConfiguration:
    """
    Realize the Cox configuration on the driver's window at level ``lam``.

    Args:
        driver: Driver marks
        env: Environment covering the driver window
        lam: Level in ``[0, driver.lambda_max]``

    Returns:
        CoxConfiguration; configurations of one driver are nested in ``lam``

    Raises:
        ScaleMismatchError: Driver and environment disagree on the scales
        MarkRangeError: ``lam`` outside ``[0, lambda_max]``
    """
    return realize_blocks(driver, env, lam, list(driver.window))


def write_configuration(config: CoxConfiguration, path: Union[str, Path]) -> Path:
    """Write the point table as CSV with ``# key=value`` header lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# lambda={config.lam:.10g}\n")
        f.write(f"# points={config.n_points}\n")
        config.to_frame().to_csv(f, index=False, float_format="%.17g")
    return path
