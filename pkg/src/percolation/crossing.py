"""
Crossing events ``f_n``: the box of half-size ``3M`` is connected to the
shell ``dLambda_{Mn} = {Mn - 2M < |p|_inf <= Mn - M}``.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np

from ..cox import CoxConfiguration, Driver, realize_blocks
from ..environment import Environment
from ..lattice import BlockWindow, ValidatedParams
from ..utils import get_logger
from ..utils.errors import CrossingIndexError, WindowTooSmallError
from .clusters import ClusterLabels, SpatialHash, build_clusters
from .regions import RegionSpec

logger = get_logger(__name__)

MIN_CROSSING_INDEX = 5


def source_region(p: ValidatedParams) -> RegionSpec:
    return RegionSpec.box(3 * p.M)


def target_region(p: ValidatedParams, n: int) -> RegionSpec:
    return RegionSpec.annulus(p.M * n, p.M)


def required_blocks(p: ValidatedParams, n: int) -> int:
    """Smallest ``k`` with ``[-Mk, Mk)^2`` covering the ``ball_radius`` neighbourhood of ``Lambda_{Mn-M}``."""
    return int(np.floor((p.M * n - p.M + p.ball_radius) / p.M)) + 1


def crossing_window(p: ValidatedParams, n: int) -> BlockWindow:
    return BlockWindow.centered(required_blocks(p, n))


def check_crossing_index(n: int) -> None:
    if n < MIN_CROSSING_INDEX:
        raise CrossingIndexError(f"Crossing index n={n} must be at least {MIN_CROSSING_INDEX}")


def check_window(driver: Driver, env: Environment, window: BlockWindow) -> None:
    for name, have in (("driver", driver.window), ("environment", env.window)):
        if not have.contains_window(window):
            raise WindowTooSmallError(
                f"The {name} window {have.lo}..{have.hi} does not cover the blocks {window.lo}..{window.hi}"
            )


@dataclass
class CrossingState:
    """
    Clusters of one realization restricted to the crossing region, with the
    per-cluster contact flags of the source box and target shell.
    """

    params: ValidatedParams
    n: int
    config: CoxConfiguration
    labels: ClusterLabels
    index: SpatialHash
    near_source: np.ndarray
    near_target: np.ndarray

    @property
    def points(self) -> np.ndarray:
        return self.config.points

    @property
    def outcome(self) -> bool:
        return bool(np.any(self.near_source & self.near_target))


def crossing_config(driver: Driver, env: Environment, lam: float, n: int) -> CoxConfiguration:
    """Points of the realization within ``ball_radius`` of ``Lambda_{Mn-M}``."""
    p = env.params
    check_crossing_index(n)
    window = crossing_window(p, n)
    check_window(driver, env, window)
    config = realize_blocks(driver, env, lam, list(window))
    keep = RegionSpec.box(p.M * n - p.M).near(config.points, p.ball_radius)
    return CoxConfiguration(
        points=config.points[keep],
        sites=config.sites[keep],
        mark_index=config.mark_index[keep],
        lam=config.lam,
        ceiling_hits=config.ceiling_hits,
        width_rejections=config.width_rejections,
    )


def crossing_state(driver: Driver, env: Environment, lam: float, n: int) -> CrossingState:
    """Cluster the crossing region of index ``n``."""
    p = env.params
    config = crossing_config(driver, env, lam, n)
    labels = build_clusters(config, p.ball_radius)
    target = target_region(p, n)
    near_source = np.zeros(labels.n_clusters, dtype=bool)
    near_target = np.zeros(labels.n_clusters, dtype=bool)
    near_source[labels.labels[source_region(p).near(config.points, p.ball_radius)]] = True
    near_target[labels.labels[target.near(config.points, p.ball_radius)]] = True
    return CrossingState(
        params=p,
        n=n,
        config=config,
        labels=labels,
        index=SpatialHash(config.points, 2.0 * p.ball_radius),
        near_source=near_source,
        near_target=near_target,
    )


def evaluate_f_n(driver: Driver, env: Environment, lam: float, n: int) -> bool:
    """
    Crossing indicator ``f_n``: is ``Lambda_{3M}`` connected to ``dLambda_{Mn}``?

    Callers use ``theta := 1`` for ``n <= 4`` instead of evaluating.

    Raises:
        CrossingIndexError: ``n < 5``
        WindowTooSmallError: The driver or environment window misses part of
            the crossing region
    """
    return crossing_state(driver, env, lam, n).outcome


def crossing_profile(driver: Driver, env: Environment, lam: float, n: int) -> Dict[int, bool]:
    """
    ``f_s`` for every ``s`` in ``5..n`` from one clustering of the region of ``n``.

    A connection to the shell of ``s`` only uses points inside
    ``Lambda_{Ms-2M}`` plus one point near the shell, so clusters of the larger
    region decide every smaller index.
    """
    state = crossing_state(driver, env, lam, n)
    p = state.params
    pts = state.points
    out: Dict[int, bool] = {}
    for s in range(MIN_CROSSING_INDEX, n + 1):
        near_target = np.zeros(state.labels.n_clusters, dtype=bool)
        near_target[state.labels.labels[target_region(p, s).near(pts, p.ball_radius)]] = True
        out[s] = bool(np.any(state.near_source & near_target))
    return out


def pivotal_flip(state: CrossingState, point: Optional[Sequence[float]]) -> bool:
    """
    Whether adding one point at ``point`` turns ``f_n`` from false to true.

    ``None`` (a mark that produces no point) never flips, and neither does a
    point farther than ``ball_radius`` from ``Lambda_{Mn-M}``.
    """
    if point is None or state.outcome:
        return False
    p = state.params
    r = p.ball_radius
    pt = np.asarray(point, dtype=float).reshape(1, 2)
    if not RegionSpec.box(p.M * state.n - p.M).near(pt, r)[0]:
        return False
    touched = state.labels.labels[state.index.query(pt[0], 2.0 * r)]
    source = bool(source_region(p).near(pt, r)[0]) or bool(np.any(state.near_source[touched]))
    target = bool(target_region(p, state.n).near(pt, r)[0]) or bool(np.any(state.near_target[touched]))
    return source and target
