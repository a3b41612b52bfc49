"""
Resampling influences, pivotality integrals and revealment of the exploration.

Influences compare ``f_n`` on a trial with ``f_n`` after one block's driver
marks, seed points, or both are replaced by an independent copy. Pivotality
integrals insert one uniformly drawn mark into a uniformly drawn site of a
block and record whether ``f_n`` switches on.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..cox import ResampleScope, resample, width_proposals
from ..environment import Environment, inverse_position, within_width
from ..lattice import (
    BlockId,
    BlockWindow,
    Purpose,
    ValidatedParams,
    Variant,
    block_of_site,
    block_stream,
    site_of_local,
)
from ..percolation import (
    MIN_EXPLORATION_INDEX,
    CrossingState,
    crossing_profile,
    crossing_state,
    crossing_window,
    evaluate_f_n,
    explore,
    pivotal_flip,
)
from ..utils import binomial_se, combined_se, get_logger, run_trials
from ..utils.errors import OutOfWindowError, SampleSizeError
from .trials import TrialInstance, build_trial, check_trials, log_progress

logger = get_logger(__name__)

MIN_REVEALMENT_INDEX = 16
# Margin of blocks around the crossing window in which influence targets are accepted
TARGET_MARGIN = 3


@dataclass
class InfluenceEstimate:
    """
    Influences of one block on ``f_n``.

    Attributes:
        target: Block id
        trials: Number of trials
        inf_x: P(f_n changes when the block's driver marks are resampled)
        inf_y: P(f_n changes when the block's seed points are resampled)
        inf_joint: P(f_n changes when both are resampled)
        piv_integral: ``sum_x int Piv_x(r, u) d(r, u)`` over the sites of the block
        piv_site_mean: ``rho`` times the flip frequency of one inserted mark
        piv_samples: Number of inserted marks behind ``piv_integral``
    """

    target: BlockId
    trials: int
    inf_x: float
    inf_x_se: float
    inf_y: float
    inf_y_se: float
    inf_joint: float
    inf_joint_se: float
    piv_integral: float
    piv_integral_se: float
    piv_site_mean: float
    piv_samples: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "target": [int(self.target[0]), int(self.target[1])],
            "trials": self.trials,
            "inf_x": self.inf_x,
            "inf_x_se": self.inf_x_se,
            "inf_y": self.inf_y,
            "inf_y_se": self.inf_y_se,
            "inf_joint": self.inf_joint,
            "inf_joint_se": self.inf_joint_se,
            "piv_integral": self.piv_integral,
            "piv_integral_se": self.piv_integral_se,
            "piv_site_mean": self.piv_site_mean,
            "piv_samples": self.piv_samples,
        }


def target_window(p: ValidatedParams, n: int) -> BlockWindow:
    """Blocks accepted as influence targets for index ``n``."""
    return crossing_window(p, n).expand(TARGET_MARGIN)


def influence_blocks(p: ValidatedParams, n: int) -> List[BlockId]:
    """Blocks whose influence on ``f_n`` can be nonzero within the sampled windows."""
    return list(crossing_window(p, n).expand(p.dependency_range or 1))


def point_of_mark(env: Environment, x: Sequence[int], r: float, u: float) -> Optional[np.ndarray]:
    """
    Point produced by the mark ``(r, u)`` at site ``x``, as the realization
    would place it, or None if the mark is thinned away.
    """
    p = env.params
    x = (int(x[0]), int(x[1]))
    z = block_of_site(x, p)
    if not env.window.contains(z):
        return None
    if p.variant is Variant.WIDTH:
        proposal = width_proposals(np.array([float(r)]), np.array([x]), p.cube_side, p.inv_b, p.M)
        if within_width(proposal, env.block(z).width_edges, p.w0)[0]:
            return proposal[0]
        return None
    site = env.site(x)
    if not site.mass > 0 or u > site.mass:
        return None
    return inverse_position(site, r)


def _piv_draws(
    p: ValidatedParams, z: BlockId, seed: int, trial: int, count: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    rng = block_stream(seed, z, Purpose.ALG, trial=trial, replicate=1)
    local = rng.integers(0, p.sites_per_block, count)
    r = rng.random(count)
    u = rng.random(count) * p.rho
    return local, r, u


def _block_trial(
    inst: TrialInstance, state: CrossingState, lam: float, n: int, z: BlockId, seed: int, piv_samples: int
) -> Tuple[bool, bool, bool, int]:
    """Flip indicators of one block on one trial, and the number of pivotal insertions."""
    driver, env = inst.driver, inst.env
    p = env.params
    base = state.outcome

    new_driver = driver
    if driver.window.contains(z):
        new_driver, _ = resample(driver, ResampleScope.BLOCK, z, replicate=1)
    new_env = env
    if env.y_window.contains(z):
        _, new_env = resample(driver, ResampleScope.ENV_BLOCK, z, replicate=1, env=env)

    flip_x = new_driver is not driver and evaluate_f_n(new_driver, env, lam, n) != base
    flip_y = new_env is not env and evaluate_f_n(driver, new_env, lam, n) != base
    flip_joint = (new_driver is not driver or new_env is not env) and (
        evaluate_f_n(new_driver, new_env, lam, n) != base
    )

    pivots = 0
    if piv_samples > 0 and not base and env.window.contains(z):
        local, r, u = _piv_draws(p, z, seed, inst.trial, piv_samples)
        for k in range(piv_samples):
            x = site_of_local(z, int(local[k]), p)
            pivots += int(pivotal_flip(state, point_of_mark(env, x, r[k], u[k])))
    return bool(flip_x), bool(flip_y), bool(flip_joint), pivots


def _summarize(
    p: ValidatedParams, z: BlockId, trials: int, counts: np.ndarray, piv_samples: int
) -> InfluenceEstimate:
    fx, fy, fj, piv = counts
    ix, iy, ij = fx / trials, fy / trials, fj / trials
    draws = trials * piv_samples
    freq = piv / draws if draws else 0.0
    scale = p.sites_per_block * p.rho
    return InfluenceEstimate(
        target=z,
        trials=trials,
        inf_x=ix,
        inf_x_se=binomial_se(ix, trials),
        inf_y=iy,
        inf_y_se=binomial_se(iy, trials),
        inf_joint=ij,
        inf_joint_se=binomial_se(ij, trials),
        piv_integral=scale * freq,
        piv_integral_se=scale * binomial_se(freq, draws),
        piv_site_mean=p.rho * freq,
        piv_samples=draws,
    )


def estimate_block_influences(
    p: ValidatedParams,
    lam: float,
    n: int,
    blocks: Sequence[Sequence[int]],
    trials: int,
    seed: int,
    piv_samples: int = 20,
    threads: int = 1,
) -> Dict[BlockId, InfluenceEstimate]:
    """
    Influences of many blocks from shared base realizations.

    Args:
        p: Validated parameters
        lam: Level
        n: Crossing index (at least 5)
        blocks: Target blocks, each within three blocks of the crossing window
        trials: Number of trials
        seed: Master seed
        piv_samples: Inserted marks per block and trial
        threads: Worker threads

    Returns:
        Mapping from block id to InfluenceEstimate

    Raises:
        OutOfWindowError: A target outside the accepted window
    """
    check_trials(trials)
    targets: List[BlockId] = [(int(z[0]), int(z[1])) for z in blocks]
    allowed = target_window(p, n)
    for z in targets:
        if not allowed.contains(z):
            raise OutOfWindowError(f"Influence target {z} is outside {allowed.lo}..{allowed.hi}")
    window = crossing_window(p, n)

    def one(t: int) -> np.ndarray:
        inst = build_trial(p, window, lam, seed, t)
        state = crossing_state(inst.driver, inst.env, lam, n)
        out = np.zeros((len(targets), 4), dtype=np.int64)
        for i, z in enumerate(targets):
            out[i] = _block_trial(inst, state, lam, n, z, seed, piv_samples)
        log_progress(f"influences n={n}", t, trials)
        return out

    counts = np.sum(run_trials(one, range(trials), threads), axis=0)
    return {z: _summarize(p, z, trials, counts[i], piv_samples) for i, z in enumerate(targets)}


def estimate_influences(
    p: ValidatedParams,
    lam: float,
    n: int,
    target: Sequence[int],
    trials: int,
    seed: int,
    piv_samples: int = 20,
    threads: int = 1,
) -> InfluenceEstimate:
    """
    Influences of one block on ``f_n``.

    ``inf_x`` resamples the driver marks of the block, ``inf_y`` its seed
    points (rebuilding every affected environment block) and ``inf_joint``
    both; ``piv_integral`` integrates the pivotality of one inserted mark over
    the sites of the block and ``[0, 1] x [0, rho]``.

    Raises:
        OutOfWindowError: ``target`` more than three blocks outside the
            crossing window
    """
    z = (int(target[0]), int(target[1]))
    return estimate_block_influences(p, lam, n, [z], trials, seed, piv_samples, threads)[z]


def russo_pivotal_sum(
    p: ValidatedParams, lam: float, n: int, trials: int, seed: int, piv_samples: int = 50, threads: int = 1
) -> Tuple[float, float]:
    """
    ``sum_x int Piv_x(r, u) d(r, u)`` over all sites of the crossing window.

    Sites are drawn uniformly from the window, so the estimate is the number
    of sites times ``rho`` times the flip frequency.

    Returns:
        Tuple of (estimate, standard error)
    """
    check_trials(trials)
    window = crossing_window(p, n)
    (x0, y0), (x1, y1) = window.site_range(p)
    n_sites = (x1 - x0) * (y1 - y0)

    def one(t: int) -> int:
        inst = build_trial(p, window, lam, seed, t)
        state = crossing_state(inst.driver, inst.env, lam, n)
        if state.outcome:
            return 0
        rng = block_stream(seed, (0, 0), Purpose.ALG, trial=t, replicate=2)
        xs = rng.integers(x0, x1, piv_samples)
        ys = rng.integers(y0, y1, piv_samples)
        r = rng.random(piv_samples)
        u = rng.random(piv_samples) * p.rho
        flips = 0
        for k in range(piv_samples):
            point = point_of_mark(inst.env, (int(xs[k]), int(ys[k])), r[k], u[k])
            flips += int(pivotal_flip(state, point))
        log_progress(f"pivotality n={n}", t, trials)
        return flips

    flips = int(sum(run_trials(one, range(trials), threads)))
    draws = trials * piv_samples
    freq = flips / draws
    scale = n_sites * p.rho
    return scale * freq, scale * binomial_se(freq, draws)


@dataclass
class RevealmentEstimate:
    """
    Revealment frequencies of the exploration and the bound they are
    compared against.

    Attributes:
        n: Crossing index
        trials: Number of trials
        delta: Revealed fraction per block
        delta_se: Binomial standard error per block
        theta: ``theta_s`` estimates for ``s = 0..n`` from the same trials
        bound: ``(8 / n) * sum_{1 <= s <= n} theta_s``
        bound_se: Conservative standard error of the bound
        m_counts: How often each shell index was drawn
        violations: Blocks with ``delta > bound + 3 * combined SE``
    """

    n: int
    trials: int
    lam: float
    seed: int
    delta: Dict[BlockId, float]
    delta_se: Dict[BlockId, float]
    theta: Dict[int, float]
    bound: float
    bound_se: float
    m_counts: Dict[int, int]
    violations: List[BlockId] = field(default_factory=list)

    @property
    def passes(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "trials": self.trials,
            "lambda": self.lam,
            "seed": self.seed,
            "bound": self.bound,
            "bound_se": self.bound_se,
            "max_delta": max(self.delta.values()) if self.delta else 0.0,
            "passes": self.passes,
            "violations": [[int(a), int(b)] for a, b in self.violations],
            "theta": {int(s): float(v) for s, v in self.theta.items()},
            "m_counts": {int(m): int(c) for m, c in self.m_counts.items()},
        }


def revealment_counts(
    p: ValidatedParams, lam: float, n: int, trials: int, seed: int, threads: int = 1
) -> Tuple[Dict[BlockId, int], np.ndarray, Dict[int, int]]:
    """
    Raw revealment counts of the exploration with ``m`` uniform in ``{6..n-3}``.

    Returns:
        Tuple of (reveal count per block, ``theta_s`` hit counts for
        ``s = 0..n``, shell index counts)
    """
    check_trials(trials)
    window = crossing_window(p, n)

    def one(t: int) -> Tuple[List[BlockId], np.ndarray, int]:
        inst = build_trial(p, window, lam, seed, t)
        rng = block_stream(seed, (0, 0), Purpose.ALG, trial=t)
        m = int(rng.integers(MIN_EXPLORATION_INDEX, n - 3 + 1))
        result = explore(inst.driver, inst.env, lam, n, m)
        hits = np.ones(n + 1, dtype=np.int64)
        for s, hit in crossing_profile(inst.driver, inst.env, lam, n).items():
            hits[s] = int(hit)
        log_progress(f"revealment n={n}", t, trials)
        return sorted(result.revealed), hits, m

    counts: Dict[BlockId, int] = {}
    theta_hits = np.zeros(n + 1, dtype=np.int64)
    m_counts: Dict[int, int] = {}
    for revealed, hits, m in run_trials(one, range(trials), threads):
        for z in revealed:
            counts[z] = counts.get(z, 0) + 1
        theta_hits += hits
        m_counts[m] = m_counts.get(m, 0) + 1
    return counts, theta_hits, m_counts


def estimate_revealment(
    p: ValidatedParams, lam: float, n: int, trials: int, seed: int, threads: int = 1
) -> RevealmentEstimate:
    """
    Revealment frequency of every block under the randomized exploration.

    Each trial draws the shell index ``m`` uniformly from ``{6, ..., n-3}``
    with the trial's ALG stream and runs the exploration. Blocks of the seed
    window that were never revealed get ``delta = 0``.

    Raises:
        SampleSizeError: ``n < 16``
    """
    if n < MIN_REVEALMENT_INDEX:
        raise SampleSizeError(f"Revealment bounds need n >= {MIN_REVEALMENT_INDEX}, got n={n}")
    counts, theta_hits, m_counts = revealment_counts(p, lam, n, trials, seed, threads)

    theta = {s: float(theta_hits[s]) / trials for s in range(n + 1)}
    shells = [theta[s] for s in range(1, n + 1)]
    bound = 8.0 / n * sum(shells)
    bound_se = 8.0 / n * sum(binomial_se(v, trials) for v in shells)

    universe = crossing_window(p, n).expand(p.pad_blocks)
    delta: Dict[BlockId, float] = {}
    delta_se: Dict[BlockId, float] = {}
    violations: List[BlockId] = []
    for z in universe:
        d = counts.get(z, 0) / trials
        se = binomial_se(d, trials)
        delta[z] = d
        delta_se[z] = se
        if d > bound + 3.0 * combined_se(se, bound_se):
            violations.append(z)

    if violations:
        logger.warning(f"Revealment exceeds the bound on {len(violations)} blocks (n={n}, lambda={lam:g})")
    return RevealmentEstimate(
        n=n,
        trials=trials,
        lam=float(lam),
        seed=seed,
        delta=delta,
        delta_se=delta_se,
        theta=theta,
        bound=bound,
        bound_se=bound_se,
        m_counts=dict(sorted(m_counts.items())),
        violations=violations,
    )
