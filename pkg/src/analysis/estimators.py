"""
Monte Carlo estimators of crossing probabilities and of the critical level.

All estimators draw one environment and one driver per trial. Drivers are
sampled up to the largest level a trial needs and realized at every smaller
level, so the per-trial outcomes of a level grid are nested (monotone
coupling) and a level's estimate does not depend on the grid it belongs to.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from ..lattice import ValidatedParams
from ..percolation import (
    MIN_CROSSING_INDEX,
    check_crossing_index,
    crossing_profile,
    crossing_window,
    evaluate_f_n,
)
from ..utils import get_logger, run_trials, wilson_interval
from ..utils.errors import NoSignChangeError
from .trials import build_trial, check_trials, log_progress

logger = get_logger(__name__)


@dataclass(frozen=True)
class ThetaEstimate:
    """
    Estimate of ``theta_n(lambda)`` with a 95% Wilson interval.

    Attributes:
        lam: Level
        n: Crossing index
        trials: Number of trials
        hits: Trials in which the crossing occurred
        theta: Point estimate ``hits / trials``
        ci_lo: Lower end of the interval
        ci_hi: Upper end of the interval
        seed: Master seed
    """

    lam: float
    n: int
    trials: int
    hits: int
    theta: float
    ci_lo: float
    ci_hi: float
    seed: int

    @classmethod
    def from_hits(cls, lam: float, n: int, trials: int, hits: int, seed: int) -> "ThetaEstimate":
        if n < MIN_CROSSING_INDEX:
            return cls(float(lam), n, trials, trials, 1.0, 1.0, 1.0, seed)
        lo, hi = wilson_interval(hits, trials)
        return cls(float(lam), n, trials, int(hits), hits / trials, lo, hi, seed)

    @property
    def se(self) -> float:
        return math.sqrt(max(self.theta * (1.0 - self.theta), 0.0) / self.trials)

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out["lambda"] = out.pop("lam")
        return out


def coupled_outcomes(
    p: ValidatedParams,
    lambdas: Sequence[float],
    n: int,
    trials: int,
    seed: int,
    threads: int = 1,
) -> np.ndarray:
    """
    Per-trial crossing outcomes on a level grid.

    Args:
        p: Validated parameters
        lambdas: Levels (any order)
        n: Crossing index
        trials: Number of trials
        seed: Master seed
        threads: Worker threads

    Returns:
        ``(trials, len(lambdas))`` boolean array; rows are nondecreasing in
        the level
    """
    check_trials(trials)
    lambdas = [float(lam) for lam in lambdas]
    if n < MIN_CROSSING_INDEX:
        return np.ones((trials, len(lambdas)), dtype=bool)
    window = crossing_window(p, n)
    lambda_max = max(lambdas) if lambdas else 0.0

    def one(t: int) -> np.ndarray:
        inst = build_trial(p, window, lambda_max, seed, t)
        row = np.array([evaluate_f_n(inst.driver, inst.env, lam, n) for lam in lambdas], dtype=bool)
        log_progress(f"theta n={n}", t, trials)
        return row

    rows = run_trials(one, range(trials), threads)
    return np.vstack(rows) if rows else np.zeros((0, len(lambdas)), dtype=bool)


def estimate_theta(
    p: ValidatedParams, lam: float, n: int, trials: int, seed: int, threads: int = 1
) -> ThetaEstimate:
    """
    Estimate ``theta_n(lambda)``.

    ``n <= 4`` returns 1 with a zero-width interval without sampling.

    Raises:
        WindowTooSmallError: Propagated from the crossing evaluation
    """
    check_trials(trials)
    if n < MIN_CROSSING_INDEX:
        return ThetaEstimate.from_hits(lam, n, trials, trials, seed)
    outcomes = coupled_outcomes(p, [lam], n, trials, seed, threads)
    est = ThetaEstimate.from_hits(lam, n, trials, int(outcomes[:, 0].sum()), seed)
    logger.info(f"theta_{n}({lam:g}) = {est.theta:.4f} [{est.ci_lo:.4f}, {est.ci_hi:.4f}] over {trials} trials")
    return est


def sweep_theta(
    p: ValidatedParams, lambdas: Sequence[float], n: int, trials: int, seed: int, threads: int = 1
) -> List[ThetaEstimate]:
    """Coupled estimates of ``theta_n`` on a level grid; hits are nondecreasing in the level."""
    outcomes = coupled_outcomes(p, lambdas, n, trials, seed, threads)
    hits = outcomes.sum(axis=0)
    return [ThetaEstimate.from_hits(lam, n, trials, int(h), seed) for lam, h in zip(lambdas, hits)]


def profile_outcomes(
    p: ValidatedParams,
    lambdas: Sequence[float],
    n: int,
    trials: int,
    seed: int,
    threads: int = 1,
) -> np.ndarray:
    """
    Per-trial outcomes of ``f_s`` for ``s = 0..n`` on a level grid.

    Returns:
        ``(trials, len(lambdas), n + 1)`` boolean array; entries with
        ``s <= 4`` are true
    """
    check_trials(trials)
    check_crossing_index(n)
    lambdas = [float(lam) for lam in lambdas]
    window = crossing_window(p, n)
    lambda_max = max(lambdas) if lambdas else 0.0

    def one(t: int) -> np.ndarray:
        inst = build_trial(p, window, lambda_max, seed, t)
        out = np.ones((len(lambdas), n + 1), dtype=bool)
        for i, lam in enumerate(lambdas):
            for s, hit in crossing_profile(inst.driver, inst.env, lam, n).items():
                out[i, s] = hit
        log_progress(f"profile n={n}", t, trials)
        return out

    return np.stack(run_trials(one, range(trials), threads))


def estimate_theta_profile(
    p: ValidatedParams, lam: float, n: int, trials: int, seed: int, threads: int = 1
) -> Dict[int, ThetaEstimate]:
    """
    Estimates of ``theta_s(lambda)`` for every ``s <= n`` from one set of
    realizations (the events are nested, so the table is nonincreasing in ``s``).
    """
    outcomes = profile_outcomes(p, [lam], n, trials, seed, threads)[:, 0, :]
    hits = outcomes.sum(axis=0)
    return {s: ThetaEstimate.from_hits(lam, s, trials, int(hits[s]), seed) for s in range(n + 1)}


def profile_sum(profile: Dict[int, ThetaEstimate]) -> Tuple[float, float]:
    """
    ``sum_{1 <= s <= n} theta_s`` and a conservative standard error (sum of SEs).

    The ``s = 0`` entry is left out of the sum.
    """
    terms = [est for s, est in profile.items() if s >= 1]
    total = sum(est.theta for est in terms)
    se = sum(est.se for est in terms)
    return total, se


@dataclass
class LambdaCBracket:
    """
    Bisection bracket of the level where ``theta_n`` crosses ``threshold``.

    This is a finite-size proxy for the critical level at index ``n``, not an
    estimate of the infinite-volume limit.
    """

    lo: float
    hi: float
    theta_lo: float
    theta_hi: float
    threshold: float
    n: int
    trials: int
    seed: int
    iterations: int
    thresholds: List[float] = field(default_factory=list, repr=False)
    note: str = "finite-size proxy for lambda_c at index n"

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def to_dict(self) -> Dict[str, Any]:
        out = asdict(self)
        out.pop("thresholds")
        out["midpoint"] = self.midpoint
        return out


def trial_thresholds(
    p: ValidatedParams, n: int, trials: int, seed: int, lambda_max: float, threads: int = 1
) -> np.ndarray:
    """
    Smallest level at which ``f_n`` holds, per trial.

    The outcome can only change at the coupling level ``t`` of a driver mark,
    so a binary search over the sorted levels gives the exact threshold.
    Trials without a crossing at ``lambda_max`` get ``inf``.
    """
    check_trials(trials)
    check_crossing_index(n)
    window = crossing_window(p, n)

    def one(t: int) -> float:
        inst = build_trial(p, window, lambda_max, seed, t)
        crosses = lambda lam: evaluate_f_n(inst.driver, inst.env, lam, n)
        if not crosses(lambda_max):
            return math.inf
        levels = np.unique(np.concatenate([inst.driver.marks(z).t for z in window]))
        levels = levels[levels <= lambda_max]
        lo, hi = 0, levels.shape[0] - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if crosses(float(levels[mid])):
                hi = mid
            else:
                lo = mid + 1
        log_progress(f"thresholds n={n}", t, trials)
        return float(levels[lo])

    return np.array(run_trials(one, range(trials), threads), dtype=float)


def estimate_lambda_c(
    p: ValidatedParams,
    n: int,
    trials: int,
    seed: int,
    threshold: float = 0.5,
    tol: float = 0.01,
    bracket: Tuple[float, float] = (0.0, 1.0),
    threads: int = 1,
) -> LambdaCBracket:
    """
    Bisect ``lambda -> theta_n(lambda)`` against ``threshold``.

    The coupled estimate is the empirical distribution function of the
    per-trial thresholds, so every bisection step is exact for the sampled
    trials and the estimate is monotone in the level.

    Args:
        p: Validated parameters
        n: Crossing index (at least 5)
        trials: Number of trials
        seed: Master seed
        threshold: Target probability in (0, 1)
        tol: Final bracket width
        bracket: Initial ``(lo, hi)`` levels
        threads: Worker threads

    Returns:
        LambdaCBracket with ``theta(lo) < threshold <= theta(hi)`` and
        ``hi - lo <= tol``

    Raises:
        NoSignChangeError: Both ends of the initial bracket lie on the same
            side of ``threshold``
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    lo, hi = float(bracket[0]), float(bracket[1])
    if not 0.0 <= lo < hi:
        raise ValueError(f"Initial bracket must satisfy 0 <= lo < hi, got {bracket}")

    taus = trial_thresholds(p, n, trials, seed, hi, threads)
    theta = lambda lam: float(np.count_nonzero(taus <= lam)) / trials

    theta_lo, theta_hi = theta(lo), theta(hi)
    if not theta_lo < threshold <= theta_hi:
        raise NoSignChangeError(
            f"theta_{n} is {theta_lo:.4f} at {lo:g} and {theta_hi:.4f} at {hi:g}; "
            f"threshold {threshold:g} is not bracketed"
        )

    iterations = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if theta(mid) < threshold:
            lo = mid
        else:
            hi = mid
        iterations += 1

    result = LambdaCBracket(
        lo=lo,
        hi=hi,
        theta_lo=theta(lo),
        theta_hi=theta(hi),
        threshold=threshold,
        n=n,
        trials=trials,
        seed=seed,
        iterations=iterations,
        thresholds=[float(x) for x in taus],
    )
    logger.info(f"lambda_c bracket at n={n}: [{lo:.6g}, {hi:.6g}] after {iterations} halvings")
    return result


def theta_from_thresholds(taus: Sequence[float], lam: float, n: int, seed: int) -> ThetaEstimate:
    """``theta_n(lambda)`` from per-trial thresholds."""
    taus = np.asarray(taus, dtype=float)
    return ThetaEstimate.from_hits(lam, n, taus.shape[0], int(np.count_nonzero(taus <= lam)), seed)
