"""
Sharpness diagnostics: exponential decay of ``theta_n`` in ``n`` below the
critical level and linear growth of ``theta`` above it.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.stats import linregress

from ..lattice import ValidatedParams
from ..utils import get_logger
from ..utils.errors import CrossingIndexError
from .estimators import LambdaCBracket, estimate_lambda_c, profile_outcomes

logger = get_logger(__name__)

INSUFFICIENT_DATA = "INSUFFICIENT_DATA"


@dataclass(frozen=True)
class RegressionFit:
    """Least-squares line ``y = slope * x + intercept``."""

    slope: float
    intercept: float
    r_squared: float
    slope_se: float
    n_points: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _fit(x: np.ndarray, y: np.ndarray) -> RegressionFit:
    res = linregress(x, y)
    se = float(res.stderr) if np.isfinite(res.stderr) else 0.0
    return RegressionFit(
        slope=float(res.slope),
        intercept=float(res.intercept),
        r_squared=float(res.rvalue) ** 2 if np.isfinite(res.rvalue) else 1.0,
        slope_se=se,
        n_points=int(x.shape[0]),
    )


def fit_decay(ns: Sequence[int], thetas: Sequence[float]) -> Optional[RegressionFit]:
    """
    Regress ``log theta_n`` on ``n`` over the positive estimates.

    Returns:
        RegressionFit, or None with fewer than two positive estimates at
        distinct ``n``
    """
    ns = np.asarray(ns, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    keep = thetas > 0
    if np.unique(ns[keep]).shape[0] < 2:
        return None
    return _fit(ns[keep], np.log(thetas[keep]))


def fit_linear_growth(
    lambdas: Sequence[float], thetas: Sequence[float], lambda_c: float
) -> Optional[RegressionFit]:
    """
    Regress ``theta`` on ``lambda - lambda_c``.

    Returns:
        RegressionFit, or None with fewer than two distinct levels
    """
    x = np.asarray(lambdas, dtype=float) - float(lambda_c)
    y = np.asarray(thetas, dtype=float)
    if np.unique(x).shape[0] < 2:
        return None
    return _fit(x, y)


@dataclass
class DecayRow:
    lam: float
    thetas: Dict[int, float]
    fit: Optional[RegressionFit]
    note: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda": self.lam,
            "thetas": {int(k): float(v) for k, v in self.thetas.items()},
            "fit": self.fit.to_dict() if self.fit else None,
            "note": self.note,
        }


@dataclass
class SharpnessReport:
    """
    Attributes:
        lambda_c_lo: Lower end of the critical bracket
        lambda_c_hi: Upper end of the critical bracket
        n_list: Indices used for the decay fits
        n_max: Index of the bracket and of the growth fit
        subcritical: One decay row per level below the bracket
        supercritical: Growth fit over the levels above the bracket
        supercritical_thetas: ``theta_{n_max}`` per level above the bracket
        notes: Diagnostic notes (``INSUFFICIENT_DATA`` rows and the like)
    """

    lambda_c_lo: float
    lambda_c_hi: float
    n_list: List[int]
    n_max: int
    trials: int
    seed: int
    subcritical: List[DecayRow] = field(default_factory=list)
    supercritical: Optional[RegressionFit] = None
    supercritical_thetas: Dict[float, float] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def lambda_c_hat(self) -> float:
        return 0.5 * (self.lambda_c_lo + self.lambda_c_hi)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda_c_lo": self.lambda_c_lo,
            "lambda_c_hi": self.lambda_c_hi,
            "lambda_c_hat": self.lambda_c_hat,
            "n_list": [int(n) for n in self.n_list],
            "n_max": self.n_max,
            "trials": self.trials,
            "seed": self.seed,
            "subcritical": [row.to_dict() for row in self.subcritical],
            "supercritical": self.supercritical.to_dict() if self.supercritical else None,
            "supercritical_thetas": {float(k): float(v) for k, v in self.supercritical_thetas.items()},
            "notes": list(self.notes),
        }


def fit_sharpness(
    p: ValidatedParams,
    lambda_list: Sequence[float],
    n_list: Sequence[int],
    trials: int,
    seed: int,
    threads: int = 1,
    bracket: Optional[LambdaCBracket] = None,
    threshold: float = 0.5,
    tol: Optional[float] = None,
) -> SharpnessReport:
    """
    Decay fits below and a growth fit above the critical bracket.

    All levels share one set of trials (coupled), and every ``theta_s`` of a
    trial comes from one realization at the largest index.

    Args:
        p: Validated parameters
        lambda_list: Levels straddling the critical bracket
        n_list: Crossing indices of the decay fits (each at least 5)
        trials: Trials per level
        seed: Master seed
        threads: Worker threads
        bracket: Precomputed critical bracket; estimated at ``max(n_list)``
            over ``[min(lambda_list), max(lambda_list)]`` when omitted
        threshold: Threshold of the bracket estimate
        tol: Bracket width (defaults to 1% of the level range)

    Returns:
        SharpnessReport; rows without data carry ``INSUFFICIENT_DATA``
    """
    lambdas = sorted(float(lam) for lam in lambda_list)
    ns = sorted(int(n) for n in n_list)
    if not lambdas or not ns:
        raise ValueError("fit_sharpness needs at least one level and one index")
    if ns[0] < 5:
        raise CrossingIndexError(f"Decay indices must be at least 5, got {ns[0]}")
    n_max = ns[-1]

    if bracket is None:
        span = lambdas[-1] - lambdas[0]
        width = tol if tol is not None else max(span, 1e-12) * 0.01
        bracket = estimate_lambda_c(
            p, n_max, trials, seed, threshold=threshold, tol=width,
            bracket=(lambdas[0], lambdas[-1]), threads=threads,
        )

    outcomes = profile_outcomes(p, lambdas, n_max, trials, seed, threads)
    thetas = outcomes.mean(axis=0)

    report = SharpnessReport(
        lambda_c_lo=bracket.lo,
        lambda_c_hi=bracket.hi,
        n_list=ns,
        n_max=n_max,
        trials=trials,
        seed=seed,
    )

    for i, lam in enumerate(lambdas):
        if lam >= bracket.lo:
            continue
        row_thetas = {n: float(thetas[i, n]) for n in ns}
        fit = fit_decay(ns, [row_thetas[n] for n in ns])
        note = None
        if fit is None:
            note = INSUFFICIENT_DATA
            report.notes.append(f"{INSUFFICIENT_DATA}: lambda={lam:g} has fewer than two positive theta_n")
        elif not math.isfinite(fit.slope):
            note = INSUFFICIENT_DATA
            fit = None
        report.subcritical.append(DecayRow(lam, row_thetas, fit, note))

    above = [(lam, float(thetas[i, n_max])) for i, lam in enumerate(lambdas) if lam > bracket.hi]
    report.supercritical_thetas = dict(above)
    if above:
        report.supercritical = fit_linear_growth(
            [lam for lam, _ in above], [th for _, th in above], report.lambda_c_hat
        )
    if report.supercritical is None:
        report.notes.append(f"{INSUFFICIENT_DATA}: fewer than two levels above the bracket")

    logger.info(
        f"Sharpness: {len(report.subcritical)} subcritical rows, "
        f"{len(above)} supercritical levels around [{bracket.lo:.4g}, {bracket.hi:.4g}]"
    )
    return report
