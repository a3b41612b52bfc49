"""
Empirical checks of the inequalities behind the sharpness argument.

Every check estimates both sides by Monte Carlo and compares them at three
combined standard errors. Kinds with an unknown constant report the constant
implied by the estimates instead of adjudicating.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

from ..lattice import BlockId, BlockWindow, ValidatedParams
from ..percolation import MIN_EXPLORATION_INDEX, required_blocks
from ..utils import binomial_se, combined_se, get_logger
from ..utils.errors import ParameterValidationError
from .estimators import coupled_outcomes, estimate_theta, estimate_theta_profile, profile_sum
from .influence import (
    InfluenceEstimate,
    estimate_block_influences,
    influence_blocks,
    revealment_counts,
    russo_pivotal_sum,
    target_window,
)

logger = get_logger(__name__)

SIGMAS = 3.0
DIVISION_DEGENERATE = "DIVISION_DEGENERATE"


class InequalityKind(str, Enum):
    OSSS = "OSSS"
    EFRON_STEIN = "EFRON_STEIN"
    RUSSO = "RUSSO"
    PIV_LEMMA = "PIV_LEMMA"
    INF_LEMMA = "INF_LEMMA"
    DIFFERENTIAL = "DIFFERENTIAL"


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    REPORTED = "REPORTED"


@dataclass
class InequalityReport:
    """
    Both sides of one inequality with their standard errors.

    ``slack = rhs - lhs``. For inequalities the verdict is PASS when
    ``slack >= -3 * slack_se``; for the RUSSO equality when
    ``|slack| <= 3 * slack_se``.
    """

    kind: InequalityKind
    lam: float
    n: int
    trials: int
    seed: int
    lhs: float
    lhs_se: float
    rhs: float
    rhs_se: float
    verdict: Verdict
    constant: Optional[float] = None
    constant_name: Optional[str] = None
    constant_reference: Optional[float] = None
    details: List[Dict[str, Any]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def slack_se(self) -> float:
        return combined_se(self.lhs_se, self.rhs_se)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "lambda": self.lam,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "lhs": self.lhs,
            "lhs_se": self.lhs_se,
            "rhs": self.rhs,
            "rhs_se": self.rhs_se,
            "slack": self.slack,
            "slack_se": self.slack_se,
            "verdict": self.verdict.value,
            "constant": self.constant,
            "constant_name": self.constant_name,
            "constant_reference": self.constant_reference,
            "details": self.details,
            "notes": list(self.notes),
        }


def inequality_holds(lhs: float, lhs_se: float, rhs: float, rhs_se: float) -> bool:
    return rhs - lhs >= -SIGMAS * combined_se(lhs_se, rhs_se)


def equality_holds(lhs: float, lhs_se: float, rhs: float, rhs_se: float) -> bool:
    return abs(rhs - lhs) <= SIGMAS * combined_se(lhs_se, rhs_se)


def probe_blocks(p: ValidatedParams, n: int) -> List[BlockId]:
    """Blocks ``(k, 0)`` from the origin to just outside the crossing window."""
    return [(k, 0) for k in range(required_blocks(p, n) + 1)]


def _centered_difference(p: ValidatedParams, lam: float, h: float, n: int, trials: int, seed: int, threads: int):
    if not h > 0 or lam - h < 0:
        raise ParameterValidationError([("RANGE", f"difference step h={h} needs 0 < h <= lambda={lam}")])
    outcomes = coupled_outcomes(p, [lam - h, lam + h], n, trials, seed, threads)
    frac = float((outcomes[:, 1] & ~outcomes[:, 0]).sum()) / trials
    return frac / (2.0 * h), binomial_se(frac, trials) / (2.0 * h)


def _osss(p, lam, n, trials, seed, threads, blocks, report: InequalityReport) -> None:
    est = estimate_theta(p, lam, n, trials, seed, threads)
    report.lhs = est.theta * (1.0 - est.theta)
    report.lhs_se = abs(1.0 - 2.0 * est.theta) * est.se

    targets = list(blocks) if blocks is not None else influence_blocks(p, n)
    infl = estimate_block_influences(p, lam, n, targets, trials, seed, piv_samples=0, threads=threads)

    if n - 3 >= MIN_EXPLORATION_INDEX:
        counts, _, _ = revealment_counts(p, lam, n, trials, seed, threads)
        delta = {z: counts.get(z, 0) / trials for z in targets}
    else:
        delta = {z: 1.0 for z in targets}
        report.notes.append("n too small for the shell exploration; every block counted as revealed")

    rhs = 0.0
    var = 0.0
    for z in targets:
        d, inf = delta[z], infl[z]
        rhs += 0.5 * d * inf.inf_joint
        d_se = binomial_se(d, trials)
        var += (0.5 * d * inf.inf_joint_se) ** 2 + (0.5 * inf.inf_joint * d_se) ** 2
        if inf.inf_joint > 0:
            report.details.append({"block": list(z), "delta": d, "inf_joint": inf.inf_joint})
    report.rhs = rhs
    report.rhs_se = math.sqrt(var)
    report.verdict = Verdict.PASS if inequality_holds(report.lhs, report.lhs_se, rhs, report.rhs_se) else Verdict.FAIL


def _efron_stein(p, lam, n, trials, seed, threads, blocks, report: InequalityReport) -> None:
    targets = list(blocks) if blocks is not None else probe_blocks(p, n)
    infl = estimate_block_influences(p, lam, n, targets, trials, seed, piv_samples=0, threads=threads)
    worst: Optional[InfluenceEstimate] = None
    worst_margin = math.inf
    all_pass = True
    for z in targets:
        inf = infl[z]
        rhs = inf.inf_x + inf.inf_y
        rhs_se = combined_se(inf.inf_x_se, inf.inf_y_se)
        ok = inequality_holds(inf.inf_joint, inf.inf_joint_se, rhs, rhs_se)
        all_pass &= ok
        margin = rhs - inf.inf_joint + SIGMAS * combined_se(inf.inf_joint_se, rhs_se)
        if margin < worst_margin:
            worst, worst_margin = inf, margin
        report.details.append({
            "block": list(z), "inf_joint": inf.inf_joint, "inf_x": inf.inf_x, "inf_y": inf.inf_y, "pass": ok,
        })
    if worst is not None:
        report.lhs, report.lhs_se = worst.inf_joint, worst.inf_joint_se
        report.rhs = worst.inf_x + worst.inf_y
        report.rhs_se = combined_se(worst.inf_x_se, worst.inf_y_se)
        report.notes.append(f"sides of the tightest block {list(worst.target)}")
    report.verdict = Verdict.PASS if all_pass else Verdict.FAIL


def _russo(p, lam, n, trials, seed, threads, h, piv_samples, report: InequalityReport) -> None:
    report.lhs, report.lhs_se = _centered_difference(p, lam, h, n, trials, seed, threads)
    report.rhs, report.rhs_se = russo_pivotal_sum(p, lam, n, trials, seed, piv_samples, threads)
    report.details.append({"h": h})
    ok = equality_holds(report.lhs, report.lhs_se, report.rhs, report.rhs_se)
    report.verdict = Verdict.PASS if ok else Verdict.FAIL


def _piv_lemma(p, lam, n, trials, seed, threads, blocks, piv_samples, report: InequalityReport) -> None:
    reference = 2.0 * math.exp(p.lambda_star(lam))
    report.constant_name = "c_Piv"
    report.constant_reference = reference
    targets = list(blocks) if blocks is not None else probe_blocks(p, n)
    infl = estimate_block_influences(p, lam, n, targets, trials, seed, piv_samples, threads)

    implied: List[float] = []
    all_pass = True
    worst_margin = math.inf
    for z in targets:
        inf = infl[z]
        denom = lam * inf.piv_integral
        c = inf.inf_x / denom if denom > 0 else None
        if c is None:
            if inf.inf_x > 0:
                report.notes.append(f"{DIVISION_DEGENERATE}: block {list(z)} has no pivotal insertion")
        else:
            implied.append(c)
        rhs, rhs_se = reference * denom, reference * lam * inf.piv_integral_se
        ok = inequality_holds(inf.inf_x, inf.inf_x_se, rhs, rhs_se)
        all_pass &= ok
        margin = rhs - inf.inf_x + SIGMAS * combined_se(inf.inf_x_se, rhs_se)
        if margin < worst_margin:
            worst_margin = margin
            report.lhs, report.lhs_se, report.rhs, report.rhs_se = inf.inf_x, inf.inf_x_se, rhs, rhs_se
        report.details.append({
            "block": list(z), "inf_x": inf.inf_x, "piv_integral": inf.piv_integral, "c_piv": c, "pass": ok,
        })
    report.constant = max(implied) if implied else None
    report.verdict = Verdict.PASS if all_pass else Verdict.FAIL


def _inf_lemma(p, lam, n, trials, seed, threads, blocks, report: InequalityReport) -> None:
    report.constant_name = "c_Inf"
    raw = list(blocks) if blocks is not None else [(max(n // 2, 1), 0)]
    centers = [(int(z[0]), int(z[1])) for z in raw]
    allowed = target_window(p, n)
    needed: List[BlockId] = []
    for z in centers:
        for w in BlockWindow.around(z, 2):
            if (w == z or allowed.contains(w)) and w not in needed:
                needed.append(w)
    infl = estimate_block_influences(p, lam, n, needed, trials, seed, piv_samples=0, threads=threads)

    implied: List[float] = []
    for zz in centers:
        lhs, lhs_se = infl[zz].inf_y, infl[zz].inf_y_se
        ring = [infl[w] for w in BlockWindow.around(zz, 2) if w in infl]
        rhs = sum(e.inf_x for e in ring)
        rhs_se = combined_se(*(e.inf_x_se for e in ring))
        c = lhs / rhs if rhs > 0 else None
        if c is None and lhs > 0:
            report.notes.append(f"{DIVISION_DEGENERATE}: block {list(zz)} has zero neighbouring driver influence")
        if c is not None:
            implied.append(c)
        report.lhs, report.lhs_se, report.rhs, report.rhs_se = lhs, lhs_se, rhs, rhs_se
        report.details.append({"block": list(zz), "inf_y": lhs, "sum_inf_x": rhs, "c_inf": c})
    report.constant = max(implied) if implied else None
    report.verdict = Verdict.REPORTED


def _differential(p, lam, n, trials, seed, threads, h, report: InequalityReport) -> None:
    report.constant_name = "c_Diff"
    report.lhs, report.lhs_se = _centered_difference(p, lam, h, n, trials, seed, threads)
    profile = estimate_theta_profile(p, lam, n, trials, seed, threads)
    total, total_se = profile_sum(profile)
    theta = profile[n].theta
    factor = n / total * theta * (1.0 - theta)
    report.rhs = factor
    report.rhs_se = abs(1.0 - 2.0 * theta) * profile[n].se * n / total + factor * total_se / total
    if factor > 0:
        report.constant = report.lhs / factor
    else:
        report.notes.append(f"{DIVISION_DEGENERATE}: theta_n(1 - theta_n) is zero")
    report.details.append({"h": h, "sum_theta": total, "theta_n": theta})
    report.verdict = Verdict.REPORTED


def verify_inequality(
    kind,
    p: ValidatedParams,
    lam: float,
    n: int,
    trials: int,
    seed: int,
    threads: int = 1,
    h: Optional[float] = None,
    blocks: Optional[Sequence[BlockId]] = None,
    piv_samples: int = 20,
) -> InequalityReport:
    """
    Estimate both sides of one inequality and compare them.

    Args:
        kind: InequalityKind or its name
        p: Validated parameters
        lam: Level
        n: Crossing index (at least 5)
        trials: Number of trials
        seed: Master seed
        threads: Worker threads
        h: Difference step of RUSSO and DIFFERENTIAL (default ``0.1 * lam``)
        blocks: Blocks to check (defaults depend on the kind)
        piv_samples: Inserted marks per block (or per trial for RUSSO)

    Returns:
        InequalityReport; degenerate denominators are noted, never raised

    Raises:
        ParameterValidationError: ``h`` outside ``(0, lam]``
    """
    kind = InequalityKind(str(getattr(kind, "value", kind)).upper())
    report = InequalityReport(
        kind=kind, lam=float(lam), n=n, trials=trials, seed=seed,
        lhs=0.0, lhs_se=0.0, rhs=0.0, rhs_se=0.0, verdict=Verdict.REPORTED,
    )
    step = 0.1 * lam if h is None else float(h)
    if blocks is not None:
        blocks = [(int(z[0]), int(z[1])) for z in blocks]

    if kind is InequalityKind.OSSS:
        _osss(p, lam, n, trials, seed, threads, blocks, report)
    elif kind is InequalityKind.EFRON_STEIN:
        _efron_stein(p, lam, n, trials, seed, threads, blocks, report)
    elif kind is InequalityKind.RUSSO:
        _russo(p, lam, n, trials, seed, threads, step, max(piv_samples, 1), report)
    elif kind is InequalityKind.PIV_LEMMA:
        _piv_lemma(p, lam, n, trials, seed, threads, blocks, piv_samples, report)
    elif kind is InequalityKind.INF_LEMMA:
        _inf_lemma(p, lam, n, trials, seed, threads, blocks, report)
    else:
        _differential(p, lam, n, trials, seed, threads, step, report)

    logger.info(
        f"{kind.value} at lambda={lam:g}, n={n}: lhs={report.lhs:.4g}±{report.lhs_se:.2g}, "
        f"rhs={report.rhs:.4g}±{report.rhs_se:.2g} -> {report.verdict.value}"
    )
    return report
