"""
Good and bad blocks.

A block is bad at level ``lambda`` when some site of it carries a driver mark
with ``t <= lambda`` (its restricted Poisson process is nonempty). It is good
when some of its sites is populated and every two populated sites of its
3x3 block neighbourhood are joined by a chain of adjacent populated sites
inside the 5x5 block neighbourhood.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd

from ..cox import realize_blocks
from ..environment import chain_connected
from ..lattice import BlockWindow, ValidatedParams
from ..utils import get_logger, run_trials, wilson_interval
from .trials import build_trial, check_trials, log_progress

logger = get_logger(__name__)

ORIGIN = (0, 0)


@dataclass(frozen=True)
class LevelDiagnostics:
    lam: float
    bad_hits: int
    p_bad: float
    p_bad_ci: Tuple[float, float]
    p_bad_exact: float
    good_hits: int
    p_good: float
    p_good_ci: Tuple[float, float]


@dataclass
class SiteDiagnostics:
    """
    Attributes:
        levels: One row per level, in increasing order
        trials: Number of trials
        seed: Master seed
        monotonicity_violations: Trials in which the block is good at one
            level and not good at the next larger level
    """

    levels: List[LevelDiagnostics]
    trials: int
    seed: int
    monotonicity_violations: int
    notes: List[str] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([
            {
                "lambda": row.lam,
                "bad_hits": row.bad_hits,
                "p_bad": row.p_bad,
                "p_bad_ci_lo": row.p_bad_ci[0],
                "p_bad_ci_hi": row.p_bad_ci[1],
                "p_bad_exact": row.p_bad_exact,
                "good_hits": row.good_hits,
                "p_good": row.p_good,
                "p_good_ci_lo": row.p_good_ci[0],
                "p_good_ci_hi": row.p_good_ci[1],
            }
            for row in self.levels
        ])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "monotonicity_violations": self.monotonicity_violations,
            "levels": self.to_frame().to_dict(orient="records"),
            "notes": list(self.notes),
        }


def block_is_good(populated: np.ndarray, p: ValidatedParams) -> bool:
    """
    Goodness of the central block of a 5x5 block neighbourhood.

    Args:
        populated: ``(5 / b, 5 / b)`` boolean grid of populated sites, with the
            central block at offset ``2 / b``
        p: Validated parameters
    """
    n = p.inv_b
    core = populated[2 * n:3 * n, 2 * n:3 * n]
    if not core.any():
        return False
    plus = np.zeros_like(populated)
    plus[n:4 * n, n:4 * n] = populated[n:4 * n, n:4 * n]
    return chain_connected(populated, np.argwhere(plus))


def site_diagnostics(
    p: ValidatedParams, lambdas: Sequence[float], trials: int, seed: int, threads: int = 1
) -> SiteDiagnostics:
    """
    Frequencies of bad and good origin blocks on a coupled level grid.

    The bad frequency is compared with its closed form
    ``1 - exp(-lambda rho b^{-d})``. Goodness is not monotone in the level in
    general, so violations are counted rather than asserted.
    """
    check_trials(trials)
    lams = sorted(float(lam) for lam in lambdas)
    window = BlockWindow.around(ORIGIN, 2)
    lambda_max = lams[-1] if lams else 0.0
    (x0, y0), (x1, y1) = window.site_range(p)

    def one(t: int) -> np.ndarray:
        inst = build_trial(p, window, lambda_max, seed, t)
        marks = inst.driver.marks(ORIGIN)
        out = np.zeros((len(lams), 2), dtype=bool)
        for i, lam in enumerate(lams):
            out[i, 0] = bool(np.any(marks.t <= lam))
            config = realize_blocks(inst.driver, inst.env, lam, list(window))
            populated = np.zeros((x1 - x0, y1 - y0), dtype=bool)
            if config.n_points:
                populated[config.sites[:, 0] - x0, config.sites[:, 1] - y0] = True
            out[i, 1] = block_is_good(populated, p)
        log_progress("good/bad", t, trials)
        return out

    results = np.stack(run_trials(one, range(trials), threads)) if lams else np.zeros((trials, 0, 2), dtype=bool)
    bad, good = results[:, :, 0], results[:, :, 1]

    levels: List[LevelDiagnostics] = []
    for i, lam in enumerate(lams):
        b_hits, g_hits = int(bad[:, i].sum()), int(good[:, i].sum())
        levels.append(
            LevelDiagnostics(
                lam=lam,
                bad_hits=b_hits,
                p_bad=b_hits / trials,
                p_bad_ci=wilson_interval(b_hits, trials),
                p_bad_exact=1.0 - math.exp(-p.lambda_star(lam)),
                good_hits=g_hits,
                p_good=g_hits / trials,
                p_good_ci=wilson_interval(g_hits, trials),
            )
        )
    violations = int(np.count_nonzero(good[:, :-1] & ~good[:, 1:])) if len(lams) > 1 else 0
    report = SiteDiagnostics(levels, trials, seed, violations)
    if violations:
        report.notes.append(f"goodness decreased with the level in {violations} trial steps")
        logger.info(f"Good-block monotonicity violated in {violations} trial steps")
    return report
