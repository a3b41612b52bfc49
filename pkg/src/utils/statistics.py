"""
Binomial confidence intervals and standard errors.
"""

import math
from typing import Tuple

from scipy.stats import norm

CONFIDENCE = 0.95


def z_value(confidence: float = CONFIDENCE) -> float:
    """Two-sided normal quantile for a confidence level."""
    return float(norm.ppf(0.5 + confidence / 2.0))


def wilson_interval(hits: int, trials: int, confidence: float = CONFIDENCE) -> Tuple[float, float]:
    """
    Wilson score interval for a binomial proportion.

    Args:
        hits: Number of successes
        trials: Number of trials (0 gives the trivial interval)
        confidence: Confidence level

    Returns:
        Tuple of (lower, upper)
    """
    if trials <= 0:
        return 0.0, 1.0
    z = z_value(confidence)
    p = hits / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denom
    lo = 0.0 if hits == 0 else max(0.0, center - half)
    hi = 1.0 if hits == trials else min(1.0, center + half)
    return lo, hi


def binomial_se(p: float, trials: int) -> float:
    if trials <= 0:
        return 0.0
    return math.sqrt(max(p * (1.0 - p), 0.0) / trials)


def combined_se(*ses: float) -> float:
    """Standard error of a sum or difference of independent estimates."""
    return math.sqrt(sum(s * s for s in ses))
