"""
Per-trial randomness shared by the estimators.

Trial ``t`` of a run with master seed ``s`` always uses the environment of
stream trial ``t`` and the driver of stream trial ``t``, so estimators that
share a seed see the same realizations.
"""

from dataclasses import dataclass
from typing import Optional

from ..cox import Driver, sample_driver
from ..environment import Environment, build_environment
from ..lattice import BlockWindow, ValidatedParams
from ..utils import get_config, get_logger

logger = get_logger(__name__)


@dataclass
class TrialInstance:
    trial: int
    env: Environment
    driver: Driver


def build_trial(
    p: ValidatedParams, window: BlockWindow, lambda_max: float, seed: int, trial: int
) -> TrialInstance:
    """
    Environment and driver of one trial on a block window.

    Args:
        p: Validated parameters
        window: Blocks that are realized
        lambda_max: Largest level evaluated on this trial
        seed: Master seed
        trial: Trial index

    Returns:
        TrialInstance
    """
    env = build_environment(p, window, seed, trial=trial)
    driver = sample_driver(p.with_lambda(lambda_max), window, lambda_max, seed, trial=trial)
    return TrialInstance(trial, env, driver)


def check_trials(trials: int) -> None:
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")


def log_progress(label: str, trial: int, total: int, every: Optional[int] = None) -> None:
    """Log at INFO every ``simulation.progress_every`` trials."""
    if every is None:
        every = int(get_config().get_simulation_config().get("progress_every", 100))
    if every > 0 and (trial + 1) % every == 0:
        logger.info(f"{label}: {trial + 1}/{total} trials")
