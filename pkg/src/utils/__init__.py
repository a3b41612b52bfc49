"""Utility modules shared by the simulation packages."""

from .config_loader import ConfigLoader, get_config
from .logger import setup_logger, configure_logging, get_logger
from .parallel import run_trials
from .statistics import wilson_interval, binomial_se, combined_se, z_value
from . import errors

__all__ = [
    'ConfigLoader',
    'get_config',
    'setup_logger',
    'configure_logging',
    'get_logger',
    'run_trials',
    'wilson_interval',
    'binomial_se',
    'combined_se',
    'z_value',
    'errors',
]
