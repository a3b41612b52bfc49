"""Command-line front end: run configuration, commands, run log and plots."""

from .config import RunConfig, EXECUTION_KEYS, canonical_json, config_hash, load_run_file, parse_override, resolve_run_config
from .records import RUN_LOG_NAME, RunRecord, append_record, read_records
from .plots import PLOT_KINDS, emit_plot
from .commands import COMMANDS, EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, execute

__all__ = [
    'RunConfig',
    'EXECUTION_KEYS',
    'canonical_json',
    'config_hash',
    'load_run_file',
    'parse_override',
    'resolve_run_config',
    'RUN_LOG_NAME',
    'RunRecord',
    'append_record',
    'read_records',
    'PLOT_KINDS',
    'emit_plot',
    'COMMANDS',
    'EXIT_OK',
    'EXIT_CONFIG',
    'EXIT_RUNTIME',
    'execute',
]
