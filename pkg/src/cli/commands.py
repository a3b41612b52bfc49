"""
Command dispatch.

``execute`` resolves the run configuration, runs one command, writes its
artifacts into the output directory and appends a record to the run log.
Every artifact starts with ``# command=``, ``# config_hash=`` and
``# config=`` header lines, so a file alone is enough to rerun it.
"""

from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Union

from pydantic import ValidationError

from .. import __version__
from ..analysis import (
    estimate_influences,
    estimate_lambda_c,
    estimate_revealment,
    estimate_theta,
    fit_sharpness,
    site_diagnostics,
    sweep_theta,
    verify_inequality,
    write_report,
    write_revealment_table,
    write_table,
    write_theta_table,
)
from ..analysis.inequalities import InequalityKind
from ..environment import build_environment, check_conditions
from ..lattice import BlockWindow
from ..utils import get_config, get_logger
from ..utils.errors import ConfigError, ParameterValidationError
from .config import RunConfig, resolve_run_config
from .plots import PLOT_KINDS, emit_plot
from .records import RunRecord, append_record, utc_now

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

COMMANDS = (
    "check-env",
    "theta",
    "sweep",
    "lambda-c",
    "sharpness",
    "influence",
    "reveal",
    "verify",
    "good-bad",
    "plot",
)


class CommandContext:
    """Resolved configuration plus the bookkeeping of one command run."""

    def __init__(self, command: str, cfg: RunConfig, argument: Optional[str] = None):
        self.command = command
        self.cfg = cfg
        self.argument = argument
        self.output_dir = Path(cfg.output_dir or get_config().get_output_dir())
        self.outputs: List[Path] = []

    @property
    def label(self) -> str:
        return f"{self.command} {self.argument}" if self.argument else self.command

    def header(self) -> Dict[str, Any]:
        return {
            "command": self.label,
            "config_hash": self.cfg.digest(),
            "config": self.cfg.artifact_config(),
        }

    def path(self, name: str) -> Path:
        return self.output_dir / name

    def wrote(self, path: Path) -> Path:
        self.outputs.append(path)
        logger.info(f"Wrote {path}")
        return path


def _check_env(ctx: CommandContext) -> None:
    cfg = ctx.cfg
    p = cfg.model_params()
    env = build_environment(p, BlockWindow.centered(cfg.env_blocks), cfg.seed)
    report = check_conditions(
        env,
        eta=cfg.eta,
        q0=cfg.q0,
        n_blocks=cfg.n_blocks,
        seed=cfg.seed,
        n_sites=cfg.n_sites,
        n_connect_blocks=cfg.n_connect_blocks,
    )
    ctx.wrote(write_report(report, ctx.path("check_env.yaml"), ctx.header()))


def _theta(ctx: CommandContext) -> None:
    cfg = ctx.cfg
    p = cfg.model_params()
    est = estimate_theta(p, cfg.lambda_, cfg.n, cfg.trials, cfg.seed, cfg.threads)
    ctx.wrote(write_theta_table([est], ctx.path("theta.csv"), ctx.header()))


def _sweep(ctx: CommandContext) -> None:
    cfg = ctx.cfg
    if not cfg.lambda_list:
        raise ConfigError("sweep needs a nonempty lambda_list", key="lambda_list")
    p = cfg.model_params()
    rows = []
    for n in cfg.n_list or [cfg.n]:
        rows.extend(sweep_theta(p, cfg.lambda_list, n, cfg.trials, cfg.seed, cfg.threads))
    ctx.wrote(write_theta_table(rows, ctx.path("sweep.csv"), ctx.header()))


def _lambda_c(ctx: CommandContext) -> None:
    cfg = ctx.cfg
    p = cfg.model_params()
    bracket = estimate_lambda_c(
        p, cfg.n, cfg.trials, cfg.seed,
        threshold=cfg.threshold, tol=cfg.tol,
        bracket=(cfg.lambda_lo, cfg.lambda_hi), threads=cfg.threads,
    )
    ctx.wrote(write_report(bracket, ctx.path("lambda_c.yaml"), ctx.header()))


def _sharpness(ctx: CommandContext) -> None:
    cfg = ctx.cfg
    if not cfg.lambda_list or not cfg.n_list:
        raise ConfigError("sharpness needs lambda_list and n_list", key="lambda_list" if not cfg.lambda_list else "n_list")
    p = cfg.model_params()
    report = fit_sharpness(
        p, cfg.lambda_list, cfg.n_list, cfg.trials, cfg.seed,
        threads=cfg.threads, threshold=cfg.threshold, tol=cfg.tol,
    )
    ctx.wrote(write_report(report, ctx.path("sharpness.yaml"), ctx.header()))


def _influence(ctx: CommandContext) -> None:
    cfg = ctx.cfg
    if len(cfg.target) != 2:
        raise ConfigError("target must be a block id [x, y]", key="target")
    p = cfg.model_params()
    est = estimate_influences(
        p, cfg.lambda_, cfg.n, cfg.target, cfg.trials, cfg.seed,
        piv_samples=cfg.piv_samples, threads=cfg.threads,
    )
    ctx.wrote(write_report(est, ctx.path("influence.yaml"), ctx.header()))


def _reveal(ctx: CommandContext) -> None:
    cfg = ctx.cfg
    p = cfg.model_params()
    est = estimate_revealment(p, cfg.lambda_, cfg.n, cfg.trials, cfg.seed, cfg.threads)
    ctx.wrote(write_revealment_table(est, ctx.path("reveal.csv"), ctx.header()))
    ctx.wrote(write_report(est, ctx.path("reveal.yaml"), ctx.header()))


def _verify(ctx: CommandContext) -> None:
    cfg = ctx.cfg
    if not ctx.argument:
        raise ConfigError(
            f"verify needs a kind: {', '.join(k.value for k in InequalityKind)}", key="kind"
        )
    try:
        kind = InequalityKind(ctx.argument.upper().replace("-", "_"))
    except ValueError as e:
        raise ConfigError(f"Unknown inequality kind '{ctx.argument}'", key="kind") from e
    ctx.argument = kind.value
    p = cfg.model_params()
    report = verify_inequality(
        kind, p, cfg.lambda_, cfg.n, cfg.trials, cfg.seed,
        threads=cfg.threads, h=cfg.h, blocks=cfg.blocks, piv_samples=cfg.piv_samples,
    )
    ctx.wrote(write_report(report, ctx.path(f"verify_{kind.value.lower()}.yaml"), ctx.header()))


def _good_bad(ctx: CommandContext) -> None:
    cfg = ctx.cfg
    p = cfg.model_params()
    lambdas = cfg.lambda_list or [cfg.lambda_]
    report = site_diagnostics(p, lambdas, cfg.trials, cfg.seed, cfg.threads)
    ctx.wrote(write_table(report.to_frame(), ctx.path("good_bad.csv"), ctx.header()))
    ctx.wrote(write_report(report, ctx.path("good_bad.yaml"), ctx.header()))


def _plot(ctx: CommandContext) -> None:
    cfg = ctx.cfg
    kind = ctx.argument or cfg.plot_kind
    if kind not in PLOT_KINDS:
        raise ConfigError(f"Unknown plot kind '{kind}'; expected one of {', '.join(PLOT_KINDS)}", key="plot_kind")
    if not cfg.table:
        raise ConfigError("plot needs the table to render", key="table")
    out = Path(cfg.out) if cfg.out else ctx.path(f"{kind}.svg")
    ctx.wrote(emit_plot(cfg.table, kind, out))


HANDLERS: Dict[str, Callable[[CommandContext], None]] = {
    "check-env": _check_env,
    "theta": _theta,
    "sweep": _sweep,
    "lambda-c": _lambda_c,
    "sharpness": _sharpness,
    "influence": _influence,
    "reveal": _reveal,
    "verify": _verify,
    "good-bad": _good_bad,
    "plot": _plot,
}


def execute(
    command: str,
    config_path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    preset: Optional[str] = None,
    argument: Optional[str] = None,
) -> int:
    """
    Run one command.

    Args:
        command: One of ``COMMANDS``
        config_path: Flat run file
        overrides: ``--key value`` pairs; ``threads`` is one of them
        preset: Named preset from ``presets.yaml``
        argument: Inequality kind for ``verify``, plot kind for ``plot``

    Returns:
        Exit code: 0 on success, 1 for configuration and parameter errors,
        2 for runtime errors
    """
    started = utc_now()
    if command not in HANDLERS:
        logger.error(f"Unknown command '{command}'; expected one of {', '.join(COMMANDS)}")
        return EXIT_CONFIG

    try:
        cfg = resolve_run_config(config_path, overrides, preset)
        ctx = CommandContext(command, cfg, argument)
    except (ConfigError, ValidationError) as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG

    status = EXIT_OK
    try:
        logger.info(f"Running '{ctx.label}' (config {cfg.digest()[:12]}, seed {cfg.seed}, threads {cfg.threads})")
        HANDLERS[command](ctx)
    except (ConfigError, ParameterValidationError, ValidationError) as e:
        logger.error(f"Configuration error: {e}")
        status = EXIT_CONFIG
    except Exception as e:
        logger.error(f"'{ctx.label}' failed: {e}", exc_info=True)
        status = EXIT_RUNTIME

    record = RunRecord(
        config_hash=cfg.digest(),
        command=ctx.label,
        started=started,
        finished=utc_now(),
        seed=cfg.seed,
        outputs=[_relative(path, ctx.output_dir) for path in ctx.outputs],
        version=__version__,
        config=cfg.resolved(),
        status=status,
    )
    try:
        append_record(record, ctx.output_dir)
    except OSError as e:
        logger.error(f"Could not append to the run log: {e}")
        return EXIT_RUNTIME if status == EXIT_OK else status
    return status


def _relative(path: Path, root: Path) -> str:
    try:
        return str(path.relative_to(root))
    except ValueError:
        return str(path)
