"""
Run configuration.

A run is described by one flat mapping of model and command parameters.
Values are resolved in this order, later sources winning: the ``model`` and
``run`` sections of ``config.yaml``, a named preset, the run file, and
``--key value`` overrides from the command line.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..lattice import ValidatedParams, make_params
from ..utils import ConfigLoader, get_config, get_logger
from ..utils.errors import ConfigError

logger = get_logger(__name__)

CONFIG_VERSION = 1

# Keys that change how a run executes but not what it computes
EXECUTION_KEYS = ("threads", "output_dir")


class RunConfig(BaseModel):
    """All parameters of one command run; unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    config_version: int = CONFIG_VERSION

    # model
    d: int = 2
    M: float = 5.0
    b: str = "1/21"
    lambda_: float = Field(default=0.0, alias="lambda")
    lambda_del: float = 1.0
    L: float = 5.0
    rho: float = 1.0
    w0: float = 0.0
    eta: float = 0.1
    variant: str = "DEL_GRID"
    ball_radius: float = 0.5

    # commands
    n: int = 10
    n_list: List[int] = Field(default_factory=list)
    lambda_list: List[float] = Field(default_factory=list)
    trials: int = 100
    seed: int = 0
    threads: int = 1
    q0: float = 0.9999
    threshold: float = 0.5
    tol: float = 0.01
    h: Optional[float] = None
    lambda_lo: float = 0.0
    lambda_hi: float = 1.0
    target: List[int] = Field(default_factory=lambda: [0, 0])
    blocks: Optional[List[List[int]]] = None
    piv_samples: int = 20
    env_blocks: int = 3
    n_blocks: int = 200
    n_sites: int = 50
    n_connect_blocks: int = 10
    output_dir: Optional[str] = None
    table: Optional[str] = None
    plot_kind: str = "theta_vs_lambda"
    out: Optional[str] = None

    @field_validator("b", mode="before")
    @classmethod
    def _b_as_text(cls, value: Any) -> str:
        if isinstance(value, bool):
            raise ValueError("b must be a number")
        return str(value).strip()

    @field_validator("config_version")
    @classmethod
    def _known_version(cls, value: int) -> int:
        if value != CONFIG_VERSION:
            raise ValueError(f"unsupported config_version {value} (expected {CONFIG_VERSION})")
        return value

    @field_validator("trials", "threads", "piv_samples")
    @classmethod
    def _positive_count(cls, value: int) -> int:
        if value < 0:
            raise ValueError("must be nonnegative")
        return value

    def model_params(self, lam: Optional[float] = None) -> ValidatedParams:
        """
        Validated model parameters of this run.

        Raises:
            ParameterValidationError: Listing every violated rule
        """
        return make_params(
            d=self.d,
            M=self.M,
            b=self.b,
            lambda_=self.lambda_ if lam is None else lam,
            lambda_del=self.lambda_del,
            L=self.L,
            rho=self.rho,
            w0=self.w0,
            eta=self.eta,
            variant=self.variant,
            ball_radius=self.ball_radius,
        )

    def resolved(self) -> Dict[str, Any]:
        """The full configuration as a plain mapping (``lambda`` spelled out)."""
        return self.model_dump(by_alias=True)

    def artifact_config(self) -> Dict[str, Any]:
        """The configuration echoed into artifacts: everything but the execution keys."""
        return {k: v for k, v in self.resolved().items() if k not in EXECUTION_KEYS}

    def digest(self) -> str:
        return config_hash(self.artifact_config())


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_hash(resolved: Mapping[str, Any]) -> str:
    """SHA-256 of the canonical JSON form of a resolved configuration."""
    return hashlib.sha256(canonical_json(dict(resolved)).encode("utf-8")).hexdigest()


def parse_override(value: Any) -> Any:
    """Interpret a command-line override with YAML scalar rules (``"0.5"`` -> 0.5)."""
    if not isinstance(value, str):
        return value
    try:
        return yaml.safe_load(value)
    except yaml.YAMLError:
        return value


def load_run_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a flat run file (``key: value`` lines, ``#`` comments).

    Raises:
        ConfigError: The file is missing or is not a flat mapping
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Run file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"Run file {path} does not parse: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Run file {path} must be a mapping of key: value lines")
    for key, value in data.items():
        if isinstance(value, dict):
            raise ConfigError(f"Run file key '{key}' must be a scalar or a list", key=str(key))
    return data


def _validation_to_config_error(e: ValidationError) -> ConfigError:
    first = e.errors()[0]
    key = ".".join(str(part) for part in first.get("loc", ())) or None
    if first.get("type") == "extra_forbidden":
        return ConfigError(f"Unknown configuration key '{key}'", key=key)
    return ConfigError(f"Invalid value for '{key}': {first.get('msg')}", key=key)


def resolve_run_config(
    config_path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    preset: Optional[str] = None,
    loader: Optional[ConfigLoader] = None,
) -> RunConfig:
    """
    Merge defaults, preset, run file and overrides into a RunConfig.

    Args:
        config_path: Run file
        overrides: ``--key value`` pairs (strings are parsed as YAML scalars)
        preset: Name of a preset in ``presets.yaml``
        loader: Configuration loader (defaults to the global one)

    Returns:
        RunConfig

    Raises:
        ConfigError: Unknown key, unknown preset or invalid value
    """
    loader = loader or get_config()
    merged: Dict[str, Any] = {}
    merged.update(loader.get_model_config())
    merged.update(loader.get_run_config())
    if preset:
        values = loader.get_preset(preset)
        if values is None:
            raise ConfigError(f"Unknown preset '{preset}'", key="preset")
        merged.update(values)
    if config_path:
        merged.update(load_run_file(config_path))
    for key, value in (overrides or {}).items():
        key = key.replace("-", "_")
        merged["lambda" if key == "lambda_" else key] = parse_override(value)
    if merged.get("output_dir") is None:
        merged["output_dir"] = loader.get_output_dir()

    try:
        cfg = RunConfig(**merged)
    except ValidationError as e:
        raise _validation_to_config_error(e) from e
    logger.debug(f"Resolved run config {cfg.digest()[:12]}")
    return cfg
