"""
Result files: comma-separated tables with ``# key=value`` header lines and
YAML report documents.
"""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import yaml

from ..utils import get_logger
from ..utils.errors import BadHeaderError
from .estimators import ThetaEstimate
from .influence import RevealmentEstimate

logger = get_logger(__name__)

THETA_COLUMNS = ["lambda", "n", "trials", "hits", "theta", "ci_lo", "ci_hi", "seed"]
REVEALMENT_COLUMNS = ["zx", "zy", "delta", "se", "bound"]
FLOAT_FORMAT = "%.10g"

PathLike = Union[str, Path]


def plain(value: Any) -> Any:
    """Convert numpy scalars, tuples and enums into YAML-safe builtins."""
    if isinstance(value, Enum):
        return plain(value.value)
    if isinstance(value, Mapping):
        return {plain(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [plain(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def _header_lines(header: Optional[Mapping[str, Any]]) -> List[str]:
    lines = []
    for key, value in (header or {}).items():
        value = plain(value)
        if isinstance(value, str):
            text = value
        elif value is None or isinstance(value, (bool, int, float)):
            text = repr(value)
        else:
            text = yaml.safe_dump(value, default_flow_style=True, width=1_000_000).strip()
        lines.append(f"# {key}={text}\n")
    return lines


def write_table(frame: pd.DataFrame, path: PathLike, header: Optional[Mapping[str, Any]] = None) -> Path:
    """Write a table as CSV preceded by ``# key=value`` lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.writelines(_header_lines(header))
        frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return path


def read_table(path: PathLike, expected: Optional[Sequence[str]] = None) -> Tuple[Dict[str, str], pd.DataFrame]:
    """
    Read a table written by ``write_table``.

    Args:
        path: CSV file
        expected: Required column names, in order

    Returns:
        Tuple of (header mapping, table)

    Raises:
        BadHeaderError: Missing column row or unexpected columns
    """
    path = Path(path)
    header: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as f:
        lines = f.readlines()
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            body_start = i
            break
        key, _, value = line[1:].strip().partition("=")
        header[key.strip()] = value.strip()
    else:
        body_start = len(lines)
    if body_start >= len(lines) or not lines[body_start].strip():
        raise BadHeaderError(f"{path} has no column header row")
    columns = [c.strip() for c in lines[body_start].strip().split(",")]
    if expected is not None and columns != list(expected):
        raise BadHeaderError(f"{path} has columns {columns}, expected {list(expected)}")
    frame = pd.read_csv(path, comment="#")
    return header, frame


def theta_frame(estimates: Iterable[ThetaEstimate]) -> pd.DataFrame:
    rows = [
        [e.lam, e.n, e.trials, e.hits, e.theta, e.ci_lo, e.ci_hi, e.seed]
        for e in estimates
    ]
    return pd.DataFrame(rows, columns=THETA_COLUMNS)


def write_theta_table(
    estimates: Iterable[ThetaEstimate], path: PathLike, header: Optional[Mapping[str, Any]] = None
) -> Path:
    """Write ``lambda,n,trials,hits,theta,ci_lo,ci_hi,seed`` rows."""
    return write_table(theta_frame(estimates), path, header)


def revealment_frame(estimate: RevealmentEstimate) -> pd.DataFrame:
    rows = [
        [z[0], z[1], estimate.delta[z], estimate.delta_se[z], estimate.bound]
        for z in sorted(estimate.delta)
    ]
    return pd.DataFrame(rows, columns=REVEALMENT_COLUMNS)


def write_revealment_table(
    estimate: RevealmentEstimate, path: PathLike, header: Optional[Mapping[str, Any]] = None
) -> Path:
    return write_table(revealment_frame(estimate), path, header)


def write_report(report: Any, path: PathLike, header: Optional[Mapping[str, Any]] = None) -> Path:
    """
    Write a report object (anything with ``to_dict``, or a mapping) as YAML.

    ``header`` entries are written first as ``# key=value`` comment lines.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = report.to_dict() if hasattr(report, "to_dict") else report
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.writelines(_header_lines(header))
        yaml.safe_dump(plain(data), f, sort_keys=False, default_flow_style=False, allow_unicode=True)
    return path


def read_report(path: PathLike) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}
