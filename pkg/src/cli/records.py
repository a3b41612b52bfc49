"""
Run log: one JSON record per line in ``<output_dir>/runs.jsonl``.
"""

import json
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Union

from ..utils import get_logger

logger = get_logger(__name__)

RUN_LOG_NAME = "runs.jsonl"


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunRecord:
    """
    One executed command.

    Attributes:
        config_hash: SHA-256 of the resolved configuration
        command: Command name (``verify OSSS`` style for subcommands)
        started: UTC start time (ISO 8601)
        finished: UTC end time (ISO 8601)
        seed: Master seed
        outputs: Artifact files written, relative to the output directory
        version: Package version
        config: The resolved configuration
        status: Exit status of the command
    """

    config_hash: str
    command: str
    started: str
    finished: str
    seed: int
    outputs: List[str] = field(default_factory=list)
    version: str = ""
    config: Dict[str, Any] = field(default_factory=dict)
    status: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def append_record(record: RunRecord, output_dir: Union[str, Path]) -> Path:
    """
    Append a record to the run log of ``output_dir``.

    The line is written with one ``write`` call and flushed to disk before
    returning, so a crash leaves either the whole line or nothing.
    """
    path = Path(output_dir) / RUN_LOG_NAME
    path.parent.mkdir(parents=True, exist_ok=True)
    line = json.dumps(record.to_dict(), sort_keys=True, ensure_ascii=False) + "\n"
    with open(path, "a", encoding="utf-8") as f:
        f.write(line)
        f.flush()
        os.fsync(f.fileno())
    logger.debug(f"Appended run record for '{record.command}' to {path}")
    return path


def read_records(output_dir: Union[str, Path]) -> List[RunRecord]:
    """Records of the run log in append order (empty if there is none)."""
    path = Path(output_dir) / RUN_LOG_NAME
    if not path.exists():
        return []
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                records.append(RunRecord(**json.loads(line)))
    return records
