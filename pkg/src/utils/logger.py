"""
Logging configuration and utilities.

All package loggers hang off the ``coxperc`` logger; ``setup_logger`` (or
``configure_logging`` with the ``logging`` section of config.yaml) attaches the
handlers once per process.
"""

import sys
import logging
from pathlib import Path
from typing import Any, Mapping, Optional
from logging.handlers import RotatingFileHandler

ROOT_LOGGER = "coxperc"
DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# Libraries that are chatty at DEBUG
NOISY_LOGGERS = ("matplotlib", "PIL")


def setup_logger(
    name: str = ROOT_LOGGER,
    level: str = "INFO",
    log_file: Optional[str] = None,
    max_bytes: int = 10485760,  # 10MB
    backup_count: int = 5,
    fmt: str = DEFAULT_FORMAT,
) -> logging.Logger:
    """
    Set up and configure a logger.

    Args:
        name: Logger name
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Path to a rotating log file (if None, only stderr)
        max_bytes: Maximum size of log file before rotation
        backup_count: Number of backup files to keep
        fmt: ``logging.Formatter`` format string

    Returns:
        Configured logger instance

    Raises:
        ValueError: Unknown level name
    """
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level '{level}'")

    logger = logging.getLogger(name)
    logger.setLevel(numeric)
    logger.propagate = False
    for noisy in NOISY_LOGGERS:
        logging.getLogger(noisy).setLevel(max(numeric, logging.WARNING))

    # Handlers are attached once; later calls only change the level
    if logger.handlers:
        return logger

    formatter = logging.Formatter(fmt, datefmt=DATE_FORMAT)

    # stderr keeps stdout free for piped tables
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            log_path,
            maxBytes=max_bytes,
            backupCount=backup_count,
            encoding="utf-8",
        )
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def configure_logging(section: Mapping[str, Any], level: Optional[str] = None) -> logging.Logger:
    """
    Configure the package logger from the ``logging`` section of config.yaml.

    Args:
        section: Mapping with ``level``, ``file``, ``format``, ``max_bytes``, ``backup_count``
        level: Overrides ``section["level"]`` (the ``--log-level`` flag)
    """
    return setup_logger(
        name=ROOT_LOGGER,
        level=level or section.get("level") or "INFO",
        log_file=section.get("file"),
        max_bytes=int(section.get("max_bytes", 10485760)),
        backup_count=int(section.get("backup_count", 5)),
        fmt=section.get("format") or DEFAULT_FORMAT,
    )


def get_logger(name: str = ROOT_LOGGER) -> logging.Logger:
    """Logger ``name`` nested under ``coxperc`` (``__name__`` of the caller, usually)."""
    if name != ROOT_LOGGER and not name.startswith(ROOT_LOGGER + "."):
        name = f"{ROOT_LOGGER}.{name}"
    return logging.getLogger(name)
