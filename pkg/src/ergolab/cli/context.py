"""
CLI context: logging setup, shared settings and the run-audit logger.

The audit logger is created lazily so commands that never run experiments
do not touch the filesystem.
"""

import logging
import os
import sys
from pathlib import Path

from src.core.errors import ConfigError
from src.core.harness_config import HarnessConfig, load_harness_config

from ..paths import resolve_audit_log_path
from .parser import LOG_LEVEL_ENV_VAR, THREADS_ENV_VAR

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(message)s"
LOG_DATEFMT = "%Y-%m-%d %H:%M:%S"

_audit_logger: logging.Logger | None = None


def configure_logging(*, verbose: bool = False) -> None:
    """Send ``src.*`` logs to stderr at INFO with ``--verbose``, else ``$ERGOLAB_LOG_LEVEL``."""
    level_name = "INFO" if verbose else os.getenv(LOG_LEVEL_ENV_VAR, "WARNING").upper()
    level = logging.getLevelNamesMapping().get(level_name, logging.WARNING)
    root = logging.getLogger("src")
    root.setLevel(level)
    if not any(getattr(h, "_ergolab_stderr", False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT))
        handler._ergolab_stderr = True  # type: ignore[attr-defined]
        root.addHandler(handler)


def resolve_threads(threads: int | None) -> int:
    """``--threads``, then ``$ERGOLAB_THREADS``, then 1."""
    if threads is not None:
        return threads
    env_threads = os.getenv(THREADS_ENV_VAR)
    if not env_threads:
        return 1
    try:
        value = int(env_threads)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV_VAR}: expected an integer, got {env_threads!r}") from exc
    if value < 1:
        raise ConfigError(f"{THREADS_ENV_VAR}: expected a positive integer, got {value}")
    return value


def get_harness(path: str | None = None) -> HarnessConfig:
    return load_harness_config(path)


def get_audit_logger() -> logging.Logger | None:
    """Get or create the run audit logger (lazy singleton).

    Returns None when ``ERGOLAB_AUDIT_LOG`` is unset.
    """
    global _audit_logger
    if _audit_logger is not None:
        return _audit_logger

    log_path = resolve_audit_log_path()
    if log_path is None:
        return None
    log_path.parent.mkdir(parents=True, exist_ok=True)

    _audit_logger = logging.getLogger("ergolab.run_audit")
    _audit_logger.setLevel(logging.INFO)
    _audit_logger.propagate = False

    # Avoid duplicate handlers
    if not _audit_logger.handlers:
        handler = logging.FileHandler(log_path)
        handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT))
        _audit_logger.addHandler(handler)

    return _audit_logger


def log_experiment(
    *, kind: str, config: str, status: str, outputs: list[Path] | None = None
) -> None:
    """One audit line per experiment: ``kind | config | status | outputs``."""
    audit = get_audit_logger()
    if audit is None:
        return
    names = ",".join(path.name for path in outputs or []) or "-"
    audit.info(f"{kind} | {config} | {status} | {names}")
