"""Filesystem and environment-based path resolution helpers."""

from __future__ import annotations

import os
from pathlib import Path

OUT_DIR_ENV_VAR = "ERGOLAB_OUT_DIR"
AUDIT_LOG_ENV_VAR = "ERGOLAB_AUDIT_LOG"
DEFAULT_OUT_DIR_NAME = "results"


def resolve_out_dir(out_dir: str | Path | None = None) -> Path:
    """Resolve the artifact directory.

    Preference order:
    1. explicit ``--out`` argument
    2. ``ERGOLAB_OUT_DIR``
    3. ``./results``
    """
    if out_dir:
        return Path(out_dir).expanduser()

    env_dir = os.getenv(OUT_DIR_ENV_VAR)
    if env_dir:
        return Path(env_dir).expanduser()

    return Path.cwd() / DEFAULT_OUT_DIR_NAME


def resolve_audit_log_path() -> Path | None:
    """``ERGOLAB_AUDIT_LOG``; no audit file is kept when it is unset."""
    env_path = os.getenv(AUDIT_LOG_ENV_VAR)
    if env_path:
        return Path(env_path).expanduser()
    return None


__all__ = [
    "AUDIT_LOG_ENV_VAR",
    "DEFAULT_OUT_DIR_NAME",
    "OUT_DIR_ENV_VAR",
    "resolve_audit_log_path",
    "resolve_out_dir",
]
