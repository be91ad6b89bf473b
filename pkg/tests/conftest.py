"""Shared fixtures: CLI subprocess runner, envelope checks and small measures."""

import json
import os
import subprocess
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import pytest

from src.core.harness_config import HarnessConfig
from src.core.measures import BernoulliMeasure, MarkovMeasure

REPO_ROOT = Path(__file__).parent.parent

ENVELOPE_SCHEMA: dict[str, Any] = json.loads(
    (REPO_ROOT / "schemas" / "envelope.json").read_text()
)
ENVELOPE_COMMANDS = frozenset(ENVELOPE_SCHEMA["properties"]["command"]["enum"])

ERGOLAB_ENV_VARS = (
    "ERGOLAB_HARNESS_PATH",
    "ERGOLAB_OUT_DIR",
    "ERGOLAB_AUDIT_LOG",
    "ERGOLAB_OUTPUT",
    "ERGOLAB_THREADS",
    "ERGOLAB_LOG_LEVEL",
)


@dataclass
class CLIResult:
    """Exit code and captured streams of one ``ergolab`` invocation."""

    exit_code: int
    stdout: str
    stderr: str
    json_data: dict[str, Any] | None = None

    @property
    def success(self) -> bool:
        return self.exit_code == 0

    def get_data(self) -> dict[str, Any]:
        if self.json_data is None:
            raise ValueError(f"stdout is not an envelope (exit {self.exit_code}): {self.stdout!r}")
        return self.json_data.get("data") or {}


def clean_env(**overrides: str) -> dict[str, str]:
    """Our environment without ERGOLAB_* settings, plus ``overrides``."""
    env = {key: value for key, value in os.environ.items() if key not in ERGOLAB_ENV_VARS}
    env.update(overrides)
    return env


def run_cli(*args: str, timeout: int = 120, env: dict[str, str] | None = None) -> CLIResult:
    """Run ``python -m src.ergolab.cli`` from the repo root.

    ``env`` replaces the environment; by default ERGOLAB_* variables are stripped
    so a developer's shell settings cannot leak into assertions.
    """
    result = subprocess.run(
        [sys.executable, "-m", "src.ergolab.cli", *args],
        capture_output=True,
        text=True,
        timeout=timeout,
        cwd=REPO_ROOT,
        env=clean_env() if env is None else env,
    )
    json_data = None
    if "--json" in args and result.stdout.strip():
        try:
            json_data = json.loads(result.stdout)
        except json.JSONDecodeError:
            json_data = None
    return CLIResult(result.returncode, result.stdout, result.stderr, json_data)


def validate_envelope(data: dict[str, Any]) -> list[str]:
    """Check ``data`` against ``schemas/envelope.json``; returns problems found."""
    errors = [
        f"Missing required field: {field}"
        for field in ENVELOPE_SCHEMA["required"]
        if field not in data
    ]
    if data.get("schema_version", 1) != 1:
        errors.append(f"Invalid schema_version: {data['schema_version']} (expected 1)")
    if "command" in data and data["command"] not in ENVELOPE_COMMANDS:
        errors.append(f"Invalid command: {data['command']!r}")
    if "success" in data and not isinstance(data["success"], bool):
        errors.append(f"Invalid success type: {type(data['success']).__name__}")
    error = data.get("error")
    if error is not None and not (
        isinstance(error, dict) and {"type", "message"} <= error.keys()
    ):
        errors.append(f"Invalid error object: {error!r}")
    extra = data.keys() - ENVELOPE_SCHEMA["properties"].keys()
    if extra:
        errors.append(f"Unexpected fields: {sorted(extra)}")
    return errors


# =============================================================================
# Model Fixtures
# =============================================================================


@pytest.fixture
def uniform2() -> BernoulliMeasure:
    return BernoulliMeasure.uniform(2)


@pytest.fixture
def biased2() -> BernoulliMeasure:
    return BernoulliMeasure((Fraction(1, 3), Fraction(2, 3)))


@pytest.fixture
def markov2() -> MarkovMeasure:
    """Two-state chain with stationary vector (2/5, 3/5)."""
    return MarkovMeasure(((Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 3), Fraction(2, 3))))


@pytest.fixture
def golden_markov() -> MarkovMeasure:
    """Chain supported on the golden-mean shift (no ``11``)."""
    return MarkovMeasure(((Fraction(1, 2), Fraction(1, 2)), (Fraction(1), Fraction(0))))


@pytest.fixture
def harness() -> HarnessConfig:
    return HarnessConfig()


@pytest.fixture
def isolated_env(monkeypatch, tmp_path):
    """Clear ergolab environment variables and run from an empty directory."""
    for name in ERGOLAB_ENV_VARS:
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
    return tmp_path
