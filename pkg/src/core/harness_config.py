"""Harness defaults: Monte Carlo thresholds, trial counts and the master seed.

Defaults are loaded from a local JSON profile so the repo can ship a tracked
template while each operator keeps a tuned copy in ignored files such as
``private/harness.json``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from src.core.errors import ConfigError
from src.core.json_types import JsonObject, as_json_object

HARNESS_PATH_ENV_VAR = "ERGOLAB_HARNESS_PATH"
DEFAULT_HARNESS_TEMPLATE_PATH = (
    Path(__file__).resolve().parents[2] / "config" / "harness.template.json"
)
DEFAULT_PRIVATE_HARNESS_PATH = Path.cwd() / "private" / "harness.json"


@dataclass(slots=True, frozen=True)
class FixedCenterDefaults:
    ks: tuple[int, ...] = (10, 100, 1_000, 10_000)
    epsilon: float = 0.02

    def to_dict(self) -> JsonObject:
        return {"ks": list(self.ks), "epsilon": self.epsilon}


@dataclass(slots=True, frozen=True)
class RandomCenterDefaults:
    n_max: int = 1_000
    epsilon: float = 0.05

    def to_dict(self) -> JsonObject:
        return {"n_max": self.n_max, "epsilon": self.epsilon}


@dataclass(slots=True, frozen=True)
class RotationDefaults:
    n_centers: int = 20
    k: int = 10_000
    bound: float = 0.05

    def to_dict(self) -> JsonObject:
        return {"n_centers": self.n_centers, "k": self.k, "bound": self.bound}


@dataclass(slots=True, frozen=True)
class HarnessConfig:
    """Resolved defaults for seeded experiments and the acceptance suites."""

    master_seed: int = 20_240_601
    n_trials: int = 200
    required_pass_fraction: float = 0.95
    fixed_center: FixedCenterDefaults = field(default_factory=FixedCenterDefaults)
    random_centers: RandomCenterDefaults = field(default_factory=RandomCenterDefaults)
    rotation: RotationDefaults = field(default_factory=RotationDefaults)
    source_path: str | None = None

    def with_seed(self, seed: int | None) -> HarnessConfig:
        return self if seed is None else replace(self, master_seed=seed)

    def to_dict(self) -> JsonObject:
        return {
            "master_seed": self.master_seed,
            "n_trials": self.n_trials,
            "required_pass_fraction": self.required_pass_fraction,
            "fixed_center": self.fixed_center.to_dict(),
            "random_centers": self.random_centers.to_dict(),
            "rotation": self.rotation.to_dict(),
            "source_path": self.source_path,
        }


def resolve_harness_path(path: str | Path | None = None) -> Path | None:
    """Resolve the harness profile path.

    Preference order:
    1. explicit ``path`` argument
    2. ``ERGOLAB_HARNESS_PATH``
    3. ``./private/harness.json`` when present
    4. tracked ``config/harness.template.json``
    """
    if path is not None:
        return Path(path).expanduser()

    env_path = os.getenv(HARNESS_PATH_ENV_VAR)
    if env_path:
        return Path(env_path).expanduser()

    if DEFAULT_PRIVATE_HARNESS_PATH.exists():
        return DEFAULT_PRIVATE_HARNESS_PATH

    if DEFAULT_HARNESS_TEMPLATE_PATH.exists():
        return DEFAULT_HARNESS_TEMPLATE_PATH

    return None


def _positive_int(payload: JsonObject, key: str, default: int, *, where: str) -> int:
    value = payload.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"{where}.{key}: expected a positive integer, got {value!r}")
    return value


def _unit_float(payload: JsonObject, key: str, default: float, *, where: str) -> float:
    value = payload.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int | float) or not 0 < value <= 1:
        raise ConfigError(f"{where}.{key}: expected a number in (0, 1], got {value!r}")
    return float(value)


def _parse_fixed_center(payload: JsonObject) -> FixedCenterDefaults:
    default = FixedCenterDefaults()
    raw_ks = payload.get("ks", list(default.ks))
    if (
        not isinstance(raw_ks, list)
        or not raw_ks
        or not all(isinstance(k, int) and not isinstance(k, bool) and k >= 1 for k in raw_ks)
        or any(b <= a for a, b in zip(raw_ks, raw_ks[1:], strict=False))
    ):
        raise ConfigError(f"fixed_center.ks: expected increasing positive integers, got {raw_ks!r}")
    return FixedCenterDefaults(
        ks=tuple(int(k) for k in raw_ks),  # type: ignore[arg-type]
        epsilon=_unit_float(payload, "epsilon", default.epsilon, where="fixed_center"),
    )


def _parse_random_centers(payload: JsonObject) -> RandomCenterDefaults:
    default = RandomCenterDefaults()
    return RandomCenterDefaults(
        n_max=_positive_int(payload, "n_max", default.n_max, where="random_centers"),
        epsilon=_unit_float(payload, "epsilon", default.epsilon, where="random_centers"),
    )


def _parse_rotation(payload: JsonObject) -> RotationDefaults:
    default = RotationDefaults()
    return RotationDefaults(
        n_centers=_positive_int(payload, "n_centers", default.n_centers, where="rotation"),
        k=_positive_int(payload, "k", default.k, where="rotation"),
        bound=_unit_float(payload, "bound", default.bound, where="rotation"),
    )


def load_harness_config(path: str | Path | None = None) -> HarnessConfig:
    """Load harness defaults from JSON, falling back to built-in values."""
    resolved_path = resolve_harness_path(path)
    explicit_path_requested = path is not None or os.getenv(HARNESS_PATH_ENV_VAR)
    if resolved_path is None:
        return HarnessConfig()

    if not resolved_path.exists():
        if explicit_path_requested:
            raise ConfigError(f"Harness file not found: {resolved_path}")
        return HarnessConfig()

    try:
        raw_payload = json.loads(resolved_path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Invalid harness JSON in {resolved_path}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"Could not read harness file {resolved_path}: {exc}") from exc

    if not isinstance(raw_payload, dict):
        raise ConfigError(f"Harness file must contain a JSON object: {resolved_path}")

    default = HarnessConfig()
    seed = raw_payload.get("master_seed", default.master_seed)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError(f"master_seed: expected an unsigned 64-bit integer, got {seed!r}")

    return HarnessConfig(
        master_seed=seed,
        n_trials=_positive_int(raw_payload, "n_trials", default.n_trials, where="harness"),
        required_pass_fraction=_unit_float(
            raw_payload, "required_pass_fraction", default.required_pass_fraction, where="harness"
        ),
        fixed_center=_parse_fixed_center(as_json_object(raw_payload.get("fixed_center"))),
        random_centers=_parse_random_centers(as_json_object(raw_payload.get("random_centers"))),
        rotation=_parse_rotation(as_json_object(raw_payload.get("rotation"))),
        source_path=str(resolved_path),
    )


__all__ = [
    "DEFAULT_HARNESS_TEMPLATE_PATH",
    "DEFAULT_PRIVATE_HARNESS_PATH",
    "HARNESS_PATH_ENV_VAR",
    "FixedCenterDefaults",
    "HarnessConfig",
    "RandomCenterDefaults",
    "RotationDefaults",
    "load_harness_config",
    "resolve_harness_path",
]
