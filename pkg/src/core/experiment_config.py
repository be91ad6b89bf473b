"""Experiment documents: parsing and validation before anything is computed.

A document is either one experiment object or ``{"experiments": [...]}``.
Every error names the offending key path, e.g. ``experiments[1].measure.p[0]``.
"""

from __future__ import annotations

import math
import re
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from typing import ClassVar

from src.core.ergodic_opt import SFT, check_support
from src.core.errors import ConfigError
from src.core.generators import (
    BLOCKS,
    DensityZeroSet,
    Parity,
    density_zero_edits,
    pathological_point,
    perturb,
    random_window,
)
from src.core.harness_config import HarnessConfig
from src.core.json_types import JsonObject, as_json_object, parse_rational
from src.core.mc_harness import CenterMode, EstimatorSpec, KSchedule, ScheduleKind
from src.core.measures import (
    BernoulliMeasure,
    MeasureModel,
    max_entropy_markov,
    measure_from_json,
)
from src.core.rotation import RadiusKind, RadiusSchedule, RotationSystem, TrigPolynomial
from src.core.symbolic import Alphabet, CylinderFunction, PointWindow, Word

MAX_COUNTED_CHECKPOINT = 11
_NAME_PATTERN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")


class ExperimentKind(StrEnum):
    STDIFF = "stdiff"
    PATHOLOGICAL = "pathological"
    NORMALITY = "normality"
    GAUGE = "gauge"
    ROTATION = "rotation"
    MONTECARLO = "montecarlo"


class PointSource(StrEnum):
    EXPLICIT = "explicit"
    RANDOM = "random"
    PATHOLOGICAL = "pathological"


class CheckpointMethod(StrEnum):
    CLOSED_FORM = "closed_form"
    COUNTED = "counted"


@contextmanager
def _at(key: str) -> Iterator[None]:
    """Prefix model validation errors with a config key path."""
    try:
        yield
    except ConfigError as exc:
        message = str(exc)
        if message.startswith(key):
            raise
        raise type(exc)(f"{key}: {message}") from exc


def _require(payload: JsonObject, field: str, key: str) -> object:
    if field not in payload:
        raise ConfigError(f"{key}.{field}: required")
    return payload[field]


def _int(value: object, key: str, *, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{key}: must be at least {minimum}, got {value}")
    return value


def _float(value: object, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, int | float) or not math.isfinite(value):
        raise ConfigError(f"{key}: expected a finite number, got {value!r}")
    return float(value)


def _object(value: object, key: str) -> JsonObject:
    if not isinstance(value, dict):
        raise ConfigError(f"{key}: expected an object")
    return value


def _ks(value: object, key: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{key}: expected a nonempty list of k values")
    ks = tuple(_int(k, f"{key}[{i}]", minimum=1) for i, k in enumerate(value))
    if any(b <= a for a, b in zip(ks, ks[1:], strict=False)):
        raise ConfigError(f"{key}: k values must increase strictly")
    return ks


def _word(value: object, key: str) -> Word:
    if not isinstance(value, list) or not all(
        isinstance(s, int) and not isinstance(s, bool) for s in value
    ):
        raise ConfigError(f"{key}: expected a list of symbol indices")
    with _at(key):
        return Word(tuple(value))


def _enum[E: StrEnum](enum: type[E], value: object, key: str) -> E:
    try:
        return enum(value)
    except ValueError:
        choices = ", ".join(member.value for member in enum)
        raise ConfigError(f"{key}: expected one of {choices}, got {value!r}") from None


@dataclass(slots=True, frozen=True)
class PointSpec:
    """Where the centre ``x`` comes from; built lazily once validation has passed."""

    source: PointSource
    length: int
    seed: int | None = None
    window: PointWindow | None = None
    density_zero: DensityZeroSet | None = None

    def build(self, alphabet: Alphabet, m: MeasureModel | None = None) -> PointWindow:
        if self.source is PointSource.EXPLICIT:
            assert self.window is not None
            x = self.window
        elif self.source is PointSource.PATHOLOGICAL:
            x = pathological_point(0, self.length)
        else:
            assert m is not None and self.seed is not None
            x = random_window(m, self.length, self.seed)
        if self.density_zero is not None:
            edits = density_zero_edits(x, self.density_zero, alphabet.size)
            x = perturb(x, edits, alphabet=alphabet)
        return x


def _point(value: object, key: str, *, length: int, master_seed: int) -> PointSpec:
    payload = _object(value, key)
    source = _enum(PointSource, payload.get("type", "explicit"), f"{key}.type")
    density_zero = None
    if "density_zero" in payload:
        density_zero = _enum(DensityZeroSet, payload["density_zero"], f"{key}.density_zero")
    if source is PointSource.EXPLICIT:
        with _at(key):
            window = PointWindow.from_dict(payload, key=key)
        if not window.covers(0, length):
            raise ConfigError(
                f"{key}: window [{window.lo}, {window.hi}) must cover [0, {length})"
            )
        return PointSpec(source, length, window=window, density_zero=density_zero)
    declared = payload.get("length", length)
    declared = _int(declared, f"{key}.length", minimum=length)
    seed = None
    if source is PointSource.RANDOM:
        seed = _int(payload.get("seed", master_seed), f"{key}.seed", minimum=0)
    return PointSpec(source, declared, seed=seed, density_zero=density_zero)


def _check_symbols(alphabet: Alphabet, spec: PointSpec, key: str) -> None:
    if spec.window is not None:
        with _at(key):
            spec.window.check_alphabet(alphabet)


def _function(value: object, key: str, alphabet: Alphabet) -> CylinderFunction:
    payload = _object(value, key)
    with _at(key):
        f = CylinderFunction.from_dict(payload, key=key)
        f.check_alphabet(alphabet)
    return f


def _measure(value: object, key: str) -> MeasureModel:
    return measure_from_json(value, key=key)


def _output_name(payload: JsonObject, key: str, default: str) -> str:
    name = payload.get("name", default)
    if not isinstance(name, str) or not _NAME_PATTERN.match(name):
        raise ConfigError(
            f"{key}.name: expected a file-safe name (letters, digits, '_', '-', '.'), got {name!r}"
        )
    return name


@dataclass(slots=True, frozen=True)
class StdiffExperiment:
    kind: ClassVar[ExperimentKind] = ExperimentKind.STDIFF

    name: str
    measure: MeasureModel
    function: CylinderFunction
    point: PointSpec
    ks: tuple[int, ...]
    compare_birkhoff: bool = False


@dataclass(slots=True, frozen=True)
class PathologicalExperiment:
    kind: ClassVar[ExperimentKind] = ExperimentKind.PATHOLOGICAL

    name: str
    n_max: int
    method: CheckpointMethod = CheckpointMethod.CLOSED_FORM


@dataclass(slots=True, frozen=True)
class NormalityExperiment:
    kind: ClassVar[ExperimentKind] = ExperimentKind.NORMALITY

    name: str
    measure: MeasureModel
    point: PointSpec
    max_word_len: int
    k: int


@dataclass(slots=True, frozen=True)
class OpenSetRequest:
    k: int
    level: Fraction


@dataclass(slots=True, frozen=True)
class GaugeExperiment:
    kind: ClassVar[ExperimentKind] = ExperimentKind.GAUGE

    name: str
    sft: SFT
    function: CylinderFunction
    k_max: int
    measure: MeasureModel | None = None
    open_set: OpenSetRequest | None = None


@dataclass(slots=True, frozen=True)
class IdentityRequest:
    x0: float
    ks: tuple[int, ...]


@dataclass(slots=True, frozen=True)
class RotationExperiment:
    kind: ClassVar[ExperimentKind] = ExperimentKind.ROTATION

    name: str
    system: RotationSystem
    function: TrigPolynomial
    x: float
    ks: tuple[int, ...]
    compare_birkhoff: bool = False
    identity: IdentityRequest | None = None


@dataclass(slots=True, frozen=True)
class MonteCarloExperiment:
    kind: ClassVar[ExperimentKind] = ExperimentKind.MONTECARLO

    name: str
    measure: MeasureModel
    spec: EstimatorSpec
    n_trials: int
    epsilon: float
    master_seed: int


type ExperimentConfig = (
    StdiffExperiment
    | PathologicalExperiment
    | NormalityExperiment
    | GaugeExperiment
    | RotationExperiment
    | MonteCarloExperiment
)


def _parse_stdiff(payload: JsonObject, key: str, master_seed: int) -> StdiffExperiment:
    measure = _measure(_require(payload, "measure", key), f"{key}.measure")
    function = _function(_require(payload, "function", key), f"{key}.function", measure.alphabet)
    ks = _ks(_require(payload, "ks", key), f"{key}.ks")
    point = _point(
        _require(payload, "point", key), f"{key}.point", length=ks[-1], master_seed=master_seed
    )
    _check_symbols(measure.alphabet, point, f"{key}.point")
    compare = payload.get("compare_birkhoff", False)
    if not isinstance(compare, bool):
        raise ConfigError(f"{key}.compare_birkhoff: expected true or false")
    if compare:
        lo, hi = function.dependence_window()
        needed = (min(lo, 0), ks[-1] - 1 + hi)
        if point.window is not None and not point.window.covers(*needed):
            raise ConfigError(
                f"{key}.point: Birkhoff comparison needs the window to cover "
                f"[{needed[0]}, {needed[1]})"
            )
        if point.window is None and needed[0] < 0:
            raise ConfigError(
                f"{key}.function: Birkhoff comparison on a generated point needs offsets >= 0"
            )
        if point.window is None:
            point = PointSpec(
                point.source, max(point.length, needed[1]), point.seed, None, point.density_zero
            )
    return StdiffExperiment(
        _output_name(payload, key, "stdiff"), measure, function, point, ks, compare
    )


def _parse_pathological(payload: JsonObject, key: str) -> PathologicalExperiment:
    n_max = _int(_require(payload, "n_max", key), f"{key}.n_max", minimum=1)
    method = _enum(
        CheckpointMethod, payload.get("method", "closed_form"), f"{key}.method"
    )
    if method is CheckpointMethod.COUNTED and n_max > MAX_COUNTED_CHECKPOINT:
        raise ConfigError(
            f"{key}.n_max: counted checkpoints need a window of length "
            f"{BLOCKS.checkpoint_k(n_max, Parity.EVEN)}; at most n_max={MAX_COUNTED_CHECKPOINT}"
        )
    return PathologicalExperiment(_output_name(payload, key, "pathological"), n_max, method)


def _parse_normality(payload: JsonObject, key: str, master_seed: int) -> NormalityExperiment:
    measure = _measure(_require(payload, "measure", key), f"{key}.measure")
    max_word_len = _int(_require(payload, "max_word_len", key), f"{key}.max_word_len", minimum=1)
    k = _int(_require(payload, "k", key), f"{key}.k", minimum=1)
    point = _point(
        _require(payload, "point", key),
        f"{key}.point",
        length=k + max_word_len - 1,
        master_seed=master_seed,
    )
    _check_symbols(measure.alphabet, point, f"{key}.point")
    return NormalityExperiment(
        _output_name(payload, key, "normality"), measure, point, max_word_len, k
    )


def _parse_gauge(payload: JsonObject, key: str) -> GaugeExperiment:
    sft_payload = _require(payload, "sft", key)
    if sft_payload == "golden_mean":
        sft = SFT.golden_mean()
    else:
        with _at(f"{key}.sft"):
            sft = SFT.from_dict(sft_payload, key=f"{key}.sft")
    function = _function(_require(payload, "function", key), f"{key}.function", sft.alphabet)
    k_max = _int(_require(payload, "k_max", key), f"{key}.k_max", minimum=1)
    measure = None
    if "measure" in payload:
        raw = payload["measure"]
        if raw == "max_entropy":
            with _at(f"{key}.measure"):
                measure = max_entropy_markov(sft.allowed)
        else:
            measure = _measure(raw, f"{key}.measure")
        if measure.alphabet != sft.alphabet:
            raise ConfigError(f"{key}.measure: alphabet differs from {key}.sft")
        with _at(f"{key}.measure"):
            check_support(measure, sft)
    open_set = None
    if "open_set" in payload:
        if measure is None:
            raise ConfigError(f"{key}.open_set: requires {key}.measure")
        section = _object(payload["open_set"], f"{key}.open_set")
        open_set = OpenSetRequest(
            k=_int(_require(section, "k", f"{key}.open_set"), f"{key}.open_set.k", minimum=1),
            level=parse_rational(
                _require(section, "level", f"{key}.open_set"), key=f"{key}.open_set.level"
            ),
        )
    return GaugeExperiment(
        _output_name(payload, key, "gauge"), sft, function, k_max, measure, open_set
    )


def _parse_rotation(payload: JsonObject, key: str) -> RotationExperiment:
    radius_payload = as_json_object(payload.get("radius"))
    with _at(f"{key}.radius"):
        radius = RadiusSchedule(
            _enum(RadiusKind, radius_payload.get("kind", "inverse"), f"{key}.radius.kind"),
            _float(radius_payload.get("r1", 1.0), f"{key}.radius.r1"),
        )
    theta = payload.get("theta", "golden")
    with _at(f"{key}.theta"):
        if theta == "golden":
            system = RotationSystem.golden(radius)
        else:
            system = RotationSystem(_float(theta, f"{key}.theta"), radius)
    with _at(f"{key}.function"):
        function = TrigPolynomial.from_dict(
            _require(payload, "function", key), key=f"{key}.function"
        )
    x = _float(payload.get("x", 0.0), f"{key}.x")
    if not 0.0 <= x < 1.0:
        raise ConfigError(f"{key}.x: expected a point of [0, 1), got {x}")
    ks = _ks(_require(payload, "ks", key), f"{key}.ks")
    compare = payload.get("compare_birkhoff", False)
    if not isinstance(compare, bool):
        raise ConfigError(f"{key}.compare_birkhoff: expected true or false")
    identity = None
    if "identity" in payload:
        section = _object(payload["identity"], f"{key}.identity")
        x0 = _float(_require(section, "x0", f"{key}.identity"), f"{key}.identity.x0")
        identity_ks = _ks(_require(section, "ks", f"{key}.identity"), f"{key}.identity.ks")
        if not 0.0 < x0 < 1.0 or 1.0 / identity_ks[0] >= min(x0, 1.0 - x0):
            raise ConfigError(
                f"{key}.identity: ball of radius 1/{identity_ks[0]} around {x0} leaves [0, 1]"
            )
        identity = IdentityRequest(x0, identity_ks)
    return RotationExperiment(
        _output_name(payload, key, "rotation"), system, function, x, ks, compare, identity
    )


def _schedule(value: object, key: str, default: KSchedule) -> KSchedule:
    if value is None:
        return default
    if isinstance(value, list):
        with _at(key):
            return KSchedule(ScheduleKind.EXPLICIT, values=_ks(value, key))
    payload = _object(value, key)
    kind = _enum(ScheduleKind, payload.get("kind", "linear"), f"{key}.kind")
    with _at(key):
        if kind is ScheduleKind.EXPLICIT:
            return KSchedule(kind, values=_ks(_require(payload, "values", key), f"{key}.values"))
        return KSchedule(kind, n_max=_int(_require(payload, "n_max", key), f"{key}.n_max"))


def _parse_montecarlo(
    payload: JsonObject, key: str, harness: HarnessConfig, master_seed: int
) -> MonteCarloExperiment:
    measure = _measure(_require(payload, "measure", key), f"{key}.measure")
    word = _word(_require(payload, "word", key), f"{key}.word")
    with _at(f"{key}.word"):
        measure.alphabet.check_symbols(word)
    centers = _enum(CenterMode, payload.get("centers", "fixed"), f"{key}.centers")
    if centers is CenterMode.PER_K:
        if not isinstance(measure, BernoulliMeasure):
            raise ConfigError(f"{key}.measure: random-centre runs need a Bernoulli measure")
        default = KSchedule(ScheduleKind.LINEAR, n_max=harness.random_centers.n_max)
        epsilon_default = harness.random_centers.epsilon
    else:
        default = KSchedule(ScheduleKind.EXPLICIT, values=harness.fixed_center.ks)
        epsilon_default = harness.fixed_center.epsilon
    schedule = _schedule(payload.get("schedule"), f"{key}.schedule", default)
    epsilon = _float(payload.get("epsilon", epsilon_default), f"{key}.epsilon")
    if epsilon <= 0:
        raise ConfigError(f"{key}.epsilon: must be positive, got {epsilon}")
    n_trials = _int(payload.get("n_trials", harness.n_trials), f"{key}.n_trials", minimum=1)
    return MonteCarloExperiment(
        _output_name(payload, key, "montecarlo"),
        measure,
        EstimatorSpec(word, centers, schedule),
        n_trials,
        epsilon,
        master_seed,
    )


def parse_experiment(
    payload: object, key: str, harness: HarnessConfig, seed_override: int | None = None
) -> ExperimentConfig:
    entry = _object(payload, key)
    kind = _enum(ExperimentKind, _require(entry, "kind", key), f"{key}.kind")
    if seed_override is not None:
        master_seed = seed_override
    else:
        master_seed = _int(entry.get("seed", harness.master_seed), f"{key}.seed", minimum=0)
    if master_seed >= 2**64:
        raise ConfigError(f"{key}.seed: expected an unsigned 64-bit integer")
    match kind:
        case ExperimentKind.STDIFF:
            return _parse_stdiff(entry, key, master_seed)
        case ExperimentKind.PATHOLOGICAL:
            return _parse_pathological(entry, key)
        case ExperimentKind.NORMALITY:
            return _parse_normality(entry, key, master_seed)
        case ExperimentKind.GAUGE:
            return _parse_gauge(entry, key)
        case ExperimentKind.ROTATION:
            return _parse_rotation(entry, key)
        case ExperimentKind.MONTECARLO:
            return _parse_montecarlo(entry, key, harness, master_seed)


def parse_experiments(
    document: object, harness: HarnessConfig, *, seed_override: int | None = None
) -> list[ExperimentConfig]:
    """Validate a whole document; nothing is computed if any experiment is invalid."""
    if isinstance(document, dict) and "experiments" in document:
        entries = document["experiments"]
        if not isinstance(entries, list) or not entries:
            raise ConfigError("experiments: expected a nonempty list")
        experiments = [
            parse_experiment(entry, f"experiments[{index}]", harness, seed_override)
            for index, entry in enumerate(entries)
        ]
    else:
        experiments = [parse_experiment(document, "experiment", harness, seed_override)]
    names = [experiment.name for experiment in experiments]
    duplicates = sorted({name for name in names if names.count(name) > 1})
    if duplicates:
        raise ConfigError(f"experiments: duplicate output names {', '.join(duplicates)}")
    return experiments


__all__ = [
    "CheckpointMethod",
    "ExperimentConfig",
    "ExperimentKind",
    "GaugeExperiment",
    "IdentityRequest",
    "MonteCarloExperiment",
    "NormalityExperiment",
    "OpenSetRequest",
    "PathologicalExperiment",
    "PointSource",
    "PointSpec",
    "RotationExperiment",
    "StdiffExperiment",
    "parse_experiment",
    "parse_experiments",
]
