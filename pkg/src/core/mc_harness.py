"""Estimator families, exact mean/covariance oracles and seeded Monte Carlo runs.

``xi_{i,k}^a(x) = mu(C_k(x) & T^-i [a]) / mu(C_k(x))``. Averaged over ``i < k``
it is the spatial-temporal differentiation of ``chi_[a]`` at ``x``; with an
independent centre ``x_k`` per ``k`` (random centres) the same average is
called ``zeta``. Both share the mean ``mu([a])``, and ``xi_i``, ``xi_j`` are
independent under a Bernoulli measure once ``|i - j| >= len(a)``; splitting
``i`` into residue classes mod ``len(a)`` gives independent families.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from src.core.errors import ComplexityGuard, ModelError
from src.core.generators import random_window
from src.core.json_types import JsonObject, format_rational, rational_to_float
from src.core.measures import BernoulliMeasure, MeasureModel, conditional_measure, word_measure
from src.core.rng import keyed_generator
from src.core.stdiff import stdiff_series, stdiff_value
from src.core.symbolic import CylinderFunction, PointWindow, ShiftedCylinderIndicator, Word

logger = logging.getLogger(__name__)

type Block = tuple[int, ...]

ENUMERATION_LIMIT = 10**7
STREAM_FIXED_CENTER = 0
STREAM_RANDOM_CENTER = 1


class CenterMode(StrEnum):
    FIXED_POINT = "fixed"
    PER_K = "per_k"


class ScheduleKind(StrEnum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"
    EXPLICIT = "explicit"


@dataclass(slots=True, frozen=True)
class KSchedule:
    """Increasing ``k_n`` with ``sum k_n^-2 < inf``."""

    kind: ScheduleKind = ScheduleKind.LINEAR
    n_max: int = 1
    values: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind is ScheduleKind.EXPLICIT:
            if not self.values:
                raise ModelError("explicit schedule needs at least one k")
            if any(k < 1 for k in self.values):
                raise ModelError("schedule values must be positive")
            if any(b <= a for a, b in zip(self.values, self.values[1:], strict=False)):
                raise ModelError("schedule values must increase strictly")
        elif self.n_max < 1:
            raise ModelError(f"schedule n_max must be at least 1, got {self.n_max}")

    @property
    def ks(self) -> tuple[int, ...]:
        if self.kind is ScheduleKind.EXPLICIT:
            return self.values
        power = 1 if self.kind is ScheduleKind.LINEAR else 2
        return tuple(n**power for n in range(1, self.n_max + 1))

    @property
    def inverse_square_sum(self) -> float:
        return math.fsum(1.0 / k**2 for k in self.ks)

    def describe(self) -> JsonObject:
        data: JsonObject = {"kind": self.kind.value, "k_max": self.ks[-1]}
        if self.kind is ScheduleKind.EXPLICIT:
            data["values"] = list(self.values)
        else:
            data["n_max"] = self.n_max
        data["inverse_square_sum"] = self.inverse_square_sum
        return data


@dataclass(slots=True, frozen=True)
class EstimatorSpec:
    word: Word
    centers: CenterMode = CenterMode.FIXED_POINT
    schedule: KSchedule = field(default_factory=KSchedule)

    @property
    def function(self) -> CylinderFunction:
        return CylinderFunction.indicator(self.word)


@dataclass(slots=True, frozen=True)
class TrialResult:
    """Per-``k`` values of one seeded trial and its final deviation from ``mu([a])``."""

    trial: int
    master_seed: int
    values: tuple[tuple[int, Fraction], ...]
    target: Fraction

    @property
    def final_value(self) -> Fraction:
        return self.values[-1][1]

    @property
    def final_deviation(self) -> Fraction:
        return abs(self.final_value - self.target)

    def to_dict(self) -> JsonObject:
        return {
            "trial": self.trial,
            "master_seed": self.master_seed,
            "target": format_rational(self.target),
            "final_k": self.values[-1][0],
            "final_value": format_rational(self.final_value),
            "final_deviation": rational_to_float(self.final_deviation),
            "values": [[k, format_rational(v)] for k, v in self.values],
        }


def _enumeration_guard(size: int, k: int) -> None:
    if size**k > ENUMERATION_LIMIT:
        raise ComplexityGuard(f"{size}^{k} windows exceeds the limit of {ENUMERATION_LIMIT}")


def _xi(m: MeasureModel, window: Sequence[int], i: int, a: Word) -> Fraction:
    return conditional_measure(m, 0, window, ShiftedCylinderIndicator(0, a).constraints(at=i))


@lru_cache(maxsize=16)
def _window_distribution(m: BernoulliMeasure, k: int) -> tuple[tuple[Block, Fraction], ...]:
    """Every rank-``k`` cylinder with its mass."""
    if not isinstance(m, BernoulliMeasure):
        raise ModelError("exact xi oracles are defined for Bernoulli measures only")
    _enumeration_guard(m.alphabet.size, k)
    return tuple(
        (window, word_measure(m, Word(window)))
        for window in product(range(m.alphabet.size), repeat=k)
    )


def xi_mean_bruteforce(m: BernoulliMeasure, k: int, i: int, a: Word) -> Fraction:
    """``int xi_{i,k}^a dmu`` summed over all ``D^k`` rank-``k`` cylinders."""
    if not 0 <= i < k:
        raise ModelError(f"shift i={i} outside [0, {k})")
    m.alphabet.check_symbols(a)
    return sum((mass * _xi(m, w, i, a) for w, mass in _window_distribution(m, k)), Fraction(0))


def xi_covariance(m: BernoulliMeasure, k: int, i: int, j: int, a: Word) -> Fraction:
    """Exact ``cov(xi_{i,k}^a, xi_{j,k}^a)`` over the cylinder distribution."""
    for shift in (i, j):
        if not 0 <= shift < k:
            raise ModelError(f"shift {shift} outside [0, {k})")
    first = second = joint = Fraction(0)
    for window, mass in _window_distribution(m, k):
        xi_i = _xi(m, window, i, a)
        xi_j = _xi(m, window, j, a)
        first += mass * xi_i
        second += mass * xi_j
        joint += mass * xi_i * xi_j
    return joint - first * second


@dataclass(slots=True, frozen=True)
class SplitFamilies:
    """Residue classes ``i = q*l + j`` below ``l*floor(k/l)`` plus the leftover tail."""

    blocks: tuple[tuple[int, ...], ...]
    remainder: tuple[int, ...]


def split_subsequences(k: int, ell: int) -> SplitFamilies:
    if ell < 1:
        raise ModelError(f"block length must be at least 1, got {ell}")
    if k < 0:
        raise ModelError(f"k must be nonnegative, got {k}")
    cut = ell * (k // ell)
    blocks = tuple(tuple(range(j, cut, ell)) for j in range(ell))
    return SplitFamilies(blocks, tuple(range(cut, k)))


def split_values[T](values: Sequence[T], ell: int) -> tuple[list[list[T]], list[T]]:
    """Apply :func:`split_subsequences` to values indexed by ``i``."""
    families = split_subsequences(len(values), ell)
    return (
        [[values[i] for i in block] for block in families.blocks],
        [values[i] for i in families.remainder],
    )


def centered_fourth_moment(m: BernoulliMeasure, k: int, a: Word, j: int) -> Fraction:
    """``E[(sum_{i in family j} (xi_i - mu([a])))^4]`` by enumeration."""
    families = split_subsequences(k, len(a))
    if not 0 <= j < len(a):
        raise ModelError(f"family index {j} outside [0, {len(a)})")
    family = families.blocks[j]
    mean = word_measure(m, a)
    total = Fraction(0)
    for window, mass in _window_distribution(m, k):
        centered = sum((_xi(m, window, i, a) - mean for i in family), Fraction(0))
        total += mass * centered**4
    return total


def fourth_moment_bound(family_size: int, bound: Fraction = Fraction(1)) -> Fraction:
    """``(3n^2 - 2n) C^4`` for ``n`` independent centred terms bounded by ``C``."""
    return (3 * family_size**2 - 2 * family_size) * bound**4


def _fixed_center_trial(
    m: MeasureModel, spec: EstimatorSpec, master_seed: int, trial: int
) -> TrialResult:
    ks = spec.schedule.ks
    x = random_window(m, ks[-1], keyed_generator(master_seed, STREAM_FIXED_CENTER, trial))
    series = stdiff_series(m, x, ks, spec.function)
    values = tuple((k, Fraction(v)) for k, v in series.entries)
    return TrialResult(trial, master_seed, values, word_measure(m, spec.word))


def _random_center_trial(
    m: MeasureModel, spec: EstimatorSpec, master_seed: int, trial: int
) -> TrialResult:
    f = spec.function
    values = []
    for k in spec.schedule.ks:
        x_k: PointWindow = random_window(
            m, k, keyed_generator(master_seed, STREAM_RANDOM_CENTER, trial, k)
        )
        values.append((k, stdiff_value(m, x_k, k, f)))
    return TrialResult(trial, master_seed, tuple(values), word_measure(m, spec.word))


def _run_trials(
    runner: Callable[[MeasureModel, EstimatorSpec, int, int], TrialResult],
    m: MeasureModel,
    spec: EstimatorSpec,
    master_seed: int,
    n_trials: int,
    threads: int,
) -> list[TrialResult]:
    if n_trials < 1:
        raise ModelError(f"need at least one trial, got {n_trials}")
    m.alphabet.check_symbols(spec.word)
    logger.info(
        "Running %d %s trials, k_max=%d, threads=%d",
        n_trials,
        spec.centers.value,
        spec.schedule.ks[-1],
        threads,
    )
    if threads <= 1:
        results = [runner(m, spec, master_seed, trial) for trial in range(n_trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(runner, m, spec, master_seed, trial) for trial in range(n_trials)
            ]
            results = [future.result() for future in futures]
    return sorted(results, key=lambda result: result.trial)


def run_fixed_center(
    m: MeasureModel, spec: EstimatorSpec, master_seed: int, n_trials: int, *, threads: int = 1
) -> list[TrialResult]:
    """One sampled centre per trial, evaluated along the whole schedule."""
    if spec.centers is not CenterMode.FIXED_POINT:
        raise ModelError("run_fixed_center needs centers='fixed'")
    return _run_trials(_fixed_center_trial, m, spec, master_seed, n_trials, threads)


def run_random_centers(
    m: MeasureModel, spec: EstimatorSpec, master_seed: int, n_trials: int, *, threads: int = 1
) -> list[TrialResult]:
    """An independent centre ``x_k`` for every ``k`` of the schedule."""
    if spec.centers is not CenterMode.PER_K:
        raise ModelError("run_random_centers needs centers='per_k'")
    if not isinstance(m, BernoulliMeasure):
        raise ModelError("random-centre runs are defined for Bernoulli measures only")
    return _run_trials(_random_center_trial, m, spec, master_seed, n_trials, threads)


@dataclass(slots=True, frozen=True)
class TrialSummary:
    pass_fraction: float
    epsilon: float
    schedule: JsonObject
    master_seed: int
    n_trials: int
    mean_final: float
    stderr_final: float
    target: Fraction
    centers: CenterMode

    def within_standard_errors(self, count: float = 3.0) -> bool:
        return abs(self.mean_final - rational_to_float(self.target)) <= count * self.stderr_final

    def to_dict(self) -> JsonObject:
        return {
            "pass_fraction": self.pass_fraction,
            "epsilon": self.epsilon,
            "schedule": self.schedule,
            "master_seed": self.master_seed,
            "n_trials": self.n_trials,
            "centers": self.centers.value,
            "target": format_rational(self.target),
            "mean_final": self.mean_final,
            "stderr_final": self.stderr_final,
        }


def summarize(
    trials: Sequence[TrialResult], spec: EstimatorSpec, epsilon: float
) -> TrialSummary:
    """Fraction of trials whose final deviation is below ``epsilon``, with mean and s.e."""
    if not trials:
        raise ModelError("no trials to summarize")
    finals = np.array([rational_to_float(t.final_value) for t in trials])
    passed = sum(1 for t in trials if rational_to_float(t.final_deviation) < epsilon)
    stderr = float(finals.std(ddof=1) / math.sqrt(len(finals))) if len(finals) > 1 else 0.0
    return TrialSummary(
        pass_fraction=passed / len(trials),
        epsilon=epsilon,
        schedule=spec.schedule.describe(),
        master_seed=trials[0].master_seed,
        n_trials=len(trials),
        mean_final=float(finals.mean()),
        stderr_final=stderr,
        target=trials[0].target,
        centers=spec.centers,
    )


__all__ = [
    "CenterMode",
    "EstimatorSpec",
    "KSchedule",
    "ScheduleKind",
    "SplitFamilies",
    "TrialResult",
    "TrialSummary",
    "centered_fourth_moment",
    "fourth_moment_bound",
    "run_fixed_center",
    "run_random_centers",
    "split_subsequences",
    "split_values",
    "summarize",
    "xi_covariance",
    "xi_mean_bruteforce",
]
