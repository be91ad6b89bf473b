"""Acceptance suites run by ``ergolab verify``.

The exact suite checks rational identities and closed forms; the montecarlo
suite runs the seeded statistical checks with the harness defaults.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction

import numpy as np

from src.core.ergodic_opt import SFT, gauge_gap, gauge_series
from src.core.generators import (
    BLOCKS,
    Parity,
    checkpoint_series,
    counted_checkpoint_series,
    random_window,
)
from src.core.harness_config import HarnessConfig
from src.core.json_types import JsonObject
from src.core.mc_harness import (
    CenterMode,
    EstimatorSpec,
    KSchedule,
    ScheduleKind,
    run_fixed_center,
    run_random_centers,
    summarize,
    xi_covariance,
    xi_mean_bruteforce,
)
from src.core.measures import BernoulliMeasure, MarkovMeasure, MeasureModel, word_measure
from src.core.rng import keyed_generator
from src.core.rotation import (
    QUADRATURE_TOLERANCE,
    RadiusSchedule,
    RotationSystem,
    TrigPolynomial,
    identity_counterexample,
    identity_counterexample_quadrature,
    quadrature_average,
    rotation_ball_stdiff,
)
from src.core.stdiff import FrequencyCap, frequency, stdiff_value
from src.core.symbolic import Alphabet, CylinderFunction, PointWindow, Word

logger = logging.getLogger(__name__)

STREAM_EXACTNESS = 101
STREAM_NORMALITY = 104
STREAM_ROTATION = 109

XI_MEAN_VECTORS = (
    (Fraction(1, 3), Fraction(2, 3)),
    (Fraction(1, 4), Fraction(3, 4)),
    (Fraction(2, 5), Fraction(3, 5)),
    (Fraction(1, 10), Fraction(9, 10)),
    (Fraction(5, 7), Fraction(2, 7)),
)
COVARIANCE_VECTORS = ((Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 3), Fraction(2, 3)))


class Suite(StrEnum):
    EXACT = "exact"
    MONTECARLO = "montecarlo"
    ALL = "all"


@dataclass(slots=True, frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def to_dict(self) -> JsonObject:
        return {
            "number": self.number,
            "title": self.title,
            "passed": self.passed,
            "detail": self.detail,
            "seconds": round(self.seconds, 3),
        }


def _random_probabilities(rng: np.random.Generator, size: int) -> tuple[Fraction, ...]:
    weights = [int(w) for w in rng.integers(1, 10, size=size)]
    total = sum(weights)
    return tuple(Fraction(w, total) for w in weights)


def _random_measure(rng: np.random.Generator) -> MeasureModel:
    size = int(rng.integers(2, 4))
    if rng.random() < 0.5:
        return BernoulliMeasure(_random_probabilities(rng, size))
    return MarkovMeasure(tuple(_random_probabilities(rng, size) for _ in range(size)))


def check_single_symbol_exactness(
    harness: HarnessConfig, instances: int = 1_000
) -> tuple[bool, str]:
    """stdiff of ``chi_[d]`` equals the empirical frequency of ``d`` on ``[0, k)``."""
    rng = keyed_generator(harness.master_seed, STREAM_EXACTNESS)
    mismatches = 0
    for _ in range(instances):
        m = _random_measure(rng)
        k = int(rng.integers(1, 13))
        x = random_window(m, k, rng)
        d = int(rng.integers(0, m.alphabet.size))
        word = Word((d,))
        value = stdiff_value(m, x, k, CylinderFunction.indicator(word))
        if value != frequency(x, word, k, FrequencyCap.TO_K_MINUS_L):
            mismatches += 1
    return mismatches == 0, f"{instances} instances, {mismatches} mismatches"


def check_pathological_checkpoints(n_max: int = 10) -> tuple[bool, str]:
    closed = checkpoint_series(n_max)
    counted = counted_checkpoint_series(n_max)
    exact = closed.entries == counted.entries
    last_even = closed.value_at(BLOCKS.checkpoint_k(n_max, Parity.EVEN))
    near_third = abs(last_even - Fraction(1, 3)) < Fraction(1, 1000)
    odd_values = {
        closed.value_at(BLOCKS.checkpoint_k(n, Parity.ODD)) for n in range(1, n_max + 1)
    }
    return (
        exact and near_third and odd_values == {Fraction(2, 3)},
        f"n<={n_max}: counted==closed form {exact}, "
        f"even checkpoint n={n_max} is {float(last_even):.6f}",
    )


def check_xi_mean(k_max: int = 10, max_word_len: int = 3) -> tuple[bool, str]:
    failures = 0
    checks = 0
    alphabet = Alphabet(2)
    for p in XI_MEAN_VECTORS:
        m = BernoulliMeasure(p)
        for length in range(1, max_word_len + 1):
            for word in alphabet.words(length):
                target = word_measure(m, word)
                for k in range(1, k_max + 1):
                    for i in range(k):
                        checks += 1
                        if xi_mean_bruteforce(m, k, i, word) != target:
                            failures += 1
    return failures == 0, f"{checks} (m, k, i, a) cases, {failures} failures"


def check_normality_tail(harness: HarnessConfig, instances: int = 10_000) -> tuple[bool, str]:
    """The two frequency caps differ by at most ``(len(a) - 1) / k``."""
    rng = keyed_generator(harness.master_seed, STREAM_NORMALITY)
    violations = 0
    for _ in range(instances):
        size = int(rng.integers(2, 4))
        length = int(rng.integers(1, 5))
        k = int(rng.integers(1, 41))
        x = PointWindow.from_symbols(rng.integers(0, size, size=k + length - 1).tolist())
        word = Word(tuple(int(s) for s in rng.integers(0, size, size=length)))
        gap = abs(
            frequency(x, word, k, FrequencyCap.TO_K_MINUS_L)
            - frequency(x, word, k, FrequencyCap.TO_K_MINUS_ONE)
        )
        if gap > Fraction(length - 1, k):
            violations += 1
    return violations == 0, f"{instances} instances, {violations} violations"


def check_golden_mean_gauge(k_max: int = 500, pair_limit: int = 40) -> tuple[bool, str]:
    series = gauge_series(SFT.golden_mean(), CylinderFunction.indicator(Word((1,))), k_max)
    half = Fraction(1, 2)
    mmc_ok = series.mmc.value == half
    lower_ok = all(value >= half for _, value in series.entries)
    tail_ok = series.value(k_max) - half < Fraction(1, 50)
    violations = [
        (k, ell)
        for k in range(1, pair_limit + 1)
        for ell in range(1, pair_limit + 1)
        if (k + ell) * series.value(k + ell)
        > k * series.value(k) + ell * series.value(ell)
    ]
    return (
        mmc_ok and lower_ok and tail_ok and not violations,
        f"mmc={series.mmc.value}, Gamma_{k_max}={series.value(k_max)}, "
        f"{len(violations)} subadditivity violations",
    )


def check_full_shift_gap(k_max: int = 50) -> tuple[bool, str]:
    result = gauge_gap(
        BernoulliMeasure.uniform(2),
        SFT.full_shift(2),
        CylinderFunction.indicator(Word((0,))),
        k_max,
    )
    series = gauge_series(SFT.full_shift(2), CylinderFunction.indicator(Word((0,))), k_max)
    all_one = all(value == 1 for _, value in series.entries)
    return (
        all_one and result.gap == Fraction(1, 2),
        f"Gamma_k=1 for k<={k_max}: {all_one}, gap={result.gap}",
    )


def check_xi_covariance(k_max: int = 8, max_word_len: int = 3) -> tuple[bool, str]:
    failures = 0
    checks = 0
    alphabet = Alphabet(2)
    for p in COVARIANCE_VECTORS:
        m = BernoulliMeasure(p)
        for length in range(1, max_word_len + 1):
            for word in alphabet.words(length):
                for k in range(1, k_max + 1):
                    for i in range(k):
                        for j in range(i + length, k):
                            checks += 1
                            if xi_covariance(m, k, i, j, word) != 0:
                                failures += 1
    return failures == 0, f"{checks} pairs at distance >= len(a), {failures} nonzero"


def _fixed_center_check(harness: HarnessConfig, threads: int) -> tuple[bool, str]:
    spec = EstimatorSpec(
        Word((0,)),
        CenterMode.FIXED_POINT,
        KSchedule(ScheduleKind.EXPLICIT, values=harness.fixed_center.ks),
    )
    trials = run_fixed_center(
        BernoulliMeasure.uniform(2), spec, harness.master_seed, harness.n_trials, threads=threads
    )
    summary = summarize(trials, spec, harness.fixed_center.epsilon)
    return (
        summary.pass_fraction >= harness.required_pass_fraction,
        f"pass fraction {summary.pass_fraction:.3f} at epsilon={summary.epsilon}, "
        f"k={spec.schedule.ks[-1]}, {summary.n_trials} seeds",
    )


def _random_center_check(harness: HarnessConfig, threads: int) -> tuple[bool, str]:
    spec = EstimatorSpec(
        Word((0,)),
        CenterMode.PER_K,
        KSchedule(ScheduleKind.LINEAR, n_max=harness.random_centers.n_max),
    )
    trials = run_random_centers(
        BernoulliMeasure.uniform(2), spec, harness.master_seed, harness.n_trials, threads=threads
    )
    summary = summarize(trials, spec, harness.random_centers.epsilon)
    bounded = all(0 <= value <= 1 for t in trials for _, value in t.values)
    return (
        summary.pass_fraction >= harness.required_pass_fraction and bounded,
        f"pass fraction {summary.pass_fraction:.3f} at epsilon={summary.epsilon}, "
        f"k_max={spec.schedule.ks[-1]}, values in [0, 1]: {bounded}",
    )


def check_rotation(harness: HarnessConfig) -> tuple[bool, str]:
    defaults = harness.rotation
    system = RotationSystem.golden(RadiusSchedule())
    f = TrigPolynomial.cosine()
    rng = keyed_generator(harness.master_seed, STREAM_ROTATION)
    centers = rng.random(defaults.n_centers)
    values = [rotation_ball_stdiff(system, float(x), defaults.k, f) for x in centers]
    integral = quadrature_average(f, 0.0, 1.0)
    worst = max(abs(v - integral) for v in values)

    identity_ok = True
    for x0 in (0.25, 0.5, 0.7):
        for k in (10, 100, 1_000):
            result = identity_counterexample(x0, k)
            ball, whole = identity_counterexample_quadrature(x0, k)
            identity_ok &= (
                math.isclose(ball, result.ball_avg, abs_tol=QUADRATURE_TOLERANCE)
                and math.isclose(whole, result.integral, abs_tol=QUADRATURE_TOLERANCE)
                and ball <= 1.0 / k
                and whole - ball >= 0.25 - 1.0 / k
            )
    return (
        worst < defaults.bound and identity_ok,
        f"max |value - integral| {worst:.2e} over {defaults.n_centers} centres at k={defaults.k}, "
        f"identity example ok: {identity_ok}",
    )


@dataclass(slots=True, frozen=True)
class Criterion:
    number: int
    title: str
    suite: Suite
    check: Callable[[HarnessConfig, int], tuple[bool, str]]


CRITERIA: tuple[Criterion, ...] = (
    Criterion(
        1,
        "single-symbol stdiff equals frequency",
        Suite.EXACT,
        lambda h, _: check_single_symbol_exactness(h),
    ),
    Criterion(
        2, "pathological checkpoints", Suite.EXACT, lambda h, _: check_pathological_checkpoints()
    ),
    Criterion(3, "xi mean oracle", Suite.EXACT, lambda h, _: check_xi_mean()),
    Criterion(4, "normality tail bound", Suite.EXACT, lambda h, _: check_normality_tail(h)),
    Criterion(
        5, "golden-mean gauge sandwich", Suite.EXACT, lambda h, _: check_golden_mean_gauge()
    ),
    Criterion(6, "full-shift gauge gap", Suite.EXACT, lambda h, _: check_full_shift_gap()),
    Criterion(7, "fixed-centre convergence", Suite.MONTECARLO, _fixed_center_check),
    Criterion(8, "random-centre convergence", Suite.MONTECARLO, _random_center_check),
    Criterion(9, "rotation balls", Suite.MONTECARLO, lambda h, _: check_rotation(h)),
    Criterion(
        10, "xi covariance at block distance", Suite.EXACT, lambda h, _: check_xi_covariance()
    ),
)


def run_suite(suite: Suite, harness: HarnessConfig, *, threads: int = 1) -> list[CriterionResult]:
    results = []
    for criterion in CRITERIA:
        if suite is not Suite.ALL and criterion.suite is not suite:
            continue
        started = time.perf_counter()
        passed, detail = criterion.check(harness, threads)
        elapsed = time.perf_counter() - started
        logger.info(
            "Criterion %d (%s): %s in %.2fs",
            criterion.number,
            criterion.title,
            "pass" if passed else "FAIL",
            elapsed,
        )
        results.append(CriterionResult(criterion.number, criterion.title, passed, detail, elapsed))
    return results


__all__ = [
    "CRITERIA",
    "Criterion",
    "CriterionResult",
    "Suite",
    "run_suite",
]
