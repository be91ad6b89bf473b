"""Tests for estimator oracles, splitting and seeded Monte Carlo runs."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.core.errors import ComplexityGuard, ModelError
from src.core.mc_harness import (
    CenterMode,
    EstimatorSpec,
    KSchedule,
    ScheduleKind,
    TrialResult,
    centered_fourth_moment,
    fourth_moment_bound,
    run_fixed_center,
    run_random_centers,
    split_subsequences,
    split_values,
    summarize,
    xi_covariance,
    xi_mean_bruteforce,
)
from src.core.measures import BernoulliMeasure, word_measure
from src.core.symbolic import Word


class TestKSchedule:
    """Tests for k schedules."""

    def test_linear_and_quadratic(self):
        assert KSchedule(ScheduleKind.LINEAR, n_max=3).ks == (1, 2, 3)
        assert KSchedule(ScheduleKind.QUADRATIC, n_max=3).ks == (1, 4, 9)

    def test_explicit(self):
        schedule = KSchedule(ScheduleKind.EXPLICIT, values=(10, 100))
        assert schedule.ks == (10, 100)
        assert schedule.describe()["k_max"] == 100
        assert schedule.inverse_square_sum == pytest.approx(0.0101)

    @pytest.mark.parametrize("values", [(), (0, 5), (5, 5), (6, 2)])
    def test_explicit_validation(self, values):
        with pytest.raises(ModelError):
            KSchedule(ScheduleKind.EXPLICIT, values=values)

    def test_n_max_validation(self):
        with pytest.raises(ModelError):
            KSchedule(ScheduleKind.LINEAR, n_max=0)


class TestSplitting:
    """Tests for residue-class splitting."""

    def test_split(self):
        families = split_subsequences(7, 3)
        assert families.blocks == ((0, 3), (1, 4), (2, 5))
        assert families.remainder == (6,)

    @given(st.integers(min_value=0, max_value=200), st.integers(min_value=1, max_value=9))
    def test_partition(self, k, ell):
        families = split_subsequences(k, ell)
        indices = [i for block in families.blocks for i in block] + list(families.remainder)
        assert sorted(indices) == list(range(k))
        assert len(families.remainder) < ell
        for block in families.blocks:
            assert all(b - a == ell for a, b in zip(block, block[1:], strict=False))

    def test_split_values(self):
        blocks, rest = split_values(["a", "b", "c", "d", "e"], 2)
        assert blocks == [["a", "c"], ["b", "d"]]
        assert rest == ["e"]

    def test_bad_block_length(self):
        with pytest.raises(ModelError):
            split_subsequences(5, 0)


class TestExactOracles:
    """Tests for xi means, covariances and fourth moments."""

    @pytest.mark.parametrize("word", [Word.of(0), Word.of(1, 0), Word.of(0, 1, 1)])
    def test_mean_is_word_measure(self, biased2, word):
        target = word_measure(biased2, word)
        for k in range(1, 6):
            for i in range(k):
                assert xi_mean_bruteforce(biased2, k, i, word) == target

    def test_covariance_vanishes_at_block_distance(self, biased2):
        word = Word.of(0, 1)
        for i in range(6):
            for j in range(i + 2, 6):
                assert xi_covariance(biased2, 6, i, j, word) == 0

    def test_overlapping_covariance(self, uniform2):
        assert xi_covariance(uniform2, 3, 0, 1, Word.of(0, 0)) == Fraction(1, 16)

    def test_fourth_moment(self, uniform2):
        assert centered_fourth_moment(uniform2, 6, Word.of(0), 0) == 6
        assert fourth_moment_bound(6) == 96
        assert fourth_moment_bound(2, Fraction(1, 2)) == Fraction(1, 2)

    def test_fourth_moment_within_bound(self, biased2):
        word = Word.of(1, 0)
        for j in range(2):
            family = split_subsequences(8, 2).blocks[j]
            assert centered_fourth_moment(biased2, 8, word, j) <= fourth_moment_bound(len(family))

    def test_shift_out_of_range(self, uniform2):
        with pytest.raises(ModelError):
            xi_mean_bruteforce(uniform2, 3, 3, Word.of(0))

    def test_enumeration_guard(self):
        with pytest.raises(ComplexityGuard):
            xi_mean_bruteforce(BernoulliMeasure.uniform(3), 15, 0, Word.of(0))


class TestMonteCarloRuns:
    """Tests for seeded trial runs."""

    SPEC = EstimatorSpec(
        Word.of(0), CenterMode.FIXED_POINT, KSchedule(ScheduleKind.EXPLICIT, values=(10, 200))
    )

    def test_same_seed_same_trials(self, uniform2):
        first = run_fixed_center(uniform2, self.SPEC, 42, 4)
        second = run_fixed_center(uniform2, self.SPEC, 42, 4)
        assert first == second

    def test_threads_do_not_change_results(self, uniform2):
        serial = run_fixed_center(uniform2, self.SPEC, 9, 6, threads=1)
        pooled = run_fixed_center(uniform2, self.SPEC, 9, 6, threads=3)
        assert serial == pooled
        assert [t.trial for t in pooled] == list(range(6))

    def test_trial_values(self, uniform2):
        trial = run_fixed_center(uniform2, self.SPEC, 1, 1)[0]
        assert [k for k, _ in trial.values] == [10, 200]
        assert trial.target == Fraction(1, 2)
        assert trial.final_deviation == abs(trial.final_value - Fraction(1, 2))

    def test_random_centers(self, uniform2):
        spec = EstimatorSpec(
            Word.of(1), CenterMode.PER_K, KSchedule(ScheduleKind.LINEAR, n_max=20)
        )
        trials = run_random_centers(uniform2, spec, 3, 5, threads=2)
        assert len(trials) == 5
        assert all(0 <= value <= 1 for t in trials for _, value in t.values)
        assert [k for k, _ in trials[0].values] == list(range(1, 21))

    def test_random_centers_need_bernoulli(self, markov2):
        spec = EstimatorSpec(Word.of(1), CenterMode.PER_K, KSchedule(n_max=3))
        with pytest.raises(ModelError):
            run_random_centers(markov2, spec, 3, 2)

    def test_center_mode_is_checked(self, uniform2):
        spec = EstimatorSpec(Word.of(1), CenterMode.PER_K, KSchedule(n_max=3))
        with pytest.raises(ModelError):
            run_fixed_center(uniform2, spec, 3, 2)

    def test_markov_fixed_center(self, markov2):
        trials = run_fixed_center(markov2, self.SPEC, 5, 3)
        assert trials[0].target == Fraction(2, 5)

    def test_needs_a_trial(self, uniform2):
        with pytest.raises(ModelError):
            run_fixed_center(uniform2, self.SPEC, 1, 0)

    def test_fixed_center_converges(self, uniform2):
        spec = EstimatorSpec(
            Word.of(0),
            CenterMode.FIXED_POINT,
            KSchedule(ScheduleKind.EXPLICIT, values=(10, 2_000)),
        )
        summary = summarize(run_fixed_center(uniform2, spec, 2024, 20), spec, 0.05)
        assert summary.pass_fraction >= 0.9
        assert summary.within_standard_errors(5)


class TestSummary:
    """Tests for trial summaries."""

    def _trial(self, index, value):
        return TrialResult(index, 7, ((10, Fraction(value)),), Fraction(1, 2))

    def test_pass_fraction(self):
        spec = EstimatorSpec(Word.of(0))
        trials = [self._trial(0, "1/2"), self._trial(1, "3/5"), self._trial(2, "9/20")]
        summary = summarize(trials, spec, 0.06)
        assert summary.pass_fraction == pytest.approx(2 / 3)
        assert summary.mean_final == pytest.approx((0.5 + 0.6 + 0.45) / 3)
        assert summary.master_seed == 7
        assert summary.to_dict()["target"] == "1/2"

    def test_single_trial_has_zero_stderr(self):
        summary = summarize([self._trial(0, "1/2")], EstimatorSpec(Word.of(0)), 0.1)
        assert summary.stderr_final == 0.0

    def test_empty(self):
        with pytest.raises(ModelError):
            summarize([], EstimatorSpec(Word.of(0)), 0.1)

    def test_trial_to_dict(self):
        data = self._trial(3, "3/5").to_dict()
        assert data["final_value"] == "3/5"
        assert data["values"] == [[10, "3/5"]]
        assert data["final_deviation"] == pytest.approx(0.1)
