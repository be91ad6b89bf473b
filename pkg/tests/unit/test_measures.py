"""Tests for exact Bernoulli and Markov measures."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.core.ergodic_opt import SFT
from src.core.errors import ConfigError, ModelError
from src.core.measures import (
    BernoulliMeasure,
    MarkovMeasure,
    conditional_measure,
    constraint_merge_measure,
    integral,
    max_entropy_markov,
    measure_from_json,
    measure_to_json,
    merge_constraints,
    stationary_vector,
    supported_on,
    word_measure,
)
from src.core.symbolic import CylinderFunction, Word

HALF = Fraction(1, 2)
BIASED_2 = BernoulliMeasure((Fraction(1, 3), Fraction(2, 3)))
BIASED_3 = BernoulliMeasure((Fraction(1, 6), Fraction(1, 3), Fraction(1, 2)))
CHAIN_2 = MarkovMeasure(((HALF, HALF), (Fraction(1, 3), Fraction(2, 3))))
CHAIN_3 = MarkovMeasure(
    (
        (Fraction(1, 4), Fraction(3, 4), Fraction(0)),
        (Fraction(0), Fraction(1, 3), Fraction(2, 3)),
        (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)),
    )
)

ternary_words = st.lists(st.integers(min_value=0, max_value=2), min_size=1, max_size=6).map(
    lambda symbols: Word(tuple(symbols))
)


class TestMeasureValidation:
    """Tests for measure construction checks."""

    def test_bernoulli_needs_positive_entries(self):
        with pytest.raises(ModelError, match="strictly positive"):
            BernoulliMeasure((Fraction(0), Fraction(1)))

    def test_bernoulli_needs_unit_sum(self):
        with pytest.raises(ModelError, match="sum to 1"):
            BernoulliMeasure((Fraction(1, 3), Fraction(1, 3)))

    def test_markov_row_sum(self):
        with pytest.raises(ModelError, match="row 1"):
            MarkovMeasure(((HALF, HALF), (HALF, Fraction(1, 3))))

    def test_markov_reducible_rejected(self):
        with pytest.raises(ModelError, match="reducible"):
            MarkovMeasure(((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))))

    def test_markov_wrong_pi_rejected(self):
        with pytest.raises(ModelError, match="stationary"):
            MarkovMeasure(((HALF, HALF), (HALF, HALF)), pi=(Fraction(1, 3), Fraction(2, 3)))


class TestStationaryVector:
    """Tests for the exact stationary solver."""

    def test_two_state_chain(self, markov2):
        assert markov2.pi == (Fraction(2, 5), Fraction(3, 5))

    def test_golden_chain(self, golden_markov):
        assert golden_markov.pi == (Fraction(2, 3), Fraction(1, 3))

    def test_three_state_cycle_is_uniform(self):
        zero, one = Fraction(0), Fraction(1)
        matrix = ((zero, one, zero), (zero, zero, one), (one, zero, zero))
        assert stationary_vector(matrix) == (Fraction(1, 3),) * 3

    @given(
        st.lists(
            st.lists(st.integers(min_value=1, max_value=9), min_size=3, max_size=3),
            min_size=3,
            max_size=3,
        )
    )
    def test_solution_is_stationary(self, weights):
        matrix = tuple(tuple(Fraction(w, sum(row)) for w in row) for row in weights)
        pi = stationary_vector(matrix)
        assert sum(pi) == 1
        for e in range(3):
            assert sum(pi[d] * matrix[d][e] for d in range(3)) == pi[e]


class TestWordMeasures:
    """Tests for cylinder and constraint measures."""

    def test_bernoulli_word(self, biased2):
        assert word_measure(biased2, Word.of(0, 1, 1)) == Fraction(4, 27)

    def test_markov_word(self, markov2):
        assert word_measure(markov2, Word.of(0, 1)) == Fraction(1, 5)

    def test_symbol_outside_alphabet(self, uniform2):
        with pytest.raises(ModelError):
            word_measure(uniform2, Word.of(2))

    def test_merge_constraints_conflict(self):
        assert merge_constraints([(0, Word.of(0, 1)), (1, Word.of(0))]) is None
        assert merge_constraints([(0, Word.of(0, 1)), (1, Word.of(1, 0))]) == {0: 0, 1: 1, 2: 0}

    def test_conflicting_constraints_have_measure_zero(self, uniform2):
        assert constraint_merge_measure(uniform2, [(0, Word.of(0)), (0, Word.of(1))]) == 0

    def test_markov_gap_uses_matrix_power(self, markov2):
        value = constraint_merge_measure(markov2, [(0, Word.of(0)), (2, Word.of(0))])
        assert value == Fraction(2, 5) * Fraction(5, 12)

    def test_markov_matrix_power(self, markov2):
        assert markov2.power(0) == ((1, 0), (0, 1))
        assert markov2.power(2)[0][0] == Fraction(5, 12)

    def test_integral_is_shift_invariant(self, markov2):
        f = CylinderFunction.indicator([0, 1])
        assert integral(markov2, f) == integral(markov2, f.shift(5)) == Fraction(1, 5)


class TestMeasureInvariants:
    """Identities every word measure must satisfy."""

    @given(ternary_words, ternary_words)
    def test_bernoulli_concatenation_is_multiplicative(self, a, b):
        assert word_measure(BIASED_3, a + b) == word_measure(BIASED_3, a) * word_measure(
            BIASED_3, b
        )

    @pytest.mark.parametrize("k", range(1, 11))
    def test_binary_words_sum_to_one(self, k):
        for m in (BIASED_2, CHAIN_2):
            assert sum(word_measure(m, w) for w in m.alphabet.words(k)) == 1

    @pytest.mark.parametrize("k", range(1, 7))
    def test_ternary_words_sum_to_one(self, k):
        for m in (BIASED_3, CHAIN_3):
            assert sum(word_measure(m, w) for w in m.alphabet.words(k)) == 1

    @given(ternary_words, st.integers(min_value=-6, max_value=6))
    def test_single_constraint_is_word_measure(self, a, offset):
        for m in (BIASED_3, CHAIN_3):
            assert constraint_merge_measure(m, [(offset, a)]) == word_measure(m, a)

    def test_overlapping_constraints_example(self, uniform2):
        constraints = [(0, Word.of(0, 1)), (1, Word.of(1))]
        assert constraint_merge_measure(uniform2, constraints) == Fraction(1, 4)

    def test_gapped_constraints_example(self, uniform2):
        constraints = [(0, Word.of(0)), (2, Word.of(0))]
        assert constraint_merge_measure(uniform2, constraints) == Fraction(1, 4)


class TestConditionalMeasure:
    """Tests for conditioning on a cylinder."""

    def test_bernoulli_outside_is_independent(self, biased2):
        assert conditional_measure(biased2, 0, [0, 1], {5: 1, -2: 0}) == Fraction(2, 9)

    def test_inside_mismatch_is_zero(self, biased2):
        assert conditional_measure(biased2, 0, [0, 1], {1: 0}) == 0

    def test_markov_forward(self, markov2):
        assert conditional_measure(markov2, 0, [0], {1: 1}) == HALF
        assert conditional_measure(markov2, 0, [0], {2: 0}) == Fraction(5, 12)

    def test_markov_backward_uses_reversed_chain(self, markov2):
        assert conditional_measure(markov2, 0, [0], {-1: 1}) == HALF

    @given(
        st.lists(st.integers(min_value=0, max_value=1), min_size=1, max_size=5),
        st.integers(min_value=-4, max_value=8),
    )
    def test_conditionals_sum_to_one(self, block, index):
        chain = MarkovMeasure(((HALF, HALF), (Fraction(1, 3), Fraction(2, 3))))
        total = sum(conditional_measure(chain, 0, block, {index: d}) for d in (0, 1))
        assert total == 1


class TestMaxEntropyAndSupport:
    """Tests for the rationalised maximal-entropy chain."""

    def test_golden_mean_chain(self):
        chain = max_entropy_markov(SFT.golden_mean().allowed)
        assert chain.P[1] == (Fraction(1), Fraction(0))
        expected = (5 - 5**0.5) / 10
        value = integral(chain, CylinderFunction.indicator([1]))
        assert abs(float(value) - expected) < 1e-5

    def test_supported_on(self, golden_markov, uniform2):
        allowed = SFT.golden_mean().allowed
        assert supported_on(golden_markov, allowed)
        assert not supported_on(uniform2, allowed)

    def test_symbol_without_successor(self):
        with pytest.raises(ModelError, match="no allowed successor"):
            max_entropy_markov(((True, True), (False, False)))


class TestMeasureJson:
    """Tests for measure payload parsing."""

    def test_round_trip(self, markov2):
        assert measure_from_json(measure_to_json(markov2)) == markov2

    def test_float_probability_rejected_with_key(self):
        with pytest.raises(ConfigError, match=r"measure\.p\[0\]"):
            measure_from_json({"type": "bernoulli", "p": [0.5, "1/2"]})

    def test_unknown_type(self):
        with pytest.raises(ModelError, match=r"measure\.type"):
            measure_from_json({"type": "gaussian"})

    def test_invalid_matrix_names_key(self):
        with pytest.raises(ModelError, match=r"m\.P"):
            measure_from_json({"type": "markov", "P": [["1/2", "1/4"], ["1", "0"]]}, key="m")
