"""Tests for SFT recoding, finite-horizon gauges and maximum mean cycles."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.core.ergodic_opt import (
    SFT,
    finite_gauge,
    finite_gauge_bruteforce,
    gauge_gap,
    gauge_series,
    max_mean_cycle,
    max_mean_cycle_bruteforce,
    nonnegative_shift,
    open_set_witness,
    parse_edge_list,
    transition_graph,
)
from src.core.errors import ComplexityGuard, EmptySFT, ModelError
from src.core.measures import integral
from src.core.symbolic import Alphabet, CylinderFunction, Word

CHI_0 = CylinderFunction.indicator([0])
CHI_1 = CylinderFunction.indicator([1])

FUNCTIONS = (
    CHI_1,
    CylinderFunction.indicator([0, 1]).scaled(2) - CHI_1,
    CylinderFunction.indicator([1, 0, 0], offset=-1) + CHI_0.scaled(Fraction(1, 3)),
)


@st.composite
def small_shifts(draw):
    """A random SFT on 2 or 3 symbols with a function of window at most 2 on it."""
    size = draw(st.integers(min_value=2, max_value=3))
    cells = draw(st.lists(st.booleans(), min_size=size * size, max_size=size * size))
    # a fixed point at 0 keeps the shift nonempty
    allowed = tuple(
        tuple(i == j == 0 or cells[i * size + j] for j in range(size)) for i in range(size)
    )
    symbol = st.integers(min_value=0, max_value=size - 1)
    cylinders = st.one_of(
        st.tuples(st.integers(min_value=0, max_value=1), symbol.map(lambda d: (d,))),
        st.tuples(st.just(0), st.tuples(symbol, symbol)),
    )
    coefficients = draw(
        st.dictionaries(
            cylinders,
            st.integers(min_value=-3, max_value=3).filter(bool),
            min_size=1,
            max_size=4,
        )
    )
    f = sum(
        (
            CylinderFunction.indicator(word, offset).scaled(c)
            for (offset, word), c in coefficients.items()
        ),
        CylinderFunction(),
    )
    return SFT(Alphabet(size), allowed), f


class TestSFT:
    """Tests for SFT validation and admissibility."""

    def test_golden_mean(self):
        sft = SFT.golden_mean()
        assert sft.is_admissible([0, 1, 0, 1])
        assert not sft.is_admissible([0, 1, 1])
        assert list(sft.admissible_blocks(2)) == [(0, 0), (0, 1), (1, 0)]

    def test_forbidden_words(self):
        sft = SFT(Alphabet(2), ((True, True), (True, True)), (Word.of(1, 1, 1),))
        assert sft.memory == 2
        assert sft.is_admissible([1, 1, 0, 1, 1])
        assert not sft.is_admissible([0, 1, 1, 1])

    def test_no_bi_infinite_point(self):
        with pytest.raises(EmptySFT):
            SFT(Alphabet(2), ((False, True), (False, False)))

    def test_matrix_shape(self):
        with pytest.raises(ModelError):
            SFT(Alphabet(2), ((True, True),))

    def test_enumeration_guard(self):
        with pytest.raises(ComplexityGuard):
            list(SFT.full_shift(10).admissible_blocks(8))

    def test_from_dict_round_trip(self):
        sft = SFT(Alphabet(3), ((True, True, False), (True, False, True), (True, True, True)))
        assert SFT.from_dict(sft.to_dict()) == sft

    def test_from_dict_names_key(self):
        with pytest.raises(ModelError, match="sft.alphabet"):
            SFT.from_dict({"alphabet": "two"})


class TestGauge:
    """Tests for Gamma_k values."""

    def test_golden_mean_closed_form(self):
        series = gauge_series(SFT.golden_mean(), CHI_1, 30)
        for k, value in series.entries:
            assert value == Fraction(math.ceil(k / 2), k)
        assert series.value(7) == Fraction(4, 7)
        assert series.subadditivity_violations() == []

    def test_golden_mean_cycle(self):
        series = gauge_series(SFT.golden_mean(), CHI_1, 10)
        assert series.mmc.value == Fraction(1, 2)
        assert set(series.mmc.cycle) == {(0,), (1,)}
        assert series.limit_estimate >= series.mmc.value

    def test_full_shift_constant_gauge(self):
        series = gauge_series(SFT.full_shift(2), CHI_0, 20)
        assert all(value == 1 for _, value in series.entries)

    @pytest.mark.parametrize("f", FUNCTIONS)
    @pytest.mark.parametrize(
        "sft",
        [
            SFT.golden_mean(),
            SFT.full_shift(2),
            SFT(Alphabet(2), ((True, True), (True, True)), (Word.of(1, 1, 1),)),
        ],
    )
    def test_dynamic_program_matches_bruteforce(self, sft, f):
        for k in range(1, 8):
            assert finite_gauge(sft, f, k) == finite_gauge_bruteforce(sft, f, k)

    def test_negative_function_is_shifted(self):
        f = CHI_1.scaled(-1)
        series = gauge_series(SFT.golden_mean(), f, 5)
        assert series.shift == 1
        assert all(value >= 0 for _, value in series.entries)

    def test_subadditivity(self):
        f = FUNCTIONS[2]
        series = gauge_series(SFT.full_shift(2), f, 24)
        assert series.subadditivity_violations() == []

    @pytest.mark.slow
    @settings(max_examples=60, deadline=None)
    @given(small_shifts())
    def test_random_shifts_are_subadditive(self, case):
        sft, f = case
        series = gauge_series(sft, f, 12)
        assert series.subadditivity_violations() == []
        assert all(value >= series.mmc.value for _, value in series.entries)

    @settings(max_examples=30, deadline=None)
    @given(small_shifts())
    def test_random_shifts_match_bruteforce(self, case):
        sft, f = case
        for k in range(1, 5):
            assert finite_gauge(sft, f, k) == finite_gauge_bruteforce(sft, f, k)

    def test_finite_gauge_value_carries_shift(self):
        f = CHI_1.scaled(-1)
        sft = SFT.golden_mean()
        shift = nonnegative_shift(transition_graph(sft, f))
        series = gauge_series(sft, f, 6)
        assert shift == series.shift == 1
        for k in range(1, 7):
            assert finite_gauge(sft, f, k) == series.value(k)
            assert finite_gauge(sft, f, k) - shift == 0


class TestMaxMeanCycle:
    """Tests for Karp's maximum cycle mean."""

    @pytest.mark.parametrize("f", FUNCTIONS)
    def test_matches_simple_cycle_enumeration(self, f):
        graph = transition_graph(SFT.full_shift(2), f)
        assert max_mean_cycle(graph).value == max_mean_cycle_bruteforce(graph)

    def test_witness_cycle_attains_mean(self):
        f = FUNCTIONS[1]
        graph = transition_graph(SFT.golden_mean(), f)
        result = max_mean_cycle(graph)
        weights = {(src, dst): w for src, dst, w in graph.edges}
        cycle = list(result.cycle)
        total = sum(
            (weights[(u, v)] for u, v in zip(cycle, cycle[1:] + cycle[:1], strict=True)),
            Fraction(0),
        )
        assert total / len(cycle) == result.value

    def test_gauge_converges_to_cycle_mean(self):
        f = FUNCTIONS[1]
        series = gauge_series(SFT.full_shift(2), f, 200)
        assert series.value(200) - series.mmc.value <= Fraction(1, 50)

    def test_edge_list_round_trip(self):
        graph = transition_graph(SFT.golden_mean(), FUNCTIONS[2])
        assert parse_edge_list(graph.export_edge_list()) == list(graph.edges)


class TestGaugeGap:
    """Tests for the gap between the gauge and the integral."""

    def test_full_shift_gap(self, uniform2):
        result = gauge_gap(uniform2, SFT.full_shift(2), CHI_0, 20)
        assert result.gap == Fraction(1, 2)
        assert result.certified_gap == Fraction(1, 2)
        assert result.certifies_non_unique_ergodicity

    def test_golden_mean_gap(self, golden_markov):
        result = gauge_gap(golden_markov, SFT.golden_mean(), CHI_1, 10)
        assert result.integral == Fraction(1, 3)
        assert result.gap == Fraction(1, 6)

    @pytest.mark.parametrize("f", FUNCTIONS)
    def test_gauge_dominates_integral(self, f, uniform2, biased2, markov2, golden_markov):
        full, golden = SFT.full_shift(2), SFT.golden_mean()
        for m, sft in ((uniform2, full), (biased2, full), (markov2, full), (golden_markov, golden)):
            shift = nonnegative_shift(transition_graph(sft, f))
            for k in range(1, 13):
                assert finite_gauge(sft, f, k) - shift >= integral(m, f)
            assert gauge_gap(m, sft, f, 12).gap >= 0

    def test_measure_must_live_on_sft(self, uniform2):
        with pytest.raises(ModelError, match="forbids"):
            gauge_gap(uniform2, SFT.golden_mean(), CHI_1, 5)

    def test_open_set_witness(self, golden_markov):
        witness = open_set_witness(golden_markov, SFT.golden_mean(), CHI_1, 2, Fraction(1, 3))
        assert witness.words == 2
        assert witness.measure == Fraction(2, 3)
        assert witness.alpha == Fraction(1, 2)

    def test_open_set_empty_level(self, golden_markov):
        witness = open_set_witness(golden_markov, SFT.golden_mean(), CHI_1, 4, Fraction(1))
        assert witness.measure == 0
        assert witness.alpha is None
