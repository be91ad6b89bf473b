"""Spatial-temporal differentiation averages over rank-k cylinders.

``stdiff_value(m, x, k, f)`` is ``(1/k) sum_{i<k} alpha_{C_k(x)}(T^i f)`` where
``alpha_F(g) = (1/mu(F)) int_F g dmu`` and ``C_k(x)`` fixes coordinates
``0 .. k-1`` of ``x``. For a term ``c * T^n chi_[a]`` the conditional average at
shift ``i`` is the plain match indicator whenever ``[i+n, i+n+len(a))`` sits
inside ``[0, k)``; only the few boundary positions need a measure computation.
Series are therefore evaluated from per-term prefix match counts.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.core.errors import InsufficientWindow, ModelError, ZeroMeasureCylinder
from src.core.json_types import JsonObject, format_rational, rational_to_float
from src.core.measures import (
    BernoulliMeasure,
    MeasureModel,
    conditional_measure,
    word_measure,
)
from src.core.symbolic import CylinderFunction, PointWindow, ShiftedCylinderIndicator, Word

CSV_VERSION_LINE = "# ergolab-csv v1"
CSV_HEADER = ("k", "value_num", "value_den", "value_float")


@dataclass(slots=True, frozen=True)
class DiffSeries:
    """``k -> value`` entries of a differentiation sequence."""

    entries: tuple[tuple[int, Fraction | float], ...]
    function: str = ""
    provenance: str = ""

    def __post_init__(self) -> None:
        entries = tuple((int(k), v) for k, v in self.entries)
        object.__setattr__(self, "entries", entries)
        for (k_prev, _), (k_next, _) in zip(entries, entries[1:], strict=False):
            if k_next <= k_prev:
                raise ModelError(f"series keys must increase strictly: {k_prev} then {k_next}")
        for k, value in entries:
            if isinstance(value, float) and not math.isfinite(value):
                raise ModelError(f"non-finite series value at k={k}")

    @property
    def ks(self) -> list[int]:
        return [k for k, _ in self.entries]

    @property
    def values(self) -> list[Fraction | float]:
        return [v for _, v in self.entries]

    def value_at(self, k: int) -> Fraction | float:
        for key, value in self.entries:
            if key == k:
                return value
        raise KeyError(k)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        buffer.write(CSV_VERSION_LINE + "\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for k, value in self.entries:
            if isinstance(value, Fraction):
                writer.writerow(
                    [k, value.numerator, value.denominator, f"{rational_to_float(value):.12g}"]
                )
            else:
                writer.writerow([k, "", "", f"{value:.12g}"])
        return buffer.getvalue()

    @classmethod
    def from_csv(cls, text: str, *, function: str = "", provenance: str = "") -> DiffSeries:
        lines = text.splitlines()
        if not lines or lines[0].strip() != CSV_VERSION_LINE:
            raise ModelError(f"missing '{CSV_VERSION_LINE}' header line")
        reader = csv.DictReader(lines[1:])
        entries: list[tuple[int, Fraction | float]] = []
        for row in reader:
            if row["value_num"]:
                entries.append(
                    (int(row["k"]), Fraction(int(row["value_num"]), int(row["value_den"])))
                )
            else:
                entries.append((int(row["k"]), float(row["value_float"])))
        return cls(tuple(entries), function, provenance)

    def to_dict(self) -> JsonObject:
        return {
            "function": self.function,
            "provenance": self.provenance,
            "entries": [
                {"k": k, "value": format_rational(v) if isinstance(v, Fraction) else v}
                for k, v in self.entries
            ],
        }


class FrequencyCap(StrEnum):
    """Upper limit of the start index when counting word occurrences."""

    TO_K_MINUS_L = "to_k_minus_l"
    TO_K_MINUS_ONE = "to_k_minus_one"


def _match_prefix(x: PointWindow, word: Word) -> np.ndarray:
    """Prefix counts of occurrences of ``word`` starting at ``x.lo + p``."""
    length = len(word)
    if len(x) < length:
        return np.zeros(1, dtype=np.int64)
    windows = sliding_window_view(x.symbols, length)
    matches = np.all(windows == np.asarray(word.symbols, dtype=np.int64), axis=1)
    return np.concatenate(([0], np.cumsum(matches, dtype=np.int64)))


def _count_occurrences(x: PointWindow, word: Word, first: int, last: int) -> int:
    """Occurrences of ``word`` starting at indices ``first .. last`` (inclusive)."""
    if last < first:
        return 0
    x.require(first, last + len(word))
    prefix = _match_prefix(x, word)
    return int(prefix[last - x.lo + 1] - prefix[first - x.lo])


def first_null_rank(m: MeasureModel, x: PointWindow) -> int | None:
    """Smallest ``k`` with ``mu(C_k(x)) = 0`` inside the window, if any."""
    if isinstance(m, BernoulliMeasure):
        return None
    block = x.block(0, x.hi)
    if block.size < 2:
        return None
    allowed = np.array([[value > 0 for value in row] for row in m.P], dtype=bool)
    ok = allowed[block[:-1], block[1:]]
    bad = np.flatnonzero(~ok)
    return int(bad[0]) + 2 if bad.size else None


class _TermScanner:
    """Streaming evaluation of ``sum_{i<k} alpha_{C_k(x)}(T^i T^n chi_[a])`` for one term."""

    def __init__(self, m: MeasureModel, x: PointWindow, indicator: ShiftedCylinderIndicator):
        self.m = m
        self.x = x
        self.indicator = indicator
        self.length = len(indicator.word)
        self.prefix = _match_prefix(x, indicator.word)

    def matches(self, first: int, last: int) -> int:
        if last < first:
            return 0
        base = self.x.lo
        return int(self.prefix[last - base + 1] - self.prefix[first - base])

    def _full_range(self, k: int) -> tuple[int, int]:
        n = self.indicator.offset
        return max(n, 0), min(n + k - 1, k - self.length)

    def conditional(self, k: int, i: int) -> Fraction:
        p = i + self.indicator.offset
        if 0 <= p and p + self.length <= k:
            return Fraction(self.matches(p, p))
        return conditional_measure(
            self.m, 0, self.x.block(0, k), self.indicator.constraints(at=i)
        )

    def total(self, k: int) -> Fraction:
        n = self.indicator.offset
        first, last = self._full_range(k)
        if last < first:
            boundary = range(n, n + k)
            inner = 0
        else:
            boundary = [*range(n, first), *range(last + 1, n + k)]
            inner = self.matches(first, last)
        block = self.x.block(0, k)
        result = Fraction(inner)
        for p in boundary:
            result += conditional_measure(
                self.m, 0, block, self.indicator.constraints(at=p - n)
            )
        return result


def _prepare(m: MeasureModel, x: PointWindow, k_max: int, f: CylinderFunction) -> None:
    if k_max < 1:
        raise ModelError(f"k must be at least 1, got {k_max}")
    f.check_alphabet(m.alphabet)
    x.check_alphabet(m.alphabet)
    x.require(0, k_max)


def _check_rank(m: MeasureModel, x: PointWindow, k: int, null_rank: int | None) -> None:
    if null_rank is not None and k >= null_rank:
        raise ZeroMeasureCylinder(
            f"mu(C_{k}(x)) = 0: transition {x.at(null_rank - 2)}->{x.at(null_rank - 1)} "
            f"at index {null_rank - 2} is forbidden"
        )


def conditional_average(
    m: MeasureModel, x: PointWindow, k: int, i: int, ind: ShiftedCylinderIndicator
) -> Fraction:
    """``mu(C_k(x) & T^-i S) / mu(C_k(x))`` for the indicator's cylinder ``S``."""
    if not 0 <= i < k:
        raise ModelError(f"shift i={i} outside [0, {k})")
    _prepare(m, x, k, CylinderFunction(((Fraction(1), ind),)))
    _check_rank(m, x, k, first_null_rank(m, x))
    return conditional_measure(m, 0, x.block(0, k), ind.constraints(at=i))


def stdiff_value(m: MeasureModel, x: PointWindow, k: int, f: CylinderFunction) -> Fraction:
    """``(1/k) sum_{i<k} alpha_{C_k(x)}(T^i f)``."""
    return stdiff_series(m, x, [k], f).entries[0][1]  # type: ignore[return-value]


def stdiff_series(
    m: MeasureModel, x: PointWindow, ks: Sequence[int], f: CylinderFunction
) -> DiffSeries:
    if not ks:
        return DiffSeries((), f.describe(), x.provenance)
    _prepare(m, x, max(ks), f)
    null_rank = first_null_rank(m, x)
    scanners = [(c, _TermScanner(m, x, ind)) for c, ind in f.terms]
    entries: list[tuple[int, Fraction | float]] = []
    for k in ks:
        if k < 1:
            raise ModelError(f"k must be at least 1, got {k}")
        _check_rank(m, x, k, null_rank)
        total = sum((c * scanner.total(k) for c, scanner in scanners), Fraction(0))
        entries.append((k, total / k))
    return DiffSeries(tuple(entries), f.describe(), x.provenance)


def birkhoff_value(x: PointWindow, k: int, f: CylinderFunction) -> Fraction:
    """Pointwise temporal average ``(1/k) sum_{i<k} f(T^i x)``."""
    if k < 1:
        raise ModelError(f"k must be at least 1, got {k}")
    total = Fraction(0)
    for coefficient, indicator in f.terms:
        n = indicator.offset
        total += coefficient * _count_occurrences(x, indicator.word, n, n + k - 1)
    return total / k


def pointwise_gap(m: MeasureModel, x: PointWindow, k: int, f: CylinderFunction) -> Fraction:
    """``(1/k) sum_{i<k} |f(T^i x) - alpha_{C_k(x)}(T^i f)|``."""
    _prepare(m, x, k, f)
    lo, hi = f.dependence_window()
    x.require(min(lo, 0), k - 1 + hi)
    _check_rank(m, x, k, first_null_rank(m, x))
    scanners = [(c, _TermScanner(m, x, ind)) for c, ind in f.terms]
    total = Fraction(0)
    for i in range(k):
        pointwise = Fraction(0)
        averaged = Fraction(0)
        for c, scanner in scanners:
            p = i + scanner.indicator.offset
            pointwise += c * scanner.matches(p, p)
            averaged += c * scanner.conditional(k, i)
        total += abs(pointwise - averaged)
    return total / k


def frequency(x: PointWindow, a: Word, k: int, cap: FrequencyCap) -> Fraction:
    """Occurrences of ``a`` starting in ``[0, k-len(a)]`` or ``[0, k-1]``, over ``k``.

    The ``TO_K_MINUS_ONE`` cap needs the window to reach index ``k+len(a)-2``.
    """
    if k < 1:
        raise ModelError(f"k must be at least 1, got {k}")
    length = len(a)
    if cap is FrequencyCap.TO_K_MINUS_L:
        needed_hi, last = k, k - length
    else:
        needed_hi, last = k + length - 1, k - 1
    if not x.covers(0, needed_hi):
        raise InsufficientWindow(
            f"frequency of a length-{length} word up to k={k} ({cap.value}) needs "
            f"[0, {needed_hi}), window is [{x.lo}, {x.hi})"
        )
    return Fraction(_count_occurrences(x, a, 0, last), k)


def frequency_series(
    x: PointWindow, a: Word, ks: Sequence[int], cap: FrequencyCap
) -> DiffSeries:
    return DiffSeries(
        tuple((k, frequency(x, a, k, cap)) for k in ks),
        f"freq[{a}] ({cap.value})",
        x.provenance,
    )


@dataclass(slots=True, frozen=True)
class NormalityRow:
    word: Word
    frequency: Fraction
    measure: Fraction

    @property
    def deviation(self) -> Fraction:
        return abs(self.frequency - self.measure)

    def to_dict(self) -> JsonObject:
        return {
            "word": list(self.word.symbols),
            "frequency": format_rational(self.frequency),
            "measure": format_rational(self.measure),
            "deviation": format_rational(self.deviation),
            "deviation_float": rational_to_float(self.deviation),
        }


@dataclass(slots=True, frozen=True)
class NormalityReport:
    k: int
    max_word_len: int
    rows: tuple[NormalityRow, ...]

    @property
    def max_deviation(self) -> Fraction:
        return max((row.deviation for row in self.rows), default=Fraction(0))

    def to_dict(self) -> JsonObject:
        return {
            "k": self.k,
            "max_word_len": self.max_word_len,
            "max_deviation": format_rational(self.max_deviation),
            "max_deviation_float": rational_to_float(self.max_deviation),
            "rows": [row.to_dict() for row in self.rows],
        }


def normality_report(
    m: MeasureModel, x: PointWindow, max_word_len: int, k: int
) -> NormalityReport:
    """Empirical frequency against ``mu([word])`` for every word of length ``<= L``."""
    if max_word_len < 1:
        raise ModelError(f"max_word_len must be at least 1, got {max_word_len}")
    x.check_alphabet(m.alphabet)
    if not x.covers(0, k + max_word_len - 1):
        raise InsufficientWindow(
            f"normality report up to k={k}, L={max_word_len} needs "
            f"[0, {k + max_word_len - 1}), window is [{x.lo}, {x.hi})"
        )
    rows = tuple(
        NormalityRow(
            word, frequency(x, word, k, FrequencyCap.TO_K_MINUS_ONE), word_measure(m, word)
        )
        for length in range(1, max_word_len + 1)
        for word in m.alphabet.words(length)
    )
    return NormalityReport(k, max_word_len, rows)


__all__ = [
    "CSV_HEADER",
    "CSV_VERSION_LINE",
    "DiffSeries",
    "FrequencyCap",
    "NormalityReport",
    "NormalityRow",
    "birkhoff_value",
    "conditional_average",
    "first_null_rank",
    "frequency",
    "frequency_series",
    "normality_report",
    "pointwise_gap",
    "stdiff_series",
    "stdiff_value",
]
