"""Alphabets, words, shifted cylinder indicators and cylinder functions.

A cylinder function is a finite linear combination ``sum c * T^n chi_[a]`` of
shifted cylinder indicators. ``T^n chi_[a]`` is the indicator of the set of
points whose coordinates ``n .. n+len(a)-1`` spell ``a``. Finite combinations
of these are dense in the continuous functions on a subshift, so every
symbolic experiment in ergolab is phrased in terms of them.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from src.core.errors import InsufficientWindow, ModelError
from src.core.json_types import JsonObject, format_rational, parse_rational


@dataclass(slots=True, frozen=True)
class Alphabet:
    """Symbols ``0 .. size-1``."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 2:
            raise ModelError(f"alphabet size must be at least 2, got {self.size}")

    def words(self, length: int) -> Iterator[Word]:
        """All words of ``length`` in lexicographic order."""
        for symbols in product(range(self.size), repeat=length):
            yield Word(symbols)

    def check_symbols(self, symbols: Iterable[int]) -> None:
        for symbol in symbols:
            if not 0 <= symbol < self.size:
                raise ModelError(f"symbol {symbol} outside alphabet of size {self.size}")


@dataclass(slots=True, frozen=True, order=True)
class Word:
    """A nonempty finite block of symbols."""

    symbols: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        if not self.symbols:
            raise ModelError("words must be nonempty")
        if any(s < 0 for s in self.symbols):
            raise ModelError(f"negative symbol in word {self.symbols}")

    @classmethod
    def of(cls, *symbols: int) -> Word:
        return cls(tuple(symbols))

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[int]:
        return iter(self.symbols)

    def __getitem__(self, index: int) -> int:
        return self.symbols[index]

    def __add__(self, other: Word) -> Word:
        return Word(self.symbols + other.symbols)

    def __str__(self) -> str:
        if max(self.symbols) < 10:
            return "".join(str(s) for s in self.symbols)
        return str(list(self.symbols))


@dataclass(slots=True, frozen=True, order=True)
class ShiftedCylinderIndicator:
    """``T^offset chi_[word]``: constrains coordinates ``[offset, offset + len(word))``."""

    offset: int
    word: Word

    @property
    def window(self) -> tuple[int, int]:
        return self.offset, self.offset + len(self.word)

    def constraints(self, at: int = 0) -> dict[int, int]:
        """Index-to-symbol map of this indicator evaluated at ``T^at x``."""
        start = at + self.offset
        return {start + j: s for j, s in enumerate(self.word)}

    def shifted(self, n: int) -> ShiftedCylinderIndicator:
        return ShiftedCylinderIndicator(self.offset + n, self.word)


type Term = tuple[Fraction, ShiftedCylinderIndicator]


@dataclass(slots=True, frozen=True)
class CylinderFunction:
    """Canonical finite combination of shifted cylinder indicators.

    Canonical form: at most one term per ``(offset, word)``, no zero
    coefficients, terms sorted by indicator.
    """

    terms: tuple[Term, ...] = field(default=())

    def __post_init__(self) -> None:
        merged: dict[ShiftedCylinderIndicator, Fraction] = {}
        for coefficient, indicator in self.terms:
            merged[indicator] = merged.get(indicator, Fraction(0)) + Fraction(coefficient)
        canonical = tuple(
            (coefficient, indicator)
            for indicator, coefficient in sorted(merged.items())
            if coefficient != 0
        )
        object.__setattr__(self, "terms", canonical)

    @classmethod
    def indicator(cls, word: Word | Sequence[int], offset: int = 0) -> CylinderFunction:
        word = word if isinstance(word, Word) else Word(tuple(word))
        return cls(((Fraction(1), ShiftedCylinderIndicator(offset, word)),))

    @classmethod
    def constant(cls, alphabet: Alphabet, value: Fraction | int = 1) -> CylinderFunction:
        """``value * sum_d chi_[d]``."""
        return cls(
            tuple(
                (Fraction(value), ShiftedCylinderIndicator(0, Word((d,))))
                for d in range(alphabet.size)
            )
        )

    def __add__(self, other: CylinderFunction) -> CylinderFunction:
        return CylinderFunction(self.terms + other.terms)

    def __sub__(self, other: CylinderFunction) -> CylinderFunction:
        return self + other.scaled(-1)

    def scaled(self, factor: Fraction | int) -> CylinderFunction:
        factor = Fraction(factor)
        return CylinderFunction(tuple((c * factor, ind) for c, ind in self.terms))

    def shift(self, n: int) -> CylinderFunction:
        """``T^n f``."""
        return CylinderFunction(tuple((c, ind.shifted(n)) for c, ind in self.terms))

    def sup_norm_bound(self) -> Fraction:
        return sum((abs(c) for c, _ in self.terms), Fraction(0))

    def dependence_window(self) -> tuple[int, int]:
        """Smallest ``[lo, hi)`` containing every constrained coordinate."""
        if not self.terms:
            return 0, 0
        return (
            min(ind.offset for _, ind in self.terms),
            max(ind.offset + len(ind.word) for _, ind in self.terms),
        )

    def max_symbol(self) -> int:
        return max((max(ind.word.symbols) for _, ind in self.terms), default=0)

    def check_alphabet(self, alphabet: Alphabet) -> None:
        for _, indicator in self.terms:
            alphabet.check_symbols(indicator.word)

    def evaluate_word(self, symbols: Sequence[int], origin: int = 0) -> Fraction:
        """Value of ``f`` at a point whose coordinate 0 sits at ``symbols[origin]``."""
        total = Fraction(0)
        for coefficient, indicator in self.terms:
            start = origin + indicator.offset
            if start < 0 or start + len(indicator.word) > len(symbols):
                raise InsufficientWindow(
                    f"block of length {len(symbols)} does not cover {indicator.window} "
                    f"relative to origin {origin}"
                )
            if all(symbols[start + j] == s for j, s in enumerate(indicator.word)):
                total += coefficient
        return total

    def to_dict(self) -> JsonObject:
        return {
            "terms": [
                {
                    "coef": format_rational(coefficient),
                    "offset": indicator.offset,
                    "word": list(indicator.word.symbols),
                }
                for coefficient, indicator in self.terms
            ]
        }

    @classmethod
    def from_dict(cls, data: JsonObject, *, key: str = "function") -> CylinderFunction:
        raw_terms = data.get("terms")
        if not isinstance(raw_terms, list) or not raw_terms:
            raise ModelError(f"{key}.terms: expected a nonempty list of terms")
        terms: list[Term] = []
        for index, raw in enumerate(raw_terms):
            term_key = f"{key}.terms[{index}]"
            if not isinstance(raw, dict):
                raise ModelError(f"{term_key}: expected an object")
            word = raw.get("word")
            if not isinstance(word, list) or not all(isinstance(s, int) for s in word):
                raise ModelError(f"{term_key}.word: expected a list of symbol indices")
            offset = raw.get("offset", 0)
            if not isinstance(offset, int) or isinstance(offset, bool):
                raise ModelError(f"{term_key}.offset: expected an integer")
            coefficient = parse_rational(raw.get("coef", "1"), key=f"{term_key}.coef")
            terms.append((coefficient, ShiftedCylinderIndicator(offset, Word(tuple(word)))))
        return cls(tuple(terms))

    def describe(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for coefficient, indicator in self.terms:
            shift = f"T^{indicator.offset} " if indicator.offset else ""
            parts.append(f"{format_rational(coefficient)}*{shift}chi[{indicator.word}]")
        return " + ".join(parts)


@dataclass(slots=True, frozen=True, eq=False)
class PointWindow:
    """Coordinates ``lo .. hi-1`` of a two-sided shift point."""

    lo: int
    hi: int
    symbols: np.ndarray
    provenance: str = "explicit"

    def __post_init__(self) -> None:
        array = np.asarray(self.symbols, dtype=np.int64)
        if array.ndim != 1:
            raise ModelError("point symbols must be one-dimensional")
        if self.hi <= self.lo:
            raise ModelError(f"empty point window [{self.lo}, {self.hi})")
        if array.shape[0] != self.hi - self.lo:
            raise ModelError(
                f"window [{self.lo}, {self.hi}) needs {self.hi - self.lo} symbols, "
                f"got {array.shape[0]}"
            )
        if array.size and array.min() < 0:
            raise ModelError("negative symbol in point window")
        array = array.copy()
        array.flags.writeable = False
        object.__setattr__(self, "symbols", array)

    @classmethod
    def from_symbols(
        cls, symbols: Sequence[int], *, lo: int = 0, provenance: str = "explicit"
    ) -> PointWindow:
        return cls(lo, lo + len(symbols), np.asarray(symbols, dtype=np.int64), provenance)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointWindow):
            return NotImplemented
        return (
            self.lo == other.lo
            and self.hi == other.hi
            and self.provenance == other.provenance
            and bool(np.array_equal(self.symbols, other.symbols))
        )

    def __hash__(self) -> int:
        return hash((self.lo, self.hi, self.provenance, self.symbols.tobytes()))

    def __len__(self) -> int:
        return self.hi - self.lo

    def at(self, index: int) -> int:
        if not self.lo <= index < self.hi:
            raise InsufficientWindow(f"index {index} outside window [{self.lo}, {self.hi})")
        return int(self.symbols[index - self.lo])

    def covers(self, lo: int, hi: int) -> bool:
        return self.lo <= lo and hi <= self.hi

    def require(self, lo: int, hi: int) -> None:
        if not self.covers(lo, hi):
            raise InsufficientWindow(
                f"window [{self.lo}, {self.hi}) does not cover [{lo}, {hi})"
            )

    def block(self, lo: int, hi: int) -> np.ndarray:
        """Symbols on ``[lo, hi)``."""
        self.require(lo, hi)
        return self.symbols[lo - self.lo : hi - self.lo]

    def check_alphabet(self, alphabet: Alphabet) -> None:
        if self.symbols.size and int(self.symbols.max()) >= alphabet.size:
            raise ModelError(
                f"point symbol {int(self.symbols.max())} outside alphabet of size {alphabet.size}"
            )

    def to_dict(self) -> JsonObject:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "symbols": [int(s) for s in self.symbols],
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, data: JsonObject, *, key: str = "point") -> PointWindow:
        lo, hi, symbols = data.get("lo", 0), data.get("hi"), data.get("symbols")
        if not isinstance(symbols, list) or not all(isinstance(s, int) for s in symbols):
            raise ModelError(f"{key}.symbols: expected a list of symbol indices")
        if not isinstance(lo, int):
            raise ModelError(f"{key}.lo: expected an integer")
        if hi is None:
            hi = lo + len(symbols)
        if not isinstance(hi, int):
            raise ModelError(f"{key}.hi: expected an integer")
        provenance = str(data.get("provenance", "explicit"))
        return cls(lo, hi, np.asarray(symbols, dtype=np.int64), provenance)


def evaluate(f: CylinderFunction, x: PointWindow, at: int = 0) -> Fraction:
    """``f(T^at x)``; the window must cover every coordinate ``f`` reads."""
    if not f.terms:
        return Fraction(0)
    lo, hi = f.dependence_window()
    block = x.block(at + lo, at + hi)
    return f.evaluate_word(block.tolist(), origin=-lo)


__all__ = [
    "Alphabet",
    "CylinderFunction",
    "PointWindow",
    "ShiftedCylinderIndicator",
    "Term",
    "Word",
    "evaluate",
]
