"""Exact Bernoulli and stationary Markov measures on two-sided shifts.

All arithmetic here is on ``fractions.Fraction``. Markov stationary vectors are
solved with the GTH elimination scheme (subtraction free, so it stays exact and
never divides by a cancelled zero) and then verified against ``pi P = pi``.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import networkx as nx
import numpy as np

from src.core.errors import ModelError
from src.core.json_types import JsonObject, format_rational, parse_rational
from src.core.symbolic import Alphabet, CylinderFunction, Word

logger = logging.getLogger(__name__)

type Matrix = tuple[tuple[Fraction, ...], ...]
type Constraint = tuple[int, Word]


@dataclass(slots=True, frozen=True)
class BernoulliMeasure:
    """i.i.d. coordinates with strictly positive probability vector ``p``."""

    p: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        p = tuple(Fraction(v) for v in self.p)
        object.__setattr__(self, "p", p)
        Alphabet(len(p))
        if any(v <= 0 for v in p):
            raise ModelError(f"Bernoulli probabilities must be strictly positive: {_fmt(p)}")
        if sum(p) != 1:
            raise ModelError(f"Bernoulli probabilities must sum to 1, got {sum(p)}")

    @classmethod
    def uniform(cls, size: int) -> BernoulliMeasure:
        return cls(tuple(Fraction(1, size) for _ in range(size)))

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(len(self.p))


@dataclass(slots=True, frozen=True)
class MarkovMeasure:
    """Stationary Markov chain with exact transition matrix ``P``.

    ``pi`` is solved at construction when omitted and checked otherwise.
    """

    P: Matrix
    pi: tuple[Fraction, ...] = field(default=())

    def __post_init__(self) -> None:
        matrix = tuple(tuple(Fraction(v) for v in row) for row in self.P)
        object.__setattr__(self, "P", matrix)
        size = len(matrix)
        Alphabet(size)
        for index, row in enumerate(matrix):
            if len(row) != size:
                raise ModelError(f"transition matrix row {index} has {len(row)} entries")
            if any(v < 0 for v in row):
                raise ModelError(f"transition matrix row {index} has a negative entry")
            if sum(row) != 1:
                raise ModelError(f"transition matrix row {index} sums to {sum(row)}, not 1")
        if not _is_irreducible(matrix):
            raise ModelError("transition matrix is reducible")

        pi = tuple(Fraction(v) for v in self.pi) if self.pi else stationary_vector(matrix)
        if len(pi) != size or sum(pi) != 1:
            raise ModelError("stationary vector must have one entry per symbol and sum to 1")
        for e in range(size):
            if sum(pi[d] * matrix[d][e] for d in range(size)) != pi[e]:
                raise ModelError(f"pi is not stationary at symbol {e}")
        object.__setattr__(self, "pi", pi)

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(len(self.P))

    def power(self, n: int) -> Matrix:
        return _matrix_power(self.P, n)


type MeasureModel = BernoulliMeasure | MarkovMeasure


def _fmt(values: Iterable[Fraction]) -> str:
    return "(" + ", ".join(format_rational(v) for v in values) + ")"


def _is_irreducible(matrix: Matrix) -> bool:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(len(matrix)))
    graph.add_edges_from(
        (d, e) for d, row in enumerate(matrix) for e, value in enumerate(row) if value > 0
    )
    return nx.is_strongly_connected(graph)


def stationary_vector(matrix: Matrix) -> tuple[Fraction, ...]:
    """Stationary distribution of an irreducible row-stochastic matrix (GTH)."""
    n = len(matrix)
    work = [list(row) for row in matrix]
    for k in range(n - 1, 0, -1):
        scale = sum(work[k][:k], Fraction(0))
        if scale == 0:
            raise ModelError("transition matrix is reducible")
        for i in range(k):
            work[i][k] /= scale
        for i in range(k):
            if work[i][k] == 0:
                continue
            for j in range(k):
                work[i][j] += work[i][k] * work[k][j]

    unnormalized = [Fraction(1)]
    for k in range(1, n):
        unnormalized.append(sum((unnormalized[i] * work[i][k] for i in range(k)), Fraction(0)))
    total = sum(unnormalized)
    pi = tuple(v / total for v in unnormalized)
    logger.debug("Solved stationary vector %s for %d-state chain", _fmt(pi), n)
    return pi


@lru_cache(maxsize=512)
def _matrix_power(matrix: Matrix, n: int) -> Matrix:
    if n < 0:
        raise ValueError("matrix power must be nonnegative")
    result = np.linalg.matrix_power(np.array(matrix, dtype=object), n)
    return tuple(tuple(Fraction(v) for v in row) for row in result)


def max_entropy_markov(
    allowed: Sequence[Sequence[bool]], *, max_denominator: int = 10**6
) -> MarkovMeasure:
    """Maximal-entropy (Parry) chain on a one-step SFT, rationalised.

    The Parry chain has irrational entries in general; each allowed transition
    is rounded to the nearest fraction with denominator ``<= max_denominator``
    and the last allowed entry of every row absorbs the rounding, so the
    returned measure is an exact stationary Markov measure supported on the
    SFT and within about ``1/max_denominator`` of the Parry measure.
    """
    adjacency = np.array([[1.0 if a else 0.0 for a in row] for row in allowed])
    eigenvalues, eigenvectors = np.linalg.eig(adjacency)
    index = int(np.argmax(eigenvalues.real))
    perron = float(eigenvalues[index].real)
    right = np.abs(eigenvectors[:, index].real)

    rows: list[tuple[Fraction, ...]] = []
    for i, row in enumerate(allowed):
        targets = [j for j, ok in enumerate(row) if ok]
        if not targets:
            raise ModelError(f"symbol {i} has no allowed successor")
        entries = [Fraction(0)] * len(row)
        for j in targets[:-1]:
            entries[j] = Fraction(right[j] / (perron * right[i])).limit_denominator(
                max_denominator
            )
        entries[targets[-1]] = 1 - sum(entries)
        rows.append(tuple(entries))
    logger.info("Built max-entropy chain with Perron root %.12f", perron)
    return MarkovMeasure(tuple(rows))


def merge_constraints(constraints: Iterable[Constraint]) -> dict[int, int] | None:
    """Merge shifted words into one index-to-symbol map; ``None`` on conflict."""
    merged: dict[int, int] = {}
    for offset, word in constraints:
        for j, symbol in enumerate(word):
            index = offset + j
            if merged.setdefault(index, symbol) != symbol:
                return None
    return merged


def _assignment_measure(m: MeasureModel, assignment: Mapping[int, int]) -> Fraction:
    if not assignment:
        return Fraction(1)
    if isinstance(m, BernoulliMeasure):
        result = Fraction(1)
        for symbol in assignment.values():
            result *= m.p[symbol]
        return result
    indices = sorted(assignment)
    result = m.pi[assignment[indices[0]]]
    for previous, current in zip(indices, indices[1:], strict=False):
        if result == 0:
            break
        result *= m.power(current - previous)[assignment[previous]][assignment[current]]
    return result


def _check_symbols(m: MeasureModel, symbols: Iterable[int]) -> None:
    m.alphabet.check_symbols(symbols)


def word_measure(m: MeasureModel, a: Word) -> Fraction:
    """``mu([a])``."""
    _check_symbols(m, a)
    if isinstance(m, BernoulliMeasure):
        result = Fraction(1)
        for symbol in a:
            result *= m.p[symbol]
        return result
    result = m.pi[a[0]]
    for current, following in zip(a.symbols, a.symbols[1:], strict=False):
        result *= m.P[current][following]
    return result


def constraint_merge_measure(m: MeasureModel, constraints: Iterable[Constraint]) -> Fraction:
    """Measure of the intersection of the shifted cylinders ``T^-offset [word]``.

    Conflicting assignments give 0. Markov gaps between constrained indices
    are summed out with matrix powers.
    """
    constraints = list(constraints)
    for _, word in constraints:
        _check_symbols(m, word)
    merged = merge_constraints(constraints)
    if merged is None:
        return Fraction(0)
    return _assignment_measure(m, merged)


def conditional_measure(
    m: MeasureModel, block_lo: int, block: Sequence[int], extra: Mapping[int, int]
) -> Fraction:
    """``mu(E | coordinates [block_lo, block_lo+len(block)) equal block)``.

    ``extra`` is an index-to-symbol map describing ``E``. The block must have
    positive measure. Constraints inside the block are matched, constraints
    outside are integrated out: independently for Bernoulli, through forward
    and time-reversed chain powers for Markov.
    """
    block_hi = block_lo + len(block)
    result = Fraction(1)
    before: list[tuple[int, int]] = []
    after: list[tuple[int, int]] = []
    for index, symbol in extra.items():
        if block_lo <= index < block_hi:
            if block[index - block_lo] != symbol:
                return Fraction(0)
        elif index < block_lo:
            before.append((index, symbol))
        else:
            after.append((index, symbol))

    if isinstance(m, BernoulliMeasure):
        for _, symbol in before + after:
            result *= m.p[symbol]
        return result

    position, state = block_hi - 1, block[-1]
    for index, symbol in sorted(after):
        result *= m.power(index - position)[state][symbol]
        if result == 0:
            return result
        position, state = index, symbol

    position, state = block_lo, block[0]
    for index, symbol in sorted(before, reverse=True):
        gap = position - index
        result *= m.pi[symbol] * m.power(gap)[symbol][state] / m.pi[state]
        if result == 0:
            return result
        position, state = index, symbol
    return result


def integral(m: MeasureModel, f: CylinderFunction) -> Fraction:
    """``int f dmu``; offsets drop out by shift invariance."""
    return sum((c * word_measure(m, ind.word) for c, ind in f.terms), Fraction(0))


def supported_on(m: MeasureModel, allowed: Sequence[Sequence[bool]]) -> bool:
    """True when every transition of positive measure is allowed."""
    size = m.alphabet.size
    for d in range(size):
        for e in range(size):
            if not allowed[d][e] and word_measure(m, Word((d, e))) > 0:
                return False
    return True


def measure_to_json(m: MeasureModel) -> JsonObject:
    if isinstance(m, BernoulliMeasure):
        return {"type": "bernoulli", "p": [format_rational(v) for v in m.p]}
    return {"type": "markov", "P": [[format_rational(v) for v in row] for row in m.P]}


def measure_from_json(data: object, *, key: str = "measure") -> MeasureModel:
    if not isinstance(data, dict):
        raise ModelError(f"{key}: expected an object")
    kind = data.get("type")
    if kind == "bernoulli":
        raw = data.get("p")
        if not isinstance(raw, list):
            raise ModelError(f"{key}.p: expected a list of rationals")
        try:
            return BernoulliMeasure(
                tuple(parse_rational(v, key=f"{key}.p[{i}]") for i, v in enumerate(raw))
            )
        except ModelError as exc:
            raise ModelError(f"{key}.p: {exc}") from exc
    if kind == "markov":
        raw = data.get("P")
        if not isinstance(raw, list) or not all(isinstance(row, list) for row in raw):
            raise ModelError(f"{key}.P: expected a matrix of rationals")
        matrix = tuple(
            tuple(parse_rational(v, key=f"{key}.P[{i}][{j}]") for j, v in enumerate(row))
            for i, row in enumerate(raw)
        )
        try:
            return MarkovMeasure(matrix)
        except ModelError as exc:
            raise ModelError(f"{key}.P: {exc}") from exc
    raise ModelError(f"{key}.type: expected 'bernoulli' or 'markov', got {kind!r}")


__all__ = [
    "BernoulliMeasure",
    "Constraint",
    "MarkovMeasure",
    "Matrix",
    "MeasureModel",
    "conditional_measure",
    "constraint_merge_measure",
    "integral",
    "max_entropy_markov",
    "measure_from_json",
    "measure_to_json",
    "merge_constraints",
    "stationary_vector",
    "supported_on",
    "word_measure",
]
