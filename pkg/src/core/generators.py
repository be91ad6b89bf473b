"""Shift-point construction: the pathological block sequence, sampled windows, edits.

The pathological point is ``0`` on negative coordinates, ``1`` at coordinate 0,
and then alternates blocks of zeros and ones of lengths 2, 4, 8, 16, ... The
block boundaries are ``c_n = 2 + 4 + ... + 2^n = 2^(n+1) - 2`` with ``c_0 = 0``:
zeros fill ``(c_2n, c_2n+1]`` and ones fill ``(c_2n+1, c_2n+2]``.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction

import numpy as np

from src.core.errors import ModelError
from src.core.measures import BernoulliMeasure, MeasureModel
from src.core.rng import SeedLike, make_generator
from src.core.stdiff import DiffSeries, FrequencyCap, frequency
from src.core.symbolic import Alphabet, PointWindow, Word

logger = logging.getLogger(__name__)


class Parity(StrEnum):
    EVEN = "even"
    ODD = "odd"


@dataclass(slots=True, frozen=True)
class BlockSchedule:
    """Block boundaries ``c_n = 2^(n+1) - 2`` of the pathological point."""

    def c(self, n: int) -> int:
        if n < 0:
            raise ModelError(f"block index must be nonnegative, got {n}")
        return 2 ** (n + 1) - 2

    def block_index(self, j: int) -> int:
        """The ``n >= 1`` with ``c_(n-1) < j <= c_n``."""
        if j < 1:
            raise ModelError(f"coordinate {j} precedes the first block")
        return (j + 1).bit_length() - 1

    def symbol_at(self, j: int) -> int:
        if j < 0:
            return 0
        if j == 0:
            return 1
        return 0 if self.block_index(j) % 2 == 1 else 1

    def checkpoint_k(self, n: int, parity: Parity) -> int:
        if n < 1:
            raise ModelError(f"checkpoint index must be at least 1, got {n}")
        return self.c(2 * n) + 1 if parity is Parity.EVEN else self.c(2 * n - 1) + 1


BLOCKS = BlockSchedule()


def pathological_point(lo: int, hi: int) -> PointWindow:
    """Coordinates ``[lo, hi)`` of the pathological point."""
    if hi <= lo:
        raise ModelError(f"pathological window [{lo}, {hi}) is empty")
    symbols = np.zeros(hi - lo, dtype=np.int64)
    if lo <= 0 < hi:
        symbols[-lo] = 1
    n = 1
    while BLOCKS.c(n - 1) < hi - 1:
        if n % 2 == 0:
            start = max(BLOCKS.c(n - 1) + 1, lo)
            stop = min(BLOCKS.c(n) + 1, hi)
            if start < stop:
                symbols[start - lo : stop - lo] = 1
        n += 1
    return PointWindow(lo, hi, symbols, provenance="pathological")


def checkpoint_values(n: int, parity: Parity) -> tuple[int, Fraction]:
    """Closed-form zero frequency of the pathological point at a checkpoint.

    Even checkpoints ``k = c_2n + 1`` give ``(1/3)(4^n - 1)/(4^n - 1/2)``; odd
    checkpoints ``k = c_(2n-1) + 1`` give exactly ``2/3``.
    """
    k = BLOCKS.checkpoint_k(n, parity)
    if parity is Parity.EVEN:
        power = Fraction(4) ** n
        return k, Fraction(1, 3) * (power - 1) / (power - Fraction(1, 2))
    return k, Fraction(2, 3)


def _checkpoint_order(n_max: int) -> list[tuple[int, Parity]]:
    order = []
    for n in range(1, n_max + 1):
        order.extend([(n, Parity.ODD), (n, Parity.EVEN)])
    return order


def checkpoint_series(n_max: int) -> DiffSeries:
    """Closed-form checkpoints, odd and even interleaved by increasing ``k``."""
    entries = [checkpoint_values(n, parity) for n, parity in _checkpoint_order(n_max)]
    return DiffSeries(tuple(entries), "chi[0]", "pathological:closed-form")


def counted_checkpoint_series(n_max: int) -> DiffSeries:
    """Zero frequencies counted directly on the pathological point at every checkpoint."""
    order = _checkpoint_order(n_max)
    k_max = BLOCKS.checkpoint_k(n_max, Parity.EVEN)
    x = pathological_point(0, k_max)
    zero = Word((0,))
    entries = []
    for n, parity in order:
        k = BLOCKS.checkpoint_k(n, parity)
        entries.append((k, frequency(x, zero, k, FrequencyCap.TO_K_MINUS_ONE)))
    logger.debug("Counted %d pathological checkpoints up to k=%d", len(entries), k_max)
    return DiffSeries(tuple(entries), "chi[0]", "pathological:counted")


def random_window(m: MeasureModel, k: int, seed: SeedLike) -> PointWindow:
    """Coordinates ``[0, k)`` of an ``m``-distributed point, deterministic in ``seed``."""
    if k < 1:
        raise ModelError(f"window length must be at least 1, got {k}")
    rng = make_generator(seed)
    size = m.alphabet.size
    tag = f"random(seed={seed})" if isinstance(seed, int) else "random"
    if isinstance(m, BernoulliMeasure):
        probabilities = np.array([float(v) for v in m.p])
        symbols = rng.choice(size, size=k, p=probabilities / probabilities.sum())
        return PointWindow(0, k, symbols.astype(np.int64), provenance=tag)

    cumulative = np.cumsum([[float(v) for v in row] for row in m.P], axis=1)
    last_allowed = [max(j for j, v in enumerate(row) if v > 0) for row in m.P]
    pi = np.array([float(v) for v in m.pi])
    symbols = np.empty(k, dtype=np.int64)
    symbols[0] = rng.choice(size, p=pi / pi.sum())
    draws = rng.random(k)
    for j in range(1, k):
        previous = symbols[j - 1]
        choice = int(np.searchsorted(cumulative[previous], draws[j], side="right"))
        symbols[j] = min(choice, last_allowed[previous])
    return PointWindow(0, k, symbols, provenance=tag)


def perturb(
    x: PointWindow, edits: Sequence[tuple[int, int]], *, alphabet: Alphabet | None = None
) -> PointWindow:
    """Copy of ``x`` with ``(index, symbol)`` edits applied.

    Edit symbols must lie in ``alphabet``; without one, in the smallest alphabet
    (at least binary) holding every symbol of ``x``.
    """
    if alphabet is None:
        alphabet = Alphabet(max(2, int(x.symbols.max(initial=0)) + 1))
    indices = [index for index, _ in edits]
    if len(set(indices)) != len(indices):
        raise ModelError("edit indices must be distinct")
    symbols = x.symbols.copy()
    for index, symbol in edits:
        if not x.lo <= index < x.hi:
            raise ModelError(f"edit index {index} outside window [{x.lo}, {x.hi})")
        alphabet.check_symbols((symbol,))
        symbols[index - x.lo] = symbol
    return PointWindow(x.lo, x.hi, symbols, provenance=f"{x.provenance}|perturbed({len(edits)})")


class DensityZeroSet(StrEnum):
    SQUARES = "squares"
    POWERS_OF_TWO = "powers_of_two"


def _density_zero_indices(kind: DensityZeroSet, lo: int, hi: int) -> Iterable[int]:
    if kind is DensityZeroSet.SQUARES:
        j = 1
        while j * j < hi:
            if j * j >= lo:
                yield j * j
            j += 1
    else:
        p = 1
        while p < hi:
            if p >= lo:
                yield p
            p *= 2


def density_zero_edits(
    x: PointWindow, kind: DensityZeroSet, alphabet_size: int, *, lo: int = 0, hi: int | None = None
) -> list[tuple[int, int]]:
    """Flip ``x_j -> (x_j + 1) mod D`` on a density-zero set of positive indices."""
    hi = x.hi if hi is None else min(hi, x.hi)
    lo = max(lo, x.lo)
    return [
        (j, (x.at(j) + 1) % alphabet_size) for j in _density_zero_indices(kind, lo, hi)
    ]


__all__ = [
    "BLOCKS",
    "BlockSchedule",
    "DensityZeroSet",
    "Parity",
    "checkpoint_series",
    "checkpoint_values",
    "counted_checkpoint_series",
    "density_zero_edits",
    "pathological_point",
    "perturb",
    "random_window",
]
