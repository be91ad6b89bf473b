"""Finite-horizon gauges and maximum mean cycles on shifts of finite type.

For a locally constant ``f`` depending on ``w`` consecutive coordinates, the
SFT is recoded as a graph whose nodes are admissible blocks of length
``L - 1`` (``L = max(w, memory + 1, 2)``) and whose edges are admissible blocks
of length ``L``. An edge carries the value of ``f`` read at the start of its
block, so a walk of ``k`` edges is a word of length ``k + L - 1`` and its
weight is the Birkhoff sum of ``f`` over ``k`` shifts.

``Gamma_k(f) = max_u (1/k) sum_{i<k} f(u at i)`` over words occurring in the
SFT is a max-plus power of the weight matrix; its limit (equivalently its
infimum, by subadditivity) is the maximum mean weight of a cycle.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import networkx as nx

from src.core.errors import ComplexityGuard, EmptySFT, ModelError
from src.core.json_types import JsonObject, format_rational, rational_to_float
from src.core.measures import MeasureModel, integral, supported_on, word_measure
from src.core.symbolic import Alphabet, CylinderFunction, Word

logger = logging.getLogger(__name__)

ENUMERATION_LIMIT = 10**7

type Block = tuple[int, ...]


@dataclass(slots=True, frozen=True)
class SFT:
    """Shift of finite type: one-step transition matrix plus optional longer forbidden words."""

    alphabet: Alphabet
    allowed: tuple[tuple[bool, ...], ...]
    forbidden_words: tuple[Word, ...] = ()

    def __post_init__(self) -> None:
        allowed = tuple(tuple(bool(v) for v in row) for row in self.allowed)
        object.__setattr__(self, "allowed", allowed)
        size = self.alphabet.size
        if len(allowed) != size or any(len(row) != size for row in allowed):
            raise ModelError(f"transition matrix must be {size}x{size}")
        for word in self.forbidden_words:
            self.alphabet.check_symbols(word)
        if not _essential_nodes(self, self.memory + 1):
            raise EmptySFT("SFT has no bi-infinite point (no cycle in its transition graph)")

    @classmethod
    def full_shift(cls, size: int) -> SFT:
        return cls(Alphabet(size), tuple(tuple(True for _ in range(size)) for _ in range(size)))

    @classmethod
    def golden_mean(cls) -> SFT:
        """Binary sequences with no two consecutive ones."""
        return cls(Alphabet(2), ((True, True), (True, False)))

    @property
    def memory(self) -> int:
        return max([1, *(len(word) - 1 for word in self.forbidden_words)])

    def is_admissible(self, symbols: Sequence[int]) -> bool:
        for current, following in zip(symbols, symbols[1:], strict=False):
            if not self.allowed[current][following]:
                return False
        for word in self.forbidden_words:
            length = len(word)
            for start in range(len(symbols) - length + 1):
                if tuple(symbols[start : start + length]) == word.symbols:
                    return False
        return True

    def admissible_blocks(self, length: int) -> Iterator[Block]:
        _guard(self.alphabet.size, length)
        for symbols in product(range(self.alphabet.size), repeat=length):
            if self.is_admissible(symbols):
                yield symbols

    def to_dict(self) -> JsonObject:
        return {
            "alphabet": self.alphabet.size,
            "allowed": [[int(v) for v in row] for row in self.allowed],
            "forbidden_words": [list(word.symbols) for word in self.forbidden_words],
        }

    @classmethod
    def from_dict(cls, data: object, *, key: str = "sft") -> SFT:
        if not isinstance(data, dict):
            raise ModelError(f"{key}: expected an object")
        size = data.get("alphabet")
        if not isinstance(size, int):
            raise ModelError(f"{key}.alphabet: expected an integer alphabet size")
        alphabet = Alphabet(size)
        raw_allowed = data.get("allowed")
        if raw_allowed is None:
            raw_allowed = [[1] * size for _ in range(size)]
        if not isinstance(raw_allowed, list) or not all(isinstance(r, list) for r in raw_allowed):
            raise ModelError(f"{key}.allowed: expected a 0/1 matrix")
        forbidden = data.get("forbidden_words", [])
        if not isinstance(forbidden, list) or not all(isinstance(w, list) for w in forbidden):
            raise ModelError(f"{key}.forbidden_words: expected a list of words")
        try:
            return cls(
                alphabet,
                tuple(tuple(bool(v) for v in row) for row in raw_allowed),
                tuple(Word(tuple(w)) for w in forbidden),
            )
        except ModelError as exc:
            raise ModelError(f"{key}: {exc}") from exc


def _guard(size: int, length: int) -> None:
    if size**length > ENUMERATION_LIMIT:
        raise ComplexityGuard(
            f"enumerating {size}^{length} blocks exceeds the limit of {ENUMERATION_LIMIT}"
        )


def _block_graph(s: SFT, edge_length: int) -> nx.DiGraph:
    graph = nx.DiGraph()
    for block in s.admissible_blocks(edge_length):
        graph.add_edge(block[:-1], block[1:], block=block)
    return graph


def _essential(graph: nx.DiGraph) -> set[Block]:
    """Nodes lying on a bi-infinite walk: reachable from and reaching a cycle."""
    cyclic: set[Block] = set()
    for component in nx.strongly_connected_components(graph):
        node = next(iter(component))
        if len(component) > 1 or graph.has_edge(node, node):
            cyclic.update(component)
    forward = set(cyclic)
    backward = set(cyclic)
    for node in cyclic:
        forward.update(nx.descendants(graph, node))
        backward.update(nx.ancestors(graph, node))
    return forward & backward


def _essential_nodes(s: SFT, edge_length: int) -> set[Block]:
    return _essential(_block_graph(s, edge_length))


@dataclass(slots=True, frozen=True)
class WeightedTransitionGraph:
    """Recoded SFT with exact per-edge values of a locally constant function."""

    nodes: tuple[Block, ...]
    edges: tuple[tuple[Block, Block, Fraction], ...]
    window: int
    edge_length: int
    offset_shift: int = 0
    _index: dict[Block, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        self._index.update({node: i for i, node in enumerate(self.nodes)})

    def index(self, node: Block) -> int:
        return self._index[node]

    def min_weight(self) -> Fraction:
        return min(weight for _, _, weight in self.edges)

    def max_weight(self) -> Fraction:
        return max(weight for _, _, weight in self.edges)

    def scaled_weights(
        self, shift: Fraction = Fraction(0)
    ) -> tuple[list[tuple[int, int, int]], int]:
        """Integer edge weights ``(w + shift) * den`` over a common denominator."""
        weights = [weight + shift for _, _, weight in self.edges]
        den = math.lcm(*(w.denominator for w in weights)) if weights else 1
        return (
            [
                (self._index[src], self._index[dst], int(w * den))
                for (src, dst, _), w in zip(self.edges, weights, strict=True)
            ],
            den,
        )

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        for src, dst, weight in self.edges:
            graph.add_edge(src, dst, weight=weight)
        return graph

    def export_edge_list(self) -> str:
        """One ``src dst num/den`` line per edge; nodes as comma-joined symbols."""
        return "".join(
            f"{_label(src)} {_label(dst)} {format_rational(weight)}\n"
            for src, dst, weight in self.edges
        )


def _label(node: Block) -> str:
    return ",".join(str(s) for s in node)


def parse_edge_list(text: str) -> list[tuple[Block, Block, Fraction]]:
    edges = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ModelError(f"edge list line {number}: expected 'src dst num/den'")
        src, dst, weight = parts
        num, _, den = weight.partition("/")
        edges.append(
            (
                tuple(int(s) for s in src.split(",")),
                tuple(int(s) for s in dst.split(",")),
                Fraction(int(num), int(den or 1)),
            )
        )
    return edges


def transition_graph(s: SFT, f: CylinderFunction) -> WeightedTransitionGraph:
    """Recode ``s`` so every edge carries the exact value of ``f`` at its block start."""
    f.check_alphabet(s.alphabet)
    lo, hi = f.dependence_window()
    g = f.shift(-lo)
    window = max(hi - lo, 1)
    edge_length = max(window, s.memory + 1, 2)
    graph = _block_graph(s, edge_length)
    keep = _essential(graph)
    if not keep:
        raise EmptySFT("no admissible bi-infinite point")
    nodes = tuple(sorted(keep))
    edges = tuple(
        (src, dst, g.evaluate_word(data["block"], 0))
        for src, dst, data in sorted(graph.edges(data=True))
        if src in keep and dst in keep
    )
    logger.debug(
        "Transition graph: %d nodes, %d edges, window %d, block length %d",
        len(nodes),
        len(edges),
        window,
        edge_length,
    )
    return WeightedTransitionGraph(nodes, edges, window, edge_length, offset_shift=-lo)


def nonnegative_shift(g: WeightedTransitionGraph) -> Fraction:
    """Constant added to ``f`` so it is nonnegative on the SFT."""
    return max(Fraction(0), -g.min_weight())


def gauge_values(
    g: WeightedTransitionGraph, k_max: int, shift: Fraction | None = None
) -> list[Fraction]:
    """``[Gamma_1, ..., Gamma_k_max]`` of ``f + shift`` by max-plus iteration."""
    if k_max < 1:
        raise ModelError(f"k must be at least 1, got {k_max}")
    shift = nonnegative_shift(g) if shift is None else shift
    edges, den = g.scaled_weights(shift)
    best: list[int | None] = [0] * len(g.nodes)
    values = []
    for k in range(1, k_max + 1):
        following: list[int | None] = [None] * len(best)
        for src, dst, weight in edges:
            if best[src] is None:
                continue
            candidate = best[src] + weight
            current = following[dst]
            if current is None or candidate > current:
                following[dst] = candidate
        reached = [v for v in following if v is not None]
        if not reached:
            raise EmptySFT(f"no admissible walk of length {k}")
        best = following
        values.append(Fraction(max(reached), k * den))
    return values


def finite_gauge(s: SFT, f: CylinderFunction, k: int) -> Fraction:
    """``Gamma_k`` of ``f + nonnegative_shift(transition_graph(s, f))``.

    The shift is zero when ``f`` is already nonnegative on ``s``; subtract it to
    recover ``Gamma_k(f)``. :func:`gauge_series` reports it as ``shift``.
    """
    return gauge_values(transition_graph(s, f), k)[-1]


def finite_gauge_bruteforce(s: SFT, f: CylinderFunction, k: int) -> Fraction:
    """``Gamma_k`` by enumerating every admissible word of length ``k + L - 1``."""
    g = transition_graph(s, f)
    shift = nonnegative_shift(g)
    lo, _ = f.dependence_window()
    shifted = f.shift(-lo)
    keep = set(g.nodes)
    tail = g.edge_length - 1
    best: Fraction | None = None
    for word in s.admissible_blocks(k + tail):
        if word[:tail] not in keep or word[-tail:] not in keep:
            continue
        total = sum((shifted.evaluate_word(word, i) for i in range(k)), Fraction(0))
        if best is None or total > best:
            best = total
    if best is None:
        raise EmptySFT(f"no admissible word of length {k + tail}")
    return best / k + shift


@dataclass(slots=True, frozen=True)
class MeanCycle:
    value: Fraction
    cycle: tuple[Block, ...]

    def to_dict(self) -> JsonObject:
        return {
            "value": format_rational(self.value),
            "value_float": rational_to_float(self.value),
            "cycle": [list(node) for node in self.cycle],
        }


def max_mean_cycle(g: WeightedTransitionGraph) -> MeanCycle:
    """Maximum mean edge weight over directed cycles (Karp), with a witness cycle.

    The witness is the shortest optimal cycle, then the lexicographically
    smallest one when read from its smallest node.
    """
    n = len(g.nodes)
    edges, den = g.scaled_weights()
    if not edges:
        raise EmptySFT("graph has no edges")

    table: list[list[int | None]] = [[0] * n]
    for _ in range(n):
        previous = table[-1]
        row: list[int | None] = [None] * n
        for src, dst, weight in edges:
            if previous[src] is None:
                continue
            candidate = previous[src] + weight
            if row[dst] is None or candidate > row[dst]:
                row[dst] = candidate
        table.append(row)

    best: Fraction | None = None
    for v in range(n):
        final = table[n][v]
        if final is None:
            continue
        worst = min(
            Fraction(final - table[j][v], n - j) for j in range(n) if table[j][v] is not None
        )
        if best is None or worst > best:
            best = worst
    if best is None:
        raise EmptySFT("graph has no cycle")

    cycle = _critical_cycle(n, edges, best)
    return MeanCycle(best / den, tuple(g.nodes[i] for i in cycle))


def _critical_cycle(n: int, edges: list[tuple[int, int, int]], mean: Fraction) -> list[int]:
    p, q = mean.numerator, mean.denominator
    reduced = [(src, dst, q * weight - p) for src, dst, weight in edges]
    successors: dict[int, list[tuple[int, int]]] = {v: [] for v in range(n)}
    for src, dst, weight in reduced:
        successors[src].append((dst, weight))
    for targets in successors.values():
        targets.sort()

    def closed_length(start: int) -> int | None:
        row: list[int | None] = [None] * n
        row[start] = 0
        for length in range(1, n + 1):
            following: list[int | None] = [None] * n
            for src, dst, weight in reduced:
                if row[src] is not None:
                    candidate = row[src] + weight
                    if following[dst] is None or candidate > following[dst]:
                        following[dst] = candidate
            if following[start] == 0:
                return length
            row = following
        return None

    lengths = {v: closed_length(v) for v in range(n)}
    shortest = min(length for length in lengths.values() if length is not None)
    start = min(v for v, length in lengths.items() if length == shortest)

    # back[j][u]: best reduced weight of a walk u -> start with exactly j edges
    back: list[list[int | None]] = [[0 if u == start else None for u in range(n)]]
    for _ in range(shortest):
        previous = back[-1]
        row: list[int | None] = [None] * n
        for src, dst, weight in reduced:
            if previous[dst] is not None:
                candidate = weight + previous[dst]
                if row[src] is None or candidate > row[src]:
                    row[src] = candidate
        back.append(row)

    cycle = [start]
    current, accumulated = start, 0
    for step in range(shortest - 1):
        remaining = shortest - step - 1
        for target, weight in successors[current]:
            tail = back[remaining][target]
            if tail is not None and accumulated + weight + tail == 0:
                cycle.append(target)
                current, accumulated = target, accumulated + weight
                break
    return cycle


def max_mean_cycle_bruteforce(g: WeightedTransitionGraph) -> Fraction:
    """Maximum cycle mean by enumerating every simple cycle."""
    graph = g.to_networkx()
    best: Fraction | None = None
    for cycle in nx.simple_cycles(graph):
        weight = sum(
            (graph[u][v]["weight"] for u, v in zip(cycle, cycle[1:] + cycle[:1], strict=True)),
            Fraction(0),
        )
        mean = weight / len(cycle)
        if best is None or mean > best:
            best = mean
    if best is None:
        raise EmptySFT("graph has no cycle")
    return best


@dataclass(slots=True, frozen=True)
class GaugeSeries:
    """``k -> Gamma_k`` with the infimum estimate and the cycle certificate."""

    entries: tuple[tuple[int, Fraction], ...]
    mmc: MeanCycle
    shift: Fraction = Fraction(0)

    @property
    def limit_estimate(self) -> Fraction:
        return min(value for _, value in self.entries)

    def value(self, k: int) -> Fraction:
        return dict(self.entries)[k]

    def subadditivity_violations(self) -> list[tuple[int, int]]:
        """Pairs ``(k, l)`` with ``(k+l) Gamma_(k+l) > k Gamma_k + l Gamma_l``."""
        values = dict(self.entries)
        violations = []
        for k in values:
            for ell in values:
                if ell < k or k + ell not in values:
                    continue
                if (k + ell) * values[k + ell] > k * values[k] + ell * values[ell]:
                    violations.append((k, ell))
        return violations

    def to_dict(self) -> JsonObject:
        return {
            "shift": format_rational(self.shift),
            "mmc": format_rational(self.mmc.value),
            "mmc_float": rational_to_float(self.mmc.value),
            "mmc_cycle": [list(node) for node in self.mmc.cycle],
            "limit_estimate": format_rational(self.limit_estimate),
            "gamma_k": [
                {"k": k, "value": format_rational(v), "value_float": rational_to_float(v)}
                for k, v in self.entries
            ],
        }


def gauge_series(s: SFT, f: CylinderFunction, k_max: int) -> GaugeSeries:
    g = transition_graph(s, f)
    shift = nonnegative_shift(g)
    values = gauge_values(g, k_max, shift)
    mmc = max_mean_cycle(g)
    return GaugeSeries(
        tuple(enumerate(values, start=1)), MeanCycle(mmc.value + shift, mmc.cycle), shift
    )


@dataclass(slots=True, frozen=True)
class GaugeGap:
    gamma_est: Fraction
    integral: Fraction
    mmc: MeanCycle
    shift: Fraction
    k_max: int

    @property
    def gap(self) -> Fraction:
        return self.gamma_est - self.integral

    @property
    def certified_gap(self) -> Fraction:
        """Lower bound ``mmc - integral`` on ``Gamma(f) - int f dmu``."""
        return self.mmc.value - self.integral

    @property
    def certifies_non_unique_ergodicity(self) -> bool:
        return self.certified_gap > 0

    def to_dict(self) -> JsonObject:
        return {
            "k_max": self.k_max,
            "shift": format_rational(self.shift),
            "gamma_est": format_rational(self.gamma_est),
            "integral": format_rational(self.integral),
            "integral_float": rational_to_float(self.integral),
            "gap": format_rational(self.gap),
            "gap_float": rational_to_float(self.gap),
            "mmc": format_rational(self.mmc.value),
            "mmc_cycle": [list(node) for node in self.mmc.cycle],
            "certified_gap": format_rational(self.certified_gap),
            "certifies_non_unique_ergodicity": self.certifies_non_unique_ergodicity,
        }


def check_support(m: MeasureModel, s: SFT) -> None:
    """Raise ModelError unless ``m`` gives zero mass to everything ``s`` forbids."""
    if m.alphabet != s.alphabet:
        raise ModelError("measure and SFT use different alphabets")
    if not supported_on(m, s.allowed):
        raise ModelError("measure charges a transition the SFT forbids")
    for word in s.forbidden_words:
        if word_measure(m, word) > 0:
            raise ModelError(f"measure charges forbidden word {word}")


def gauge_gap(m: MeasureModel, s: SFT, f: CylinderFunction, k_max: int) -> GaugeGap:
    """``Gamma_k_max - int f dmu``, with the max-mean-cycle lower bound on ``Gamma(f)``.

    ``Gamma_k_max`` bounds ``Gamma(f)`` from above since ``Gamma = inf_k Gamma_k``.
    A cycle mean strictly above ``int f dmu`` certifies that ``mu`` is not the
    only invariant measure.
    """
    check_support(m, s)
    series = gauge_series(s, f, k_max)
    return GaugeGap(
        gamma_est=series.value(k_max),
        integral=integral(m, f) + series.shift,
        mmc=series.mmc,
        shift=series.shift,
        k_max=k_max,
    )


@dataclass(slots=True, frozen=True)
class OpenSetWitness:
    """``U_k = {avg_k f > level}`` with its measure and average of ``avg_k f`` over it."""

    level: Fraction
    k: int
    measure: Fraction
    alpha: Fraction | None
    words: int

    def to_dict(self) -> JsonObject:
        return {
            "level": format_rational(self.level),
            "k": self.k,
            "measure": format_rational(self.measure),
            "alpha": format_rational(self.alpha) if self.alpha is not None else None,
            "words": self.words,
        }


def open_set_witness(
    m: MeasureModel, s: SFT, f: CylinderFunction, k: int, level: Fraction
) -> OpenSetWitness:
    """Exact ``mu(U_k)`` and ``alpha_{U_k}((1/k) sum T^i f)`` by enumerating cylinders.

    ``U_k`` is open, and ``alpha_{U_k}`` of the Birkhoff average is at least
    ``level`` whenever ``mu(U_k) > 0``: a sequence of open sets on which the
    spatial-temporal averages stay away from ``int f dmu``.
    """
    check_support(m, s)
    if k < 1:
        raise ModelError(f"k must be at least 1, got {k}")
    lo, hi = f.dependence_window()
    shifted = f.shift(-lo)
    length = k + max(hi - lo, 1) - 1
    measure = Fraction(0)
    weighted = Fraction(0)
    count = 0
    for block in s.admissible_blocks(length):
        average = sum((shifted.evaluate_word(block, i) for i in range(k)), Fraction(0)) / k
        if average <= level:
            continue
        mass = word_measure(m, Word(block))
        if mass == 0:
            continue
        measure += mass
        weighted += mass * average
        count += 1
    alpha = weighted / measure if measure else None
    return OpenSetWitness(Fraction(level), k, measure, alpha, count)


__all__ = [
    "ENUMERATION_LIMIT",
    "SFT",
    "GaugeGap",
    "GaugeSeries",
    "MeanCycle",
    "OpenSetWitness",
    "WeightedTransitionGraph",
    "check_support",
    "finite_gauge",
    "finite_gauge_bruteforce",
    "gauge_gap",
    "gauge_series",
    "gauge_values",
    "max_mean_cycle",
    "max_mean_cycle_bruteforce",
    "nonnegative_shift",
    "open_set_witness",
    "parse_edge_list",
    "transition_graph",
]
