"""Circle rotations with shrinking balls, and the identity-map counterexample.

Everything here is float-native. Averages of trigonometric polynomials over
intervals are evaluated in closed form from their antiderivatives and can be
cross-checked against ``scipy.integrate.quad`` to 1e-9.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from scipy import integrate

from src.core.errors import BallOutOfRange, DegenerateInterval, ModelError
from src.core.json_types import JsonObject
from src.core.stdiff import DiffSeries

MIN_INTERVAL = 1e-12
QUADRATURE_TOLERANCE = 1e-9
TWO_PI = 2.0 * math.pi


@dataclass(slots=True, frozen=True)
class TrigPolynomial:
    """``sum_n a_n cos(2 pi n x) + b_n sin(2 pi n x)`` on the unit circle."""

    terms: tuple[tuple[int, float, float], ...]

    def __post_init__(self) -> None:
        merged: dict[int, tuple[float, float]] = {}
        for n, a, b in self.terms:
            if n < 0:
                raise ModelError(f"frequencies must be nonnegative, got {n}")
            if not (math.isfinite(a) and math.isfinite(b)):
                raise ModelError(f"non-finite coefficient at frequency {n}")
            if n == 0:
                b = 0.0
            old_a, old_b = merged.get(n, (0.0, 0.0))
            merged[n] = (old_a + float(a), old_b + float(b))
        object.__setattr__(
            self, "terms", tuple((n, a, b) for n, (a, b) in sorted(merged.items()))
        )

    @classmethod
    def constant(cls, value: float) -> TrigPolynomial:
        return cls(((0, float(value), 0.0),))

    @classmethod
    def cosine(cls, n: int = 1, amplitude: float = 1.0) -> TrigPolynomial:
        return cls(((n, amplitude, 0.0),))

    @property
    def constant_term(self) -> float:
        """The integral over the circle."""
        return sum(a for n, a, _ in self.terms if n == 0)

    def lipschitz_bound(self) -> float:
        return sum(TWO_PI * n * (abs(a) + abs(b)) for n, a, b in self.terms)

    def __call__(self, x: float | np.ndarray) -> float | np.ndarray:
        x = np.asarray(x, dtype=float)
        total = np.zeros_like(x)
        for n, a, b in self.terms:
            total = total + a * np.cos(TWO_PI * n * x) + b * np.sin(TWO_PI * n * x)
        return total if total.ndim else float(total)

    def antiderivative(self, x: float | np.ndarray) -> float | np.ndarray:
        x = np.asarray(x, dtype=float)
        total = np.zeros_like(x)
        for n, a, b in self.terms:
            if n == 0:
                total = total + a * x
            else:
                scale = TWO_PI * n
                total = total + (a * np.sin(scale * x) - b * np.cos(scale * x)) / scale
        return total if total.ndim else float(total)

    def to_dict(self) -> JsonObject:
        return {"terms": [[n, a, b] for n, a, b in self.terms]}

    @classmethod
    def from_dict(cls, data: object, *, key: str = "trig") -> TrigPolynomial:
        raw = data.get("terms") if isinstance(data, dict) else None
        if not isinstance(raw, list) or not raw:
            raise ModelError(f"{key}.terms: expected a nonempty list of [n, a, b]")
        terms = []
        for index, term in enumerate(raw):
            if (
                not isinstance(term, list)
                or len(term) != 3
                or not isinstance(term[0], int)
                or not all(isinstance(c, int | float) for c in term[1:])
            ):
                raise ModelError(f"{key}.terms[{index}]: expected [n, cos_coef, sin_coef]")
            terms.append((term[0], float(term[1]), float(term[2])))
        return cls(tuple(terms))


class RadiusKind(StrEnum):
    INVERSE = "inverse"
    INVERSE_SQRT = "inverse_sqrt"
    CONSTANT = "constant"


@dataclass(slots=True, frozen=True)
class RadiusSchedule:
    """Positive non-increasing radii ``r_k``."""

    kind: RadiusKind = RadiusKind.INVERSE
    r1: float = 1.0

    def __post_init__(self) -> None:
        if not (self.r1 > 0 and math.isfinite(self.r1)):
            raise ModelError(f"radius r_1 must be positive, got {self.r1}")

    def radius(self, k: int) -> float:
        if k < 1:
            raise ModelError(f"k must be at least 1, got {k}")
        if self.kind is RadiusKind.INVERSE:
            return self.r1 / k
        if self.kind is RadiusKind.INVERSE_SQRT:
            return self.r1 / math.sqrt(k)
        return self.r1

    @property
    def shrinks(self) -> bool:
        return self.kind is not RadiusKind.CONSTANT


@dataclass(slots=True, frozen=True)
class RotationSystem:
    """``x -> x + theta mod 1`` with balls of radius ``r_k``.

    ``theta`` is a double; irrational rotation numbers are represented to about
    1e-16, which is far below every tolerance used on top of them.
    """

    theta: float
    radius: RadiusSchedule = RadiusSchedule()

    def __post_init__(self) -> None:
        if not 0.0 < self.theta < 1.0:
            raise ModelError(f"rotation number must lie in (0, 1), got {self.theta}")

    @classmethod
    def golden(cls, radius: RadiusSchedule = RadiusSchedule()) -> RotationSystem:
        return cls((math.sqrt(5.0) - 1.0) / 2.0, radius)

    def orbit(self, x: float, k: int) -> np.ndarray:
        return np.mod(x + self.theta * np.arange(k, dtype=float), 1.0)


def interval_average(f: TrigPolynomial, a: float, b: float) -> float:
    """``(1/(b-a)) int_a^b f``, closed form."""
    if b - a < MIN_INTERVAL:
        raise DegenerateInterval(f"interval [{a}, {b}] is shorter than {MIN_INTERVAL}")
    return float((f.antiderivative(b) - f.antiderivative(a)) / (b - a))


def quadrature_average(f: TrigPolynomial, a: float, b: float) -> float:
    """Adaptive-quadrature counterpart of :func:`interval_average`."""
    if b - a < MIN_INTERVAL:
        raise DegenerateInterval(f"interval [{a}, {b}] is shorter than {MIN_INTERVAL}")
    value, _ = integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-13, limit=200)
    return value / (b - a)


def _ball_averages(f: TrigPolynomial, centers: np.ndarray, r: float) -> np.ndarray:
    """Averages over ``(c - r, c + r)`` on the circle, split at the seam 0 = 1."""
    if r >= 0.5:
        return np.full(centers.shape, f.constant_term)
    lo = centers - r
    hi = centers + r
    # wrap at 0: (lo + 1, 1) + (0, hi); wrap at 1: (lo, 1) + (0, hi - 1)
    below = lo < 0.0
    above = hi > 1.0
    integral = f.antiderivative(hi) - f.antiderivative(lo)
    wrapped_below = (f.antiderivative(1.0) - f.antiderivative(lo[below] + 1.0)) + (
        f.antiderivative(hi[below]) - f.antiderivative(0.0)
    )
    wrapped_above = (f.antiderivative(1.0) - f.antiderivative(lo[above])) + (
        f.antiderivative(hi[above] - 1.0) - f.antiderivative(0.0)
    )
    integral = np.asarray(integral, dtype=float).copy()
    integral[below] = wrapped_below
    integral[above] = wrapped_above
    return integral / (2.0 * r)


def rotation_ball_stdiff(sys: RotationSystem, x: float, k: int, f: TrigPolynomial) -> float:
    """``(1/k) sum_{i<k} alpha_{B(x + i theta, r_k)}(f)``.

    Lebesgue measure is rotation invariant, so averaging ``T^i f`` over the ball
    around ``x`` equals averaging ``f`` over the ball around ``x + i theta``.
    """
    if k < 1:
        raise ModelError(f"k must be at least 1, got {k}")
    averages = _ball_averages(f, sys.orbit(x, k), sys.radius.radius(k))
    return float(np.mean(averages))


def birkhoff_rotation_average(sys: RotationSystem, x: float, k: int, f: TrigPolynomial) -> float:
    """``(1/k) sum_{i<k} f(x + i theta)``."""
    if k < 1:
        raise ModelError(f"k must be at least 1, got {k}")
    return float(np.mean(f(sys.orbit(x, k))))


def rotation_series(
    sys: RotationSystem, x: float, ks: Sequence[int], f: TrigPolynomial
) -> DiffSeries:
    entries = tuple((k, rotation_ball_stdiff(sys, x, k, f)) for k in ks)
    return DiffSeries(entries, f"trig{list(f.terms)}", f"rotation(theta={sys.theta!r}, x={x!r})")


@dataclass(slots=True, frozen=True)
class IdentityCounterexample:
    x0: float
    k: int
    ball_avg: float
    integral: float

    def to_dict(self) -> JsonObject:
        return {"x0": self.x0, "k": self.k, "ball_avg": self.ball_avg, "integral": self.integral}


def identity_counterexample(x0: float, k: int) -> IdentityCounterexample:
    """Average of ``|x - x0|`` over ``(x0 - 1/k, x0 + 1/k)`` against its integral over [0, 1].

    Under the identity map every Birkhoff average of ``f`` is ``f`` itself, so
    the ball averages tend to ``f(x0) = 0`` while the integral stays positive.
    """
    if not 0.0 < x0 < 1.0:
        raise BallOutOfRange(f"centre {x0} must lie in (0, 1)")
    if k < 1 or 1.0 / k >= min(x0, 1.0 - x0):
        raise BallOutOfRange(f"ball of radius 1/{k} around {x0} leaves [0, 1]")
    return IdentityCounterexample(
        x0=x0, k=k, ball_avg=1.0 / (2 * k), integral=(x0**2 + (1.0 - x0) ** 2) / 2.0
    )


def identity_counterexample_quadrature(x0: float, k: int) -> tuple[float, float]:
    """Both quantities of :func:`identity_counterexample` by numerical integration."""
    radius = 1.0 / k
    ball, _ = integrate.quad(lambda t: abs(t - x0), x0 - radius, x0 + radius, points=[x0])
    whole, _ = integrate.quad(lambda t: abs(t - x0), 0.0, 1.0, points=[x0])
    return ball / (2.0 * radius), whole


__all__ = [
    "MIN_INTERVAL",
    "QUADRATURE_TOLERANCE",
    "IdentityCounterexample",
    "RadiusKind",
    "RadiusSchedule",
    "RotationSystem",
    "TrigPolynomial",
    "birkhoff_rotation_average",
    "identity_counterexample",
    "identity_counterexample_quadrature",
    "interval_average",
    "quadrature_average",
    "rotation_ball_stdiff",
    "rotation_series",
]
