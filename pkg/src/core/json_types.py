"""Shared JSON-like payload types and exact-rational codecs."""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from src.core.errors import ConfigError

type JsonValue = Any
type JsonObject = dict[str, Any]
type JsonArray = list[Any]


def as_json_object(value: object) -> JsonObject:
    """Return a JSON object when the runtime value is a dict."""
    return value if isinstance(value, dict) else {}


def as_json_array(value: object) -> JsonArray:
    """Return a JSON array when the runtime value is a list."""
    return value if isinstance(value, list) else []


def format_rational(value: Fraction | int) -> str:
    """Render a rational as ``"num/den"`` (integers keep the ``/1``)."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(value: object, *, key: str = "value") -> Fraction:
    """Parse ``"num/den"``, ``"n"`` or a JSON integer into a Fraction.

    Floats are rejected: exact models never accept binary floating point.
    """
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a rational string, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise ConfigError(f"{key}: expected a rational string like '1/2', got {value!r}")
    text = value.strip()
    num, sep, den = text.partition("/")
    try:
        if sep:
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{key}: invalid rational {value!r}") from exc


def rational_to_float(value: Fraction) -> float:
    return value.numerator / value.denominator


__all__ = [
    "JsonArray",
    "JsonObject",
    "JsonValue",
    "as_json_array",
    "as_json_object",
    "format_rational",
    "parse_rational",
    "rational_to_float",
]
