"""Exact and seeded computation for spatial-temporal differentiation experiments."""

from .errors import (
    BallOutOfRange,
    ComplexityGuard,
    ConfigError,
    DegenerateInterval,
    EmptySFT,
    ErgolabError,
    InsufficientWindow,
    ModelError,
    ZeroMeasureCylinder,
)

__all__ = [
    "BallOutOfRange",
    "ComplexityGuard",
    "ConfigError",
    "DegenerateInterval",
    "EmptySFT",
    "ErgolabError",
    "InsufficientWindow",
    "ModelError",
    "ZeroMeasureCylinder",
]
