"""Custom error types for ergolab."""


class ErgolabError(Exception):
    """Base error for ergolab."""


class ConfigError(ErgolabError):
    """Invalid experiment config, harness profile or environment."""


class ModelError(ConfigError):
    """A model object (alphabet, word, measure, SFT, schedule) failed validation."""


class ZeroMeasureCylinder(ErgolabError):
    """Conditioning on a cylinder of measure zero."""


class InsufficientWindow(ErgolabError):
    """A point window does not cover the indices an operation needs."""


class EmptySFT(ErgolabError):
    """A shift of finite type has no admissible word or cycle of the required length."""


class ComplexityGuard(ErgolabError):
    """A brute-force enumeration would exceed the configured size limit."""


class DegenerateInterval(ErgolabError):
    """An interval is too short to average over."""


class BallOutOfRange(ErgolabError):
    """A ball leaves the unit interval."""
