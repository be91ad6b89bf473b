"""Argument parser construction for the ergolab CLI."""

from __future__ import annotations

import argparse
import os
from importlib.metadata import PackageNotFoundError
from importlib.metadata import version as get_version

try:
    __version__ = get_version("ergolab")
except PackageNotFoundError:
    __version__ = "0.0.0+local"

OUTPUT_ENV_VAR = "ERGOLAB_OUTPUT"
THREADS_ENV_VAR = "ERGOLAB_THREADS"
LOG_LEVEL_ENV_VAR = "ERGOLAB_LOG_LEVEL"

# Command aliases for ergonomics
COMMAND_ALIASES = {
    "r": "run",
    "v": "verify",
}

SUITES = ("exact", "montecarlo", "all")


def resolve_output_mode(parsed_args) -> str:
    """Resolve output mode from args or environment."""
    if getattr(parsed_args, "json", False):
        return "json"
    if getattr(parsed_args, "text", False):
        return "text"
    env_output = os.getenv(OUTPUT_ENV_VAR, "").lower()
    if env_output in ("json", "text"):
        return env_output
    return "text"


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {value!r}") from None
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {number}")
    return number


def _seed(value: str) -> int:
    try:
        number = int(value, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {value!r}") from None
    if not 0 <= number < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {number}")
    return number


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser."""
    common_parser = argparse.ArgumentParser(add_help=False)
    output_group = common_parser.add_mutually_exclusive_group()
    output_group.add_argument("--json", action="store_true", help="Output as JSON")
    output_group.add_argument("--text", action="store_true", help="Output as text")
    common_parser.add_argument(
        "-v", "--verbose", action="store_true", help="Log progress to stderr"
    )
    common_parser.add_argument(
        "--harness",
        help="Harness defaults profile (default: $ERGOLAB_HARNESS_PATH, ./private/harness.json, "
        "config/harness.template.json)",
    )
    common_parser.add_argument(
        "--threads",
        type=_positive_int,
        help=f"Worker threads for Monte Carlo trials (default: ${THREADS_ENV_VAR} or 1)",
    )
    common_parser.add_argument(
        "--seed", type=_seed, help="Master seed overriding the config and harness defaults"
    )

    parser = argparse.ArgumentParser(
        prog="ergolab",
        description="Spatial-temporal differentiation experiments on shifts and rotations",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Aliases:
  r=run, v=verify

Examples:
  ergolab run config/examples/pathological.json
  ergolab run --config config/examples/gauge_goldenmean.json --out ./results --json
  ergolab run config/examples/montecarlo.json --threads 8 --seed 7
  ergolab verify exact
  ergolab v all --threads 4
  ergolab show-config --json
""",
    )
    parser.add_argument("--version", "-V", action="version", version=f"%(prog)s {__version__}")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    run_parser = subparsers.add_parser(
        "run", aliases=["r"], help="Run the experiments of a config file", parents=[common_parser]
    )
    run_parser.add_argument("config_path", nargs="?", metavar="CONFIG", help="Config file")
    run_parser.add_argument("--config", dest="config_option", help="Config file")
    run_parser.add_argument(
        "--out", help="Output directory (default: $ERGOLAB_OUT_DIR or ./results)"
    )

    verify_parser = subparsers.add_parser(
        "verify", aliases=["v"], help="Run the acceptance suites", parents=[common_parser]
    )
    verify_parser.add_argument("suite", choices=SUITES, help="Suite to run")

    subparsers.add_parser(
        "show-config", help="Show the resolved harness defaults", parents=[common_parser]
    )

    return parser


__all__ = [
    "COMMAND_ALIASES",
    "LOG_LEVEL_ENV_VAR",
    "OUTPUT_ENV_VAR",
    "SUITES",
    "THREADS_ENV_VAR",
    "__version__",
    "build_parser",
    "resolve_output_mode",
]
