"""
Envelope, exit codes and text rendering for ergolab commands.

``--json`` prints one envelope per invocation (``schemas/envelope.json``);
text mode prints one line per experiment or criterion.
"""

from __future__ import annotations

import json
import sys
from datetime import datetime
from typing import TYPE_CHECKING, NoReturn

from src.core.errors import ConfigError, ErgolabError
from src.core.json_types import JsonObject

if TYPE_CHECKING:
    from ..acceptance import CriterionResult
    from ..runner import ExperimentOutcome

SCHEMA_VERSION = 1

EXIT_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3

# First match wins; ModelError is a ConfigError.
_EXIT_CODES: tuple[tuple[type[BaseException], int, str], ...] = (
    (ConfigError, EXIT_CONFIG_ERROR, "Configuration error"),
    (ErgolabError, EXIT_RUNTIME_ERROR, "Error"),
)


def build_response(
    command: str,
    *,
    success: bool = True,
    data: JsonObject | None = None,
    error: JsonObject | None = None,
) -> JsonObject:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "timestamp": datetime.now().isoformat(timespec="seconds"),
        "success": success,
        "data": data,
        "error": error,
    }


def print_json_response(
    command: str,
    *,
    success: bool = True,
    data: JsonObject | None = None,
    error: JsonObject | None = None,
) -> None:
    response = build_response(command, success=success, data=data, error=error)
    print(json.dumps(response, indent=2, default=str))


def exit_code_for(error: BaseException) -> int:
    """2 for config and model errors, 3 for everything raised while computing."""
    for error_type, code, _ in _EXIT_CODES:
        if isinstance(error, error_type):
            return code
    return EXIT_RUNTIME_ERROR


def error_payload(error: BaseException) -> JsonObject:
    name = type(error).__name__ if isinstance(error, ErgolabError) else "UnexpectedError"
    return {"type": name, "message": str(error)}


def handle_cli_error(error: Exception, *, output_mode: str, command: str) -> NoReturn:
    """Report ``error`` on stdout (json) or stderr (text) and exit with its code."""
    code = exit_code_for(error)
    if output_mode == "json":
        print_json_response(command, success=False, error=error_payload(error))
    else:
        label = next(
            (label for error_type, _, label in _EXIT_CODES if isinstance(error, error_type)),
            "Unexpected error",
        )
        if label == "Error":
            label = f"Error ({type(error).__name__})"
        print(f"{label}: {error}", file=sys.stderr)
    sys.exit(code)


def format_header(title: str, width: int = 60) -> str:
    return f"\n{'=' * width}\n{title}\n{'=' * width}"


def format_outcome(outcome: ExperimentOutcome) -> str:
    return f"{outcome.kind} {outcome.name}: {outcome.summary}"


def format_criterion(result: CriterionResult) -> str:
    status = "PASS" if result.passed else "FAIL"
    return (
        f"  [{status}] {result.number:>2}. {result.title}: "
        f"{result.detail} ({result.seconds:.2f}s)"
    )


def format_tally(results: list[CriterionResult]) -> str:
    return f"  {sum(result.passed for result in results)}/{len(results)} criteria passed"
