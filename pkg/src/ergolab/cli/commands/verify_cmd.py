"""Acceptance command: ``verify``."""

from __future__ import annotations

import sys

from src.core.errors import ConfigError

from ...acceptance import Suite, run_suite
from ..context import get_harness, resolve_threads
from ..output import (
    EXIT_FAILURE,
    format_criterion,
    format_header,
    format_tally,
    handle_cli_error,
    print_json_response,
)


def cmd_verify(
    suite: str,
    *,
    threads: int | None = None,
    seed: int | None = None,
    harness_path: str | None = None,
    output_mode: str = "text",
) -> None:
    """Run an acceptance suite; exit 1 when any criterion fails."""
    command = "verify"
    try:
        try:
            chosen = Suite(suite)
        except ValueError:
            raise ConfigError(
                f"suite: expected one of {', '.join(s.value for s in Suite)}, got {suite!r}"
            ) from None
        harness = get_harness(harness_path).with_seed(seed)
        results = run_suite(chosen, harness, threads=resolve_threads(threads))
    except Exception as exc:
        handle_cli_error(exc, output_mode=output_mode, command=command)

    passed = all(result.passed for result in results)
    if output_mode == "json":
        print_json_response(
            command,
            success=passed,
            data={
                "suite": chosen.value,
                "master_seed": harness.master_seed,
                "passed": passed,
                "results": [result.to_dict() for result in results],
            },
            error=None if passed else {"type": "AcceptanceFailure", "message": "criteria failed"},
        )
    else:
        print(format_header(f"VERIFY {chosen.value.upper()}"))
        for result in results:
            print(format_criterion(result))
        print()
        print(format_tally(results))

    if not passed:
        sys.exit(EXIT_FAILURE)
