"""Experiment command: ``run``."""

from __future__ import annotations

from pathlib import Path

from src.core.errors import ConfigError

from ...paths import resolve_out_dir
from ...runner import ExperimentOutcome, load_experiments, run_experiment
from ..context import get_harness, log_experiment, resolve_threads
from ..output import format_outcome, handle_cli_error, print_json_response


def _resolve_config_path(config_path: str | None, config_option: str | None) -> Path:
    if config_path and config_option and Path(config_path) != Path(config_option):
        raise ConfigError(f"config: got both {config_path!r} and --config {config_option!r}")
    chosen = config_path or config_option
    if not chosen:
        raise ConfigError("config: pass a config file as CONFIG or --config PATH")
    return Path(chosen)


def cmd_run(
    config_path: str | None = None,
    *,
    config_option: str | None = None,
    out: str | None = None,
    threads: int | None = None,
    seed: int | None = None,
    harness_path: str | None = None,
    output_mode: str = "text",
) -> None:
    """Validate every experiment of a config, then run them in order and write artifacts.

    Nothing is written when validation fails.
    """
    command = "run"
    try:
        path = _resolve_config_path(config_path, config_option)
        harness = get_harness(harness_path).with_seed(seed)
        experiments = load_experiments(path, harness, seed_override=seed)
        workers = resolve_threads(threads)
        out_dir = resolve_out_dir(out)

        outcomes: list[ExperimentOutcome] = []
        for experiment in experiments:
            try:
                outcome = run_experiment(experiment, out_dir, harness, threads=workers)
            except Exception as exc:
                log_experiment(
                    kind=experiment.kind.value,
                    config=str(path),
                    status=f"ERROR: {type(exc).__name__}",
                )
                raise
            log_experiment(
                kind=experiment.kind.value,
                config=str(path),
                status="OK",
                outputs=outcome.outputs,
            )
            outcomes.append(outcome)
    except Exception as exc:
        handle_cli_error(exc, output_mode=output_mode, command=command)

    if output_mode == "json":
        print_json_response(
            command,
            data={
                "config": str(path),
                "out_dir": str(out_dir),
                "experiments": [outcome.to_dict() for outcome in outcomes],
            },
        )
        return

    for outcome in outcomes:
        print(format_outcome(outcome))
