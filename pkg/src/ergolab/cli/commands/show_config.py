"""Configuration command: ``show-config``."""

from __future__ import annotations

from ..context import get_harness
from ..output import format_header, handle_cli_error, print_json_response


def cmd_show_config(*, harness_path: str | None = None, output_mode: str = "text") -> None:
    """Print the resolved harness defaults and where they came from."""
    command = "show-config"
    try:
        harness = get_harness(harness_path)
    except Exception as exc:
        handle_cli_error(exc, output_mode=output_mode, command=command)

    if output_mode == "json":
        print_json_response(command, data=harness.to_dict())
        return

    print(format_header("HARNESS DEFAULTS"))
    print(f"  Source:          {harness.source_path or 'built-in defaults'}")
    print(f"  Master seed:     {harness.master_seed}")
    print(f"  Trials:          {harness.n_trials}")
    print(f"  Pass fraction:   {harness.required_pass_fraction}")
    print(
        f"  Fixed centre:    ks={list(harness.fixed_center.ks)} "
        f"epsilon={harness.fixed_center.epsilon}"
    )
    print(
        f"  Random centres:  n_max={harness.random_centers.n_max} "
        f"epsilon={harness.random_centers.epsilon}"
    )
    print(
        f"  Rotation:        centres={harness.rotation.n_centers} k={harness.rotation.k} "
        f"bound={harness.rotation.bound}"
    )
    print()
