"""Command routing for the ergolab CLI."""

from __future__ import annotations

import sys

from dotenv import load_dotenv

try:
    import argcomplete

    ARGCOMPLETE_AVAILABLE = True
except ImportError:
    ARGCOMPLETE_AVAILABLE = False

from .commands import get_command
from .context import configure_logging
from .parser import COMMAND_ALIASES, build_parser, resolve_output_mode


def _handler(name: str):
    return globals().get(name) or get_command(name)


def main(args: list | None = None) -> None:
    """Parse argv, load `.env`, set up logging and dispatch to a command handler."""
    load_dotenv()
    parser = build_parser()

    if ARGCOMPLETE_AVAILABLE:
        argcomplete.autocomplete(parser)

    parsed = parser.parse_args(args)

    if parsed.command in COMMAND_ALIASES:
        parsed.command = COMMAND_ALIASES[parsed.command]

    if not parsed.command:
        parser.print_help()
        sys.exit(0)

    output_mode = resolve_output_mode(parsed)
    configure_logging(verbose=getattr(parsed, "verbose", False))
    harness_path = getattr(parsed, "harness", None)

    if parsed.command == "run":
        _handler("cmd_run")(
            getattr(parsed, "config_path", None),
            config_option=getattr(parsed, "config_option", None),
            out=getattr(parsed, "out", None),
            threads=getattr(parsed, "threads", None),
            seed=getattr(parsed, "seed", None),
            harness_path=harness_path,
            output_mode=output_mode,
        )
    elif parsed.command == "verify":
        _handler("cmd_verify")(
            parsed.suite,
            threads=getattr(parsed, "threads", None),
            seed=getattr(parsed, "seed", None),
            harness_path=harness_path,
            output_mode=output_mode,
        )
    elif parsed.command == "show-config":
        _handler("cmd_show_config")(harness_path=harness_path, output_mode=output_mode)
    else:
        parser.print_help()
        sys.exit(1)
