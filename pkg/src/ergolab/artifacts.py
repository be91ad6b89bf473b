"""Atomic artifact writers: CSV series, JSON documents and JSON-lines trials.

Every writer goes through :func:`atomic_open`, so a reader sees either the previous
artifact or the complete new one, never a partial file.
"""

from __future__ import annotations

import json
import os
from collections.abc import Iterable, Iterator
from contextlib import contextmanager, suppress
from pathlib import Path
from tempfile import NamedTemporaryFile
from typing import TextIO

from src.core.json_types import JsonObject
from src.core.stdiff import DiffSeries


@contextmanager
def atomic_open(path: Path) -> Iterator[TextIO]:
    """Yield a text handle on a temp file beside ``path``; rename it over ``path`` on exit.

    On any exception the temp file is removed and ``path`` is left untouched.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with NamedTemporaryFile(
        "w",
        encoding="utf-8",
        dir=path.parent,
        prefix=f".{path.name}.",
        suffix=".tmp",
        delete=False,
        newline="",
    ) as handle:
        temp_path = Path(handle.name)
        try:
            yield handle
            handle.flush()
            os.fsync(handle.fileno())
        except BaseException:
            handle.close()
            with suppress(OSError):
                temp_path.unlink(missing_ok=True)
            raise
    try:
        temp_path.replace(path)
    except BaseException:
        with suppress(OSError):
            temp_path.unlink(missing_ok=True)
        raise


def write_text_atomic(path: Path, text: str) -> Path:
    with atomic_open(path) as handle:
        handle.write(text)
    return path


def dump_json(payload: object) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_json(path: Path, payload: object) -> Path:
    return write_text_atomic(path, dump_json(payload))


def write_jsonl(path: Path, rows: Iterable[JsonObject]) -> Path:
    """One compact, key-sorted JSON object per line, streamed row by row."""
    with atomic_open(path) as handle:
        for row in rows:
            handle.write(json.dumps(row, sort_keys=True, separators=(",", ":")))
            handle.write("\n")
    return path


def write_series_csv(path: Path, series: DiffSeries) -> Path:
    return write_text_atomic(path, series.to_csv())


__all__ = [
    "atomic_open",
    "dump_json",
    "write_json",
    "write_jsonl",
    "write_series_csv",
    "write_text_atomic",
]
