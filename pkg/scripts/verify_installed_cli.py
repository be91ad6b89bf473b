#!/usr/bin/env python3
"""Smoke-test the installed ergolab CLI from outside the source tree."""

from __future__ import annotations

import argparse
import json
import shutil
import subprocess
import tempfile
from pathlib import Path

SMOKE_DOCUMENT = {
    "experiments": [
        {"kind": "pathological", "name": "smoke_pathological", "n_max": 4, "method": "counted"},
        {
            "kind": "gauge",
            "name": "smoke_gauge",
            "sft": "golden_mean",
            "function": {"terms": [{"word": [1]}]},
            "k_max": 20,
            "measure": "max_entropy",
        },
    ]
}


def run(command: list[str], *, cwd: Path) -> subprocess.CompletedProcess[str]:
    result = subprocess.run(command, cwd=cwd, capture_output=True, text=True)
    if result.returncode != 0:
        raise SystemExit(
            f"Command failed ({result.returncode}): {' '.join(command)}\n\n"
            f"STDOUT:\n{result.stdout}\n\nSTDERR:\n{result.stderr}"
        )
    return result


def parse_json(stdout: str) -> dict:
    try:
        return json.loads(stdout)
    except json.JSONDecodeError as exc:
        raise SystemExit(f"Expected JSON output, got:\n{stdout}") from exc


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--with-exact-suite",
        action="store_true",
        help="Also run `ergolab verify exact` (takes a few minutes)",
    )
    args = parser.parse_args()

    cli = shutil.which("ergolab")
    if not cli:
        raise SystemExit(
            "`ergolab` is not on PATH. Install it first with `uv tool install -e .` "
            "or `pipx install .`."
        )

    with tempfile.TemporaryDirectory(prefix="ergolab-smoke-") as temp_dir:
        cwd = Path(temp_dir)

        run([cli, "--help"], cwd=cwd)

        config = parse_json(run([cli, "show-config", "--json"], cwd=cwd).stdout)
        assert config["success"] is True

        document = cwd / "smoke.json"
        document.write_text(json.dumps(SMOKE_DOCUMENT))
        out_dir = cwd / "results"
        response = parse_json(
            run([cli, "run", str(document), "--out", str(out_dir), "--json"], cwd=cwd).stdout
        )
        assert response["success"] is True
        assert (out_dir / "smoke_pathological.csv").exists()
        gauge = json.loads((out_dir / "smoke_gauge.json").read_text())
        assert gauge["mmc"] == "1/2"

        if args.with_exact_suite:
            verify = parse_json(run([cli, "verify", "exact", "--json"], cwd=cwd).stdout)
            assert verify["data"]["passed"] is True

        print("ergolab installed CLI verification passed")
        print(f"verified from: {cwd}")

    return 0


if __name__ == "__main__":
    raise SystemExit(main())
