"""Tests for JSON schema validation of CLI output and experiment documents."""

import importlib
import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any

import pytest

from src.core.json_types import format_rational
from src.core.mc_harness import TrialResult
from src.ergolab.cli.output import build_response
from tests.conftest import validate_envelope

jsonschema: Any = None
try:
    jsonschema = importlib.import_module("jsonschema")
    HAS_JSONSCHEMA = True
except ImportError:
    HAS_JSONSCHEMA = False

REPO_ROOT = Path(__file__).parent.parent.parent
SCHEMAS_DIR = REPO_ROOT / "schemas"
EXAMPLES_DIR = REPO_ROOT / "config" / "examples"

needs_jsonschema = pytest.mark.skipif(not HAS_JSONSCHEMA, reason="jsonschema not installed")


def load_schema(name: str) -> dict[str, Any]:
    """Load a JSON schema from the schemas directory."""
    return json.loads((SCHEMAS_DIR / f"{name}.json").read_text())


class TestSchemaFiles:
    """Tests for the shipped schema files."""

    @pytest.mark.parametrize("name", ["envelope", "trial_result", "experiment"])
    def test_schema_is_draft_07(self, name):
        schema = load_schema(name)
        assert schema["$schema"] == "http://json-schema.org/draft-07/schema#"

    @needs_jsonschema
    @pytest.mark.parametrize("name", ["envelope", "trial_result", "experiment"])
    def test_schema_is_well_formed(self, name):
        jsonschema.Draft7Validator.check_schema(load_schema(name))

    def test_envelope_properties_match_validator(self):
        schema = load_schema("envelope")
        assert set(schema["required"]) == {"schema_version", "command", "timestamp", "success"}
        assert set(schema["properties"]) == {
            "schema_version",
            "command",
            "timestamp",
            "success",
            "data",
            "error",
        }


@needs_jsonschema
class TestEnvelopeSchema:
    """Tests for the envelope schema."""

    def test_built_response_validates(self):
        response = build_response("run", data={"experiments": []})
        jsonschema.validate(response, load_schema("envelope"))
        assert validate_envelope(response) == []

    def test_error_response_validates(self):
        response = build_response(
            "verify",
            success=False,
            error={"type": "AcceptanceFailure", "message": "criteria failed"},
        )
        jsonschema.validate(response, load_schema("envelope"))

    def test_unknown_command_fails(self):
        response = build_response("teleport", data={})
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(response, load_schema("envelope"))

    def test_invalid_schema_version_fails(self):
        response = build_response("run") | {"schema_version": 2}
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(response, load_schema("envelope"))

    def test_error_needs_message(self):
        response = build_response("run", success=False, error={"type": "ConfigError"})
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(response, load_schema("envelope"))


@needs_jsonschema
class TestTrialResultSchema:
    """Tests for Monte Carlo trial rows."""

    def _row(self):
        trial = TrialResult(
            4, 99, ((10, Fraction(2, 5)), (100, Fraction(51, 100))), Fraction(1, 2)
        )
        return trial.to_dict()

    def test_trial_row_validates(self):
        jsonschema.validate(self._row(), load_schema("trial_result"))

    def test_float_value_fails(self):
        row = self._row() | {"final_value": 0.51}
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(row, load_schema("trial_result"))

    def test_extra_field_fails(self):
        row = self._row() | {"timestamp": "2026-01-01T00:00:00"}
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(row, load_schema("trial_result"))

    def test_rational_format_matches_codec(self):
        pattern = load_schema("trial_result")["definitions"]["rational"]["pattern"]
        for value in (Fraction(0), Fraction(-3, 7), Fraction(5)):
            assert re.match(pattern, format_rational(value))


@needs_jsonschema
class TestExperimentSchema:
    """Tests for experiment documents."""

    @pytest.mark.parametrize("path", sorted(EXAMPLES_DIR.glob("*.json")), ids=lambda p: p.name)
    def test_shipped_examples_validate(self, path):
        jsonschema.validate(json.loads(path.read_text()), load_schema("experiment"))

    def test_unknown_kind_fails(self):
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate({"kind": "teleport"}, load_schema("experiment"))

    def test_missing_required_field_fails(self):
        document = {"experiments": [{"kind": "stdiff", "ks": [1]}]}
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(document, load_schema("experiment"))

    def test_float_probability_fails(self):
        document = {
            "kind": "montecarlo",
            "measure": {"type": "bernoulli", "p": [0.5, 0.5]},
            "word": [0],
        }
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate(document, load_schema("experiment"))
