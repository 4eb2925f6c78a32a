"""Tests for user-facing messages."""

import json
from pathlib import Path

import pytest

from tetragon.exceptions import (
    CertificationError,
    CurveSpecError,
    HypothesisError,
    TetragonError,
)
from tetragon.messages import LANGUAGES, command_text, error_message, translations

PACKAGE = Path(__file__).parents[1] / "tetragon"


def _keys(tree: dict, prefix: str = "") -> set[str]:
    keys = set()
    for key, value in tree.items():
        path = f"{prefix}.{key}" if prefix else key
        keys.add(path)
        if isinstance(value, dict):
            keys |= _keys(value, path)
    return keys


@pytest.mark.parametrize("language", LANGUAGES)
def test_translations_match_strings(language: str) -> None:
    """Test that every translation has the keys of strings.json."""
    strings = json.loads((PACKAGE / "strings.json").read_text(encoding="utf-8"))
    assert _keys(translations(language)) == _keys(strings)


def test_unknown_language_falls_back() -> None:
    """Test that an unknown language gives the English texts."""
    assert translations("de") == translations("en")


def test_command_text() -> None:
    """Test descriptions and field help."""
    assert command_text("svg") == "Draw the real part of the curve as an SVG diagram"
    assert command_text("svg", "output") == "Output SVG path"
    assert command_text("braids", language="fr") != command_text("braids")


def test_error_message() -> None:
    """Test that the error detail is inserted in its template."""
    err = CurveSpecError("bad token", line=2, column=5)
    assert error_message(err) == "The curve spec is invalid: line 2, column 5: bad token"
    assert error_message(HypothesisError("four real roots")).endswith(": four real roots")
    assert error_message(CertificationError("step too small")).startswith("Strand tracking")
    assert error_message(CertificationError("step too small"), "fr").startswith("Le suivi")


def test_error_message_unknown_key() -> None:
    """Test the generic template of the base error."""
    assert error_message(TetragonError("boom")) == "Unexpected error: boom"
