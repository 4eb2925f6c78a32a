"""User-facing messages, read from the bundled translations."""

from __future__ import annotations

import json
import logging
from functools import cache
from importlib import resources
from typing import Any

from .exceptions import TetragonError

_LOGGER = logging.getLogger(__name__)

DEFAULT_LANGUAGE = "en"
LANGUAGES = ("en", "fr")


@cache
def translations(language: str = DEFAULT_LANGUAGE) -> dict[str, Any]:
    """The translation tree for a language, falling back to English."""
    if language not in LANGUAGES:
        _LOGGER.warning("No translation for %s, using %s", language, DEFAULT_LANGUAGE)
        language = DEFAULT_LANGUAGE
    text = (resources.files(__package__) / "translations" / f"{language}.json").read_text(
        encoding="utf-8"
    )
    return json.loads(text)


def command_text(command: str, field: str | None = None, language: str = DEFAULT_LANGUAGE) -> str:
    """Help text of a command or of one of its fields."""
    entry = translations(language)["commands"][command]
    return entry["description"] if field is None else entry["fields"][field]


def error_message(err: TetragonError, language: str = DEFAULT_LANGUAGE) -> str:
    """Localized message for an engine error."""
    errors = translations(language)["error"]
    template = errors.get(err.translation_key, errors["unknown"])
    return template.format(detail=err)
