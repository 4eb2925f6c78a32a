"""Exceptions raised by the tetragon engine."""

from __future__ import annotations

from fractions import Fraction

from .const import EXIT_CERTIFICATION, EXIT_HYPOTHESIS, EXIT_INCONCLUSIVE, EXIT_PARSE


class TetragonError(Exception):
    """Base class for all engine errors."""

    translation_key = "unknown"
    exit_code = 1


class CurveSpecError(TetragonError):
    """A curve spec file could not be parsed or validated."""

    translation_key = "invalid_spec"
    exit_code = EXIT_PARSE

    def __init__(self, message: str, line: int | None = None, column: int | None = None) -> None:
        """Initialize with the position of the offending token."""
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column or 1}: {message}"
        super().__init__(message)


class HypothesisError(TetragonError):
    """The input violates a hypothesis the computation relies on."""

    translation_key = "hypothesis"
    exit_code = EXIT_HYPOTHESIS


class ZeroPolynomialError(HypothesisError):
    """A polynomial argument is identically zero."""

    translation_key = "zero_polynomial"


class CertificationError(TetragonError):
    """Strand tracking could not certify a path."""

    translation_key = "certification"
    exit_code = EXIT_CERTIFICATION

    def __init__(self, message: str, window: tuple[Fraction, Fraction] | None = None) -> None:
        """Initialize with the parameter window that failed."""
        self.window = window
        if window is not None:
            message = f"{message} (window {float(window[0]):.6g} .. {float(window[1]):.6g})"
        super().__init__(message)


class InconclusiveError(TetragonError):
    """Group analysis did not reach a verdict within its budget."""

    translation_key = "inconclusive"
    exit_code = EXIT_INCONCLUSIVE
