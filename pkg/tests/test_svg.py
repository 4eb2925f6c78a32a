"""Tests for SVG diagrams."""

from fractions import Fraction
from pathlib import Path
from types import SimpleNamespace

import pytest

from tetragon.exactpoly import Y, bipoly
from tetragon.exceptions import TetragonError
from tetragon.svg import write_svg


@pytest.fixture
def diagram() -> SimpleNamespace:
    """Four real branches crossed by one marked fiber."""
    point = SimpleNamespace(special=False, y0=complex(1, 0))
    node = SimpleNamespace(special=True, y0=complex(-2, 0))
    return SimpleNamespace(
        f=bipoly((Y**2 - 1) * (Y**2 - 4)),
        events=(SimpleNamespace(label="A1", points=(point, node)),),
        segments=(
            SimpleNamespace(index=0, start=Fraction(-2), end=Fraction(0), real_count=4),
            SimpleNamespace(index=1, start=Fraction(0), end=Fraction(2), real_count=4),
        ),
    )


def test_write_svg(diagram: SimpleNamespace, tmp_path: Path) -> None:
    """Test that the file is written with the title and fiber labels."""
    path = write_svg(diagram, tmp_path / "curve.svg", "small")
    text = path.read_text(encoding="utf-8")
    assert text.lstrip().startswith("<?xml")
    assert "small" in text
    assert "x1" in text
    assert "A1" in text


def test_write_svg_is_deterministic(diagram: SimpleNamespace, tmp_path: Path) -> None:
    """Test that two renderings are byte identical."""
    first = write_svg(diagram, tmp_path / "a.svg").read_bytes()
    second = write_svg(diagram, tmp_path / "b.svg").read_bytes()
    assert first == second
    assert b"<dc:date>" not in first


def test_write_svg_unwritable(diagram: SimpleNamespace, tmp_path: Path) -> None:
    """Test that an unwritable path is an engine error."""
    with pytest.raises(TetragonError, match="cannot write"):
        write_svg(diagram, tmp_path / "missing" / "curve.svg")
