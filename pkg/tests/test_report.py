"""Tests for analysis reports."""

from dataclasses import replace

import pytest

from tetragon.const import FORMAT_SCRIPT, STATUS_EXACT, STATUS_HEURISTIC
from tetragon.coordinator import AnalysisData, PerturbationData
from tetragon.curvespec import CurveSpec
from tetragon.grouplab import (
    AbelianGroup,
    CosetTable,
    GammaCertificate,
    LaurentPoly,
    TableStatus,
    Verdict,
)
from tetragon.report import expectation_failures, render, render_braids, report_values
from tetragon.vankampen import Assembly, Presentation

CYCLE = tuple(((k + 1) % 6, (k - 1) % 6) for k in range(6))


@pytest.fixture
def data(small_spec: CurveSpec, bare_assembly: Assembly) -> AnalysisData:
    """Analysis results of a small group."""
    p = Presentation(2, ((1, -2), (1,) * 6))
    return AnalysisData(
        spec=small_spec,
        assembly=bare_assembly,
        presentation=p,
        simplified=Presentation(1, ((1,) * 6,)),
        abelianization=AbelianGroup((6,)),
        order=CosetTable(TableStatus.COMPLETE, 100, CYCLE),
        alexander=LaurentPoly((1,)),
        probes=[((1,), 2, CosetTable(TableStatus.OVERFLOW, 100))],
        notes=["torus type: the group is infinite"],
    )


def test_render_text(data: AnalysisData) -> None:
    """Test the lines of the text report."""
    text = render(data)
    lines = text.splitlines()
    assert lines[0] == "curve: small"
    assert "relations: complete [proved-exact]" in lines
    assert "order: complete, index 6 [heuristic]" in lines
    assert "abelianization: C6 [heuristic]" in lines
    assert "Alexander polynomial: 1 [heuristic]" in lines
    assert "quotient probes: (a1)^2: overflow beyond 100 cosets [heuristic]" in lines
    assert "simplified presentation: 1 generators, 1 relators, total length 6 [heuristic]" in text
    assert lines[-1] == "note: torus type: the group is infinite"


def test_report_is_deterministic(data: AnalysisData) -> None:
    """Test that timings never reach the report."""
    first = render(data)
    data.timings["order"] = 12.5
    assert render(data) == first


def test_report_values(data: AnalysisData) -> None:
    """Test the available fields and their status."""
    values = report_values(data)
    assert values["completeness"] == ("complete", STATUS_EXACT)
    assert values["abelianization"] == ("C6", STATUS_HEURISTIC)
    assert "fibers" not in values
    assert "gamma" not in values


def test_render_gamma_certificate(data: AnalysisData) -> None:
    """Test that a positive verdict is followed by its certificate."""
    data.gamma = GammaCertificate(
        Verdict.GAMMA, ratio=(1, -2), abelianization=AbelianGroup((6,)), closure_index=6
    )
    text = render(data)
    assert "C2*C3: gamma [heuristic]" in text
    assert "  ratio: a1 a2^-1" in text


def test_render_script(data: AnalysisData) -> None:
    """Test the exported session."""
    script = render(data, FORMAT_SCRIPT)
    assert script.startswith("# small\n")
    assert "Size(g);" in script


def test_render_unknown_format(data: AnalysisData) -> None:
    """Test that an unknown format is refused."""
    with pytest.raises(ValueError):
        render(data, "html")


def test_render_braids(data: AnalysisData) -> None:
    """Test the braid listing."""
    text = render_braids(data)
    assert "gamma_0 = 1" in text
    assert "beta_inf = s1 s2 s3 s1 s2 s1^2 s2 s3 s1 s2 s1" in text


def test_render_perturbation(data: AnalysisData) -> None:
    """Test the perturbation line."""
    data.perturbation = PerturbationData(
        fiber=2,
        point=0,
        split=(5, 2),
        exponent=3,
        presentation=data.presentation,
        abelianization=AbelianGroup((6,)),
        order=data.order,
    )
    assert "perturbation: fiber 2 point 0 -> A5+A2, exponent 3, C6" in render(data)


def test_expectations_met(data: AnalysisData) -> None:
    """Test that a matching order passes."""
    assert expectation_failures(data) == []


def test_expectations_failed(data: AnalysisData) -> None:
    """Test messages for wrong and missing values."""
    data.spec = replace(
        data.spec,
        expect={"order": "42", "abelianization": "C6", "gamma": "yes", "real_fibers": "5"},
    )
    assert expectation_failures(data) == [
        "order: expected 42, got 6",
        "gamma: expected yes, not computed",
        "real_fibers: expected 5, not computed",
    ]


def test_bare_assembly_reference(data: AnalysisData) -> None:
    """Test the reference fiber line."""
    assert "reference fiber: x0+ [proved-exact]" in render(data)
