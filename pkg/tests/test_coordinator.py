"""Tests for the pipeline coordinator."""

from dataclasses import replace
from pathlib import Path
from unittest.mock import MagicMock, patch

import pytest

from tetragon.braidkit import Braid
from tetragon.coordinator import (
    PERTURBED_CYCLIC,
    PERTURBED_GAMMA,
    PERTURBED_UNKNOWN,
    AnalysisCoordinator,
    AnalysisData,
    AnalysisOptions,
    PerturbationData,
    async_analyze_many,
    specs_in,
)
from tetragon.curvespec import CurveSpec
from tetragon.exceptions import CertificationError, HypothesisError
from tetragon.grouplab import (
    AbelianGroup,
    CosetTable,
    GammaCertificate,
    TableStatus,
    Verdict,
)
from tetragon.tracker import ValidationEntry, ValidationReport
from tetragon.vankampen import Assembly, Presentation

CYCLE = tuple(((k + 1) % 6, (k - 1) % 6) for k in range(6))


def _scanned(spec: CurveSpec, assembly: Assembly) -> AnalysisData:
    return AnalysisData(spec=spec, diagram=MagicMock(), assembly=assembly)


def _perturbation(**kwargs) -> PerturbationData:
    values = {
        "fiber": 1,
        "point": 0,
        "split": (5, 2),
        "exponent": 3,
        "presentation": Presentation(1, ((1,) * 6,)),
        "abelianization": AbelianGroup((6,)),
    }
    return PerturbationData(**(values | kwargs))


def test_perturbation_classification() -> None:
    """Test the three outcomes of a perturbation."""
    gamma = GammaCertificate(Verdict.GAMMA, ratio=(1, -2))
    assert _perturbation(gamma=gamma).classification == PERTURBED_GAMMA
    cyclic = CosetTable(TableStatus.COMPLETE, 100, CYCLE)
    assert _perturbation(order=cyclic).classification == PERTURBED_CYCLIC
    overflow = CosetTable(TableStatus.OVERFLOW, 100)
    assert _perturbation(order=overflow).classification == PERTURBED_UNKNOWN
    assert _perturbation().classification == PERTURBED_UNKNOWN


def test_specs_in(tmp_path: Path) -> None:
    """Test that directories expand to their sorted spec files."""
    for name in ("b.curve", "a.curve", "notes.txt"):
        (tmp_path / name).write_text("", encoding="utf-8")
    single = tmp_path / "elsewhere.curve"
    assert specs_in([tmp_path, single]) == [
        tmp_path / "a.curve",
        tmp_path / "b.curve",
        single,
    ]


async def test_analyze_many_sequential(small_spec: CurveSpec) -> None:
    """Test that results keep the input order and errors are returned."""
    data = AnalysisData(spec=small_spec)
    failure = HypothesisError("four real roots")
    with patch(
        "tetragon.coordinator.analyze_path", side_effect=[data, failure]
    ) as analyze_path:
        results = await async_analyze_many(["a.curve", "b.curve"], AnalysisOptions(), jobs=1)
    assert results == [data, failure]
    assert analyze_path.call_count == 2


def test_validate_needs_scan(small_spec: CurveSpec) -> None:
    """Test that validation requires a diagram."""
    with pytest.raises(HypothesisError):
        AnalysisCoordinator().validate(AnalysisData(spec=small_spec))


def test_validate_reports_mismatch(small_spec: CurveSpec, bare_assembly: Assembly) -> None:
    """Test that disagreeing braids raise and keep the report."""
    report = ValidationReport(
        entries=[ValidationEntry("beta_1", Braid.sigma(2, 1), Braid.sigma(2, -1), 4)]
    )
    data = _scanned(small_spec, bare_assembly)
    with (
        patch("tetragon.coordinator.cross_validate", return_value=report),
        pytest.raises(CertificationError, match="beta_1"),
    ):
        AnalysisCoordinator().validate(data)
    assert data.validation is report
    assert "validate" in data.timings


def test_run_without_validation(small_spec: CurveSpec, bare_assembly: Assembly) -> None:
    """Test the group stages on a prepared assembly."""
    coordinator = AnalysisCoordinator(
        AnalysisOptions(validate=False, coset_limit=50, probes=(((1,), 2),))
    )
    with patch.object(
        AnalysisCoordinator, "scan", return_value=_scanned(small_spec, bare_assembly)
    ):
        data = coordinator.run(small_spec)
    assert data.presentation.generators == 4
    assert data.abelianization == AbelianGroup((2,), 3)
    assert data.order.status is TableStatus.OVERFLOW
    assert data.gamma is None
    assert len(data.probes) == 1
    assert "braids not cross-checked by tracking" in data.notes
    assert {"presentation", "tietze", "order"} <= set(data.timings)


def test_torus_type_skips_enumeration(small_spec: CurveSpec, bare_assembly: Assembly) -> None:
    """Test that a torus type curve is not enumerated."""
    spec = replace(small_spec, torus_type=True)
    data = _scanned(spec, bare_assembly)
    data.presentation = Presentation(2, ((1, 1), (2, 2, 2)))
    AnalysisCoordinator().analyze_group(data)
    assert data.order is None
    assert "torus type: the group is infinite" in data.notes


def test_perturb(small_spec: CurveSpec, one_fiber_assembly: Assembly) -> None:
    """Test that a perturbation replaces the presentation."""
    coordinator = AnalysisCoordinator(AnalysisOptions(coset_limit=50))
    with patch.object(
        AnalysisCoordinator, "scan", return_value=_scanned(small_spec, one_fiber_assembly)
    ):
        data = coordinator.perturb(small_spec, 1, 0, (0, 0))
    assert data.perturbation.exponent == 1
    assert data.presentation is data.perturbation.presentation
    assert data.perturbation.order is not None
    assert data.perturbation.classification in (
        PERTURBED_GAMMA,
        PERTURBED_CYCLIC,
        PERTURBED_UNKNOWN,
    )
