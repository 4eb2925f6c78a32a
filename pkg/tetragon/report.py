"""Reports for analysed curves."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

from .braidkit import describe, format_word
from .const import (
    ATTR_ABELIANIZATION,
    ATTR_ALEXANDER,
    ATTR_COMPLETENESS,
    ATTR_GAMMA,
    ATTR_ORDER,
    FORMAT_SCRIPT,
    FORMAT_TEXT,
    STATUS_EXACT,
    STATUS_HEURISTIC,
    STATUS_TRACKED,
)
from .coordinator import AnalysisData
from .fiberscan import describe_nonreal
from .vankampen import braid_listing


@dataclass(frozen=True, kw_only=True)
class ReportFieldDescription:
    """Describes one line of a report."""

    key: str
    label: str
    value_fn: Callable[[AnalysisData], Any]
    status_fn: Callable[[AnalysisData], str]
    available_fn: Callable[[AnalysisData], bool] = lambda data: True


def _braid_status(data: AnalysisData) -> str:
    return STATUS_TRACKED if data.is_validated else STATUS_HEURISTIC


def _fibers(data: AnalysisData) -> str:
    diagram = data.diagram
    parts = []
    for i, event in enumerate(diagram.events, start=1):
        where = diagram.original_position(event)
        parts.append(f"x{i}~{where:.6g} {event.label}")
    return "; ".join(parts)


def _order(data: AnalysisData) -> str:
    return str(data.order)


def _presentation(data: AnalysisData) -> str:
    p = data.simplified
    return f"{p.generators} generators, {len(p.relators)} relators, total length {p.total_length}"


def _probes(data: AnalysisData) -> str:
    return "; ".join(f"({format_word(w)})^{k}: {table}" for w, k, table in data.probes)


def _perturbation(data: AnalysisData) -> str:
    result = data.perturbation
    mu1, mu2 = result.split
    return (
        f"fiber {result.fiber} point {result.point} -> A{mu1}+A{mu2}, exponent {result.exponent}, "
        f"{result.classification}"
    )


REPORT_FIELDS: tuple[ReportFieldDescription, ...] = (
    ReportFieldDescription(
        key="fibers",
        label="real singular fibers",
        value_fn=_fibers,
        status_fn=_braid_status,
        available_fn=lambda data: data.diagram is not None,
    ),
    ReportFieldDescription(
        key="nonreal",
        label="non-real singular fibers",
        value_fn=lambda data: ", ".join(describe_nonreal(data.diagram.nonreal)) or "none",
        status_fn=lambda data: STATUS_EXACT,
        available_fn=lambda data: data.diagram is not None,
    ),
    ReportFieldDescription(
        key="twists",
        label="twist parameters",
        value_fn=lambda data: " ".join(str(s.twist) for s in data.diagram.segments),
        status_fn=lambda data: STATUS_EXACT,
        available_fn=lambda data: data.diagram is not None,
    ),
    ReportFieldDescription(
        key="reference",
        label="reference fiber",
        value_fn=lambda data: f"x{data.assembly.reference}+",
        status_fn=lambda data: STATUS_EXACT,
        available_fn=lambda data: data.assembly is not None,
    ),
    ReportFieldDescription(
        key=ATTR_COMPLETENESS,
        label="relations",
        value_fn=lambda data: data.assembly.completeness,
        status_fn=lambda data: STATUS_EXACT,
        available_fn=lambda data: data.assembly is not None,
    ),
    ReportFieldDescription(
        key="validation",
        label="tracked braids",
        value_fn=lambda data: f"{len(data.validation.entries)} paths agree",
        status_fn=lambda data: STATUS_TRACKED,
        available_fn=lambda data: data.validation is not None,
    ),
    ReportFieldDescription(
        key="presentation",
        label="simplified presentation",
        value_fn=_presentation,
        status_fn=_braid_status,
        available_fn=lambda data: data.simplified is not None,
    ),
    ReportFieldDescription(
        key=ATTR_ABELIANIZATION,
        label="abelianization",
        value_fn=lambda data: str(data.abelianization),
        status_fn=_braid_status,
        available_fn=lambda data: data.abelianization is not None,
    ),
    ReportFieldDescription(
        key=ATTR_ORDER,
        label="order",
        value_fn=_order,
        status_fn=_braid_status,
        available_fn=lambda data: data.order is not None,
    ),
    ReportFieldDescription(
        key=ATTR_ALEXANDER,
        label="Alexander polynomial",
        value_fn=lambda data: str(data.alexander),
        status_fn=_braid_status,
        available_fn=lambda data: data.alexander is not None,
    ),
    ReportFieldDescription(
        key=ATTR_GAMMA,
        label="C2*C3",
        value_fn=lambda data: data.gamma.verdict.value,
        status_fn=_braid_status,
        available_fn=lambda data: data.gamma is not None,
    ),
    ReportFieldDescription(
        key="probes",
        label="quotient probes",
        value_fn=_probes,
        status_fn=_braid_status,
        available_fn=lambda data: bool(data.probes),
    ),
    ReportFieldDescription(
        key="perturbation",
        label="perturbation",
        value_fn=_perturbation,
        status_fn=_braid_status,
        available_fn=lambda data: data.perturbation is not None,
    ),
)


def report_values(data: AnalysisData) -> dict[str, tuple[Any, str]]:
    """Available report fields with their certificate status."""
    return {
        description.key: (description.value_fn(data), description.status_fn(data))
        for description in REPORT_FIELDS
        if description.available_fn(data)
    }


def render_text(data: AnalysisData) -> str:
    """The canonical report body; it carries no timing information."""
    lines = [f"curve: {data.spec.name}"]
    for description in REPORT_FIELDS:
        if not description.available_fn(data):
            continue
        value = description.value_fn(data)
        lines.append(f"{description.label}: {value} [{description.status_fn(data)}]")
    if data.gamma is not None and data.gamma.is_gamma:
        lines.extend(f"  {line}" for line in data.gamma.describe().splitlines())
    lines.extend(f"note: {note}" for note in data.notes)
    return "\n".join(lines) + "\n"


def render_script(data: AnalysisData) -> str:
    """A GAP session reproducing the group computation."""
    p = data.presentation
    ratio = data.spec.ratio_words[0] if data.spec.ratios else None
    header = f"# {data.spec.name}\n"
    return header + p.script_export(ratio)


def render_braids(data: AnalysisData) -> str:
    """All combinatorial braids, one per line."""
    return describe(braid_listing(data.assembly)) + "\n"


def render(data: AnalysisData, fmt: str = FORMAT_TEXT) -> str:
    """Render a report in the requested format."""
    if fmt == FORMAT_SCRIPT:
        return render_script(data)
    if fmt != FORMAT_TEXT:
        raise ValueError(f"unknown report format {fmt!r}")
    return render_text(data)


def _gamma_expectation(data: AnalysisData) -> str:
    return "yes" if data.gamma.is_gamma else data.gamma.verdict.value


# Observed value for each ``expect.<key>`` line of a curve spec, None when not computed
EXPECTATIONS: dict[str, Callable[[AnalysisData], Any]] = {
    ATTR_ORDER: lambda data: data.order and data.order.index,
    ATTR_ABELIANIZATION: lambda data: data.abelianization,
    ATTR_GAMMA: lambda data: data.gamma and _gamma_expectation(data),
    ATTR_ALEXANDER: lambda data: data.alexander,
    "real_fibers": lambda data: data.diagram and len(data.diagram.events),
    ATTR_COMPLETENESS: lambda data: data.assembly and data.assembly.completeness,
    "generators": lambda data: data.simplified and data.simplified.generators,
    "relators": lambda data: data.simplified and len(data.simplified.relators),
    "total_length": lambda data: data.simplified and data.simplified.total_length,
}


def expectation_failures(data: AnalysisData) -> list[str]:
    """Expectations of the spec that the analysis contradicts."""
    failures = []
    for key, expected in data.spec.expect.items():
        observed = EXPECTATIONS[key](data)
        if observed is None:
            failures.append(f"{key}: expected {expected}, not computed")
        elif str(observed) != expected:
            failures.append(f"{key}: expected {expected}, got {observed}")
    return failures
