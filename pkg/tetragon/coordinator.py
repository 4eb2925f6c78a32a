"""Pipeline coordinator: from a curve spec to group invariants."""

from __future__ import annotations

import asyncio
import logging
import time
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import TypeVar

from .braidkit import FreeWord
from .const import (
    DEFAULT_COSET_LIMIT,
    DEFAULT_DPS,
    DEFAULT_JOBS,
    DEFAULT_TIETZE_BUDGET,
)
from .curvespec import CurveSpec, load
from .exceptions import CertificationError, HypothesisError, TetragonError
from .fiberscan import CurveDiagram, improper_to_proper, scan_curve
from .grouplab import (
    AbelianGroup,
    CosetTable,
    GammaCertificate,
    LaurentPoly,
    abelianization,
    alexander_polynomial,
    quotient_probe,
    recognize_gamma,
    tietze_simplify,
    todd_coxeter,
)
from .tracker import ValidationReport, cross_validate
from .vankampen import (
    Assembly,
    Presentation,
    assemble,
    infinity_bracket,
    perturb,
    perturbation_exponent,
    presentation,
    shift_reference,
)

_LOGGER = logging.getLogger(__name__)

_T = TypeVar("_T")

# Classification of a perturbed sextic group
PERTURBED_GAMMA = "C2*C3"
PERTURBED_CYCLIC = "C6"
PERTURBED_UNKNOWN = "inconclusive"


@dataclass(frozen=True)
class AnalysisOptions:
    """Knobs shared by every stage of the pipeline."""

    reference_fiber: int | None = None
    coset_limit: int = DEFAULT_COSET_LIMIT
    tietze_budget: int = DEFAULT_TIETZE_BUDGET
    validate: bool = True
    dps: int = DEFAULT_DPS
    probes: tuple[tuple[FreeWord, int], ...] = ()


@dataclass
class PerturbationData:
    """Outcome of splitting one singular point."""

    fiber: int
    point: int
    split: tuple[int, int]
    exponent: int
    presentation: Presentation
    abelianization: AbelianGroup
    order: CosetTable | None = None
    gamma: GammaCertificate | None = None

    @property
    def classification(self) -> str:
        """C2*C3 when certified, C6 when the group has order 6."""
        if self.gamma is not None and self.gamma.is_gamma:
            return PERTURBED_GAMMA
        if self.order is not None and self.order.index == 6 and self.abelianization.order == 6:
            return PERTURBED_CYCLIC
        return PERTURBED_UNKNOWN


@dataclass
class AnalysisData:
    """Everything computed for one curve."""

    spec: CurveSpec
    diagram: CurveDiagram | None = None
    assembly: Assembly | None = None
    validation: ValidationReport | None = None
    presentation: Presentation | None = None
    simplified: Presentation | None = None
    abelianization: AbelianGroup | None = None
    order: CosetTable | None = None
    alexander: LaurentPoly | None = None
    gamma: GammaCertificate | None = None
    probes: list[tuple[FreeWord, int, CosetTable]] = field(default_factory=list)
    perturbation: PerturbationData | None = None
    timings: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def is_validated(self) -> bool:
        """Whether every combinatorial braid was confirmed by certified tracking."""
        return self.validation is not None and self.validation.ok


class AnalysisCoordinator:
    """Run the pipeline stages for curve specs."""

    def __init__(self, options: AnalysisOptions | None = None) -> None:
        """Initialize the coordinator."""
        self.options = options or AnalysisOptions()

    def _timed(self, data: AnalysisData, stage: str, func: Callable[[], _T]) -> _T:
        start = time.perf_counter()
        try:
            return func()
        finally:
            data.timings[stage] = time.perf_counter() - start
            _LOGGER.debug("%s: %s took %.3fs", data.spec.name, stage, data.timings[stage])

    def scan(self, spec: CurveSpec, data: AnalysisData | None = None) -> AnalysisData:
        """Build the curve diagram and assemble the braids."""
        data = data or AnalysisData(spec=spec)
        poly = self._timed(data, "polynomial", spec.polynomial)
        improper = None
        f = poly
        if spec.improper:
            improper = self._timed(data, "improper", lambda: improper_to_proper(poly))
            f = improper.transformed
        reference = (
            self.options.reference_fiber
            if self.options.reference_fiber is not None
            else spec.reference_fiber
        )
        data.diagram = self._timed(
            data,
            "scan",
            lambda: scan_curve(f, spec.hirzebruch_degree, improper, spec.infinity_cut),
        )
        data.assembly = shift_reference(assemble(data.diagram), reference)
        return data

    def validate(self, data: AnalysisData) -> ValidationReport:
        """Cross-check the combinatorial braids with certified tracking."""
        if data.diagram is None:
            raise HypothesisError("the curve has not been scanned")
        report = self._timed(
            data, "validate", lambda: cross_validate(data.diagram, dps=self.options.dps)
        )
        data.validation = report
        if not report.ok:
            names = ", ".join(entry.name for entry in report.mismatches)
            raise CertificationError(f"combinatorial and tracked braids differ: {names}")
        return report

    def _infinity(self, data: AnalysisData) -> list[FreeWord] | None:
        conjugator = data.spec.conjugator
        if conjugator is None or data.spec.infinity_power is None:
            return None
        return infinity_bracket(data.assembly, conjugator, data.spec.infinity_power)

    def run(self, spec: CurveSpec) -> AnalysisData:
        """Full pipeline: scan, braids both ways, presentation and group analysis."""
        data = self.scan(spec)
        if self.options.validate:
            self.validate(data)
        else:
            data.notes.append("braids not cross-checked by tracking")
        data.presentation = self._timed(
            data,
            "presentation",
            lambda: presentation(
                data.assembly, presimplify=spec.presimplify, infinity=self._infinity(data)
            ),
        )
        if not data.assembly.is_complete:
            data.notes.append("non-real singular fibers: the relations give an upper bound")
        self.analyze_group(data)
        return data

    def analyze_group(self, data: AnalysisData) -> None:
        """Group invariants of the assembled presentation."""
        p = data.presentation
        spec = data.spec
        data.simplified = self._timed(
            data, "tietze", lambda: tietze_simplify(p, self.options.tietze_budget)
        )
        data.abelianization = abelianization(p)
        if spec.torus_type:
            # surjects onto C2*C3, so no coset enumeration can terminate
            data.notes.append("torus type: the group is infinite")
        else:
            data.order = self._timed(
                data, "order", lambda: todd_coxeter(data.simplified, (), self.options.coset_limit)
            )
        try:
            data.alexander = self._timed(
                data, "alexander", lambda: alexander_polynomial(p, affine=True)
            )
        except HypothesisError as err:
            data.notes.append(f"no Alexander polynomial: {err}")
        if spec.ratios:
            data.gamma = self._timed(
                data,
                "gamma",
                lambda: recognize_gamma(
                    p, spec.ratio_words, self.options.coset_limit, self.options.tietze_budget
                ),
            )
        for word, k in self.options.probes:
            table = quotient_probe(p, word, k, self.options.coset_limit)
            data.probes.append((word, k, table))

    def perturb(
        self, spec: CurveSpec, fiber: int, point: int, split: tuple[int, int]
    ) -> AnalysisData:
        """Analyse the group after splitting one singular point."""
        data = self.scan(spec)
        mu1, mu2 = split
        p = perturb(data.assembly, fiber, point, mu1, mu2, spec.singularities)
        ab = abelianization(p)
        result = PerturbationData(
            fiber=fiber,
            point=point,
            split=split,
            exponent=perturbation_exponent(mu1, mu2),
            presentation=p,
            abelianization=ab,
        )
        if spec.ratios:
            result.gamma = recognize_gamma(
                p, spec.ratio_words, self.options.coset_limit, self.options.tietze_budget
            )
        if result.gamma is None or not result.gamma.is_gamma:
            result.order = todd_coxeter(
                tietze_simplify(p, self.options.tietze_budget), (), self.options.coset_limit
            )
        data.perturbation = result
        data.presentation = p
        data.abelianization = ab
        _LOGGER.info(
            "%s perturbed at %s.%s into A%s+A%s: %s",
            spec.name,
            fiber,
            point,
            mu1,
            mu2,
            result.classification,
        )
        return data


def analyze_path(path: str | Path, options: AnalysisOptions) -> AnalysisData:
    """Worker entry point: load and analyse one spec file."""
    return AnalysisCoordinator(options).run(load(path))


async def async_analyze_many(
    paths: Sequence[str | Path],
    options: AnalysisOptions,
    jobs: int = DEFAULT_JOBS,
) -> list[AnalysisData | TetragonError]:
    """Analyse several spec files, fanning out over ``jobs`` worker processes.

    Results come back in input order; a failing spec yields its error.
    """
    loop = asyncio.get_running_loop()
    if jobs <= 1:
        results: list[AnalysisData | TetragonError] = []
        for path in paths:
            try:
                results.append(await loop.run_in_executor(None, analyze_path, path, options))
            except TetragonError as err:
                results.append(err)
        return results
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [loop.run_in_executor(pool, analyze_path, path, options) for path in paths]
        gathered = await asyncio.gather(*futures, return_exceptions=True)
    out: list[AnalysisData | TetragonError] = []
    for path, result in zip(paths, gathered, strict=True):
        if isinstance(result, BaseException) and not isinstance(result, TetragonError):
            _LOGGER.error("Unexpected failure on %s: %s", path, result)
            raise result
        out.append(result)
    return out


def specs_in(paths: Iterable[str | Path]) -> list[Path]:
    """Expand directories into the spec files they contain."""
    files: list[Path] = []
    for path in map(Path, paths):
        files.extend(sorted(path.glob("*.curve")) if path.is_dir() else [path])
    return files
