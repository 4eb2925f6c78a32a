"""Presentation of the fundamental group from the real monodromy of a tetragonal curve."""

from __future__ import annotations

import logging
import math
import re
from collections.abc import Callable
from dataclasses import dataclass, replace

from .braidkit import (
    IDENTITY,
    STRANDS,
    Braid,
    FreeWord,
    Transition,
    TwistedMonodromy,
    beta_lambda_for,
    braid_to_endo,
    braids_equal,
    bracket_relator,
    format_word,
    gamma_for,
    garside_delta,
    invert,
    multiply,
    parse_word,
    power,
)
from .const import COMPLETE, UPPER_BOUND
from .exceptions import CurveSpecError, HypothesisError
from .fiberscan import CurveDiagram

_LOGGER = logging.getLogger(__name__)

_GENERATORS_LINE = re.compile(r"^generators:\s*(\d+)\s*$")
_RELATOR_LINE = re.compile(r"^relator:\s*(.*)$")

# Perturbations whose result leaves the class handled by the presentation
EXCLUDED_PERTURBATIONS = {("3A6+A1", "3A6")}


@dataclass(frozen=True)
class Presentation:
    """A finitely presented group on generators a1..a_n."""

    generators: int
    relators: tuple[FreeWord, ...] = ()

    def __post_init__(self) -> None:
        """Reduce relators and drop trivial ones."""
        cleaned: list[FreeWord] = []
        for word in self.relators:
            word = multiply(word)
            if any(abs(letter) > self.generators for letter in word):
                raise ValueError(f"relator {format_word(word)} uses an unknown generator")
            if word and word not in cleaned:
                cleaned.append(word)
        object.__setattr__(self, "relators", tuple(cleaned))

    @property
    def total_length(self) -> int:
        """Sum of relator lengths."""
        return sum(len(word) for word in self.relators)

    def with_relators(self, *words: FreeWord) -> Presentation:
        """The presentation with extra relators."""
        return Presentation(self.generators, self.relators + tuple(words))

    def serialize(self) -> str:
        """Text form: a ``generators:`` line then one ``relator:`` line per relator."""
        lines = [f"generators: {self.generators}"]
        lines.extend(f"relator: {format_word(word)}" for word in self.relators)
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> Presentation:
        """Inverse of ``serialize``."""
        generators = None
        relators = []
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if (match := _GENERATORS_LINE.match(line)) is not None:
                generators = int(match.group(1))
            elif (match := _RELATOR_LINE.match(line)) is not None:
                try:
                    relators.append(parse_word(match.group(1)))
                except ValueError as err:
                    raise CurveSpecError(str(err), number) from err
            else:
                raise CurveSpecError(f"unexpected line {line!r}", number)
        if generators is None:
            raise CurveSpecError("missing generators line")
        return cls(generators, tuple(relators))

    def script_export(self, ratio: FreeWord | None = None) -> str:
        """A GAP session building the group and, optionally, the normal closure of a ratio."""
        names = ", ".join(f'"a{i}"' for i in range(1, self.generators + 1))
        lines = [f"F := FreeGroup({names});;"]
        lines.extend(f"a{i} := F.{i};;" for i in range(1, self.generators + 1))
        words = ",\n  ".join(_gap_word(word) for word in self.relators)
        lines.append(f"g := F / [\n  {words}\n];;")
        if ratio is not None:
            lines.append(f"a := {_gap_word(ratio)};;")
            lines.append("a := MappedWord(a, GeneratorsOfGroup(F), GeneratorsOfGroup(g));;")
            lines.append("P := PresentationNormalClosure(g, Subgroup(g, [a]));;")
            lines.append("SimplifyPresentation(P);")
        else:
            lines.append("Size(g);")
        return "\n".join(lines) + "\n"


def _gap_word(word: FreeWord) -> str:
    if not word:
        return "One(F)"
    return format_word(word).replace(" ", "*")


@dataclass(frozen=True)
class FiberRelation:
    """Monodromy data of one real singular fiber."""

    beta: Braid
    lam: Braid
    slope: FreeWord
    points: tuple[tuple[int, int], ...]
    label: str = ""


@dataclass(frozen=True)
class Assembly:
    """Braids along the real axis, chained from the fiber over -R."""

    gammas: tuple[Braid, ...]
    fibers: tuple[FiberRelation, ...]
    chain: tuple[Braid, ...]
    chain_infinity: Braid
    d: int
    completeness: str
    reference: int = 0

    @property
    def r(self) -> int:
        """Number of real singular fibers."""
        return len(self.fibers)

    def rho(self, i: int) -> Braid:
        """The product from the reference fiber to the fiber after x_i (1-based)."""
        base = self.chain[i - 1]
        if self.reference == 0:
            return base
        return self.chain[self.reference - 1].inverse() * base

    @property
    def rho_infinity(self) -> Braid:
        """Monodromy along the boundary of the upper half plane, based at the reference."""
        if self.reference == 0:
            return self.chain_infinity
        shift = self.chain[self.reference - 1]
        return shift.inverse() * self.chain_infinity * shift

    def twisted(self, i: int) -> TwistedMonodromy:
        """Local monodromy of fiber i twisted by its slope."""
        fiber = self.fibers[i - 1]
        return TwistedMonodromy(fiber.lam, fiber.slope)

    def global_slope(self, i: int) -> FreeWord:
        """The slope of fiber i carried back to the reference fiber."""
        return braid_to_endo(self.rho(i).inverse()).apply(self.fibers[i - 1].slope)

    @property
    def is_complete(self) -> bool:
        """Whether the relations define the group rather than a cover of it."""
        return self.completeness == COMPLETE


def assemble(
    diagram: CurveDiagram,
    table: dict[tuple[int, Transition], Callable[[int], int]] | None = None,
) -> Assembly:
    """Chain the combinatorial braids of a curve diagram."""
    if diagram.improper is not None and not any(not event.proper for event in diagram.events):
        raise HypothesisError("the improper fiber is not real; its slope is unknown")
    gammas = tuple(gamma_for(segment) for segment in diagram.segments)
    fibers = []
    for event in diagram.events:
        beta, lam = beta_lambda_for(event.points, table)
        fibers.append(
            FiberRelation(
                beta=beta,
                lam=lam,
                slope=event.slope,
                points=tuple((point.pair, point.mu) for point in event.points),
                label=event.label,
            )
        )
    chain = []
    running = IDENTITY
    for gamma, fiber in zip(gammas, fibers, strict=False):
        running = running * gamma * fiber.beta
        chain.append(running)
    chain_infinity = running * gammas[-1] * garside_delta(diagram.d)
    completeness = COMPLETE if diagram.nonreal_pairs <= 1 else UPPER_BOUND
    assembly = Assembly(
        gammas=gammas,
        fibers=tuple(fibers),
        chain=tuple(chain),
        chain_infinity=chain_infinity,
        d=diagram.d,
        completeness=completeness,
    )
    _LOGGER.debug("Assembled %s fibers, %s", assembly.r, completeness)
    return shift_reference(assembly, diagram.reference)


def shift_reference(a: Assembly, i: int) -> Assembly:
    """Use x_i^+ (i = 0 for the fiber over -R) as the reference fiber."""
    if not 0 <= i <= a.r:
        raise HypothesisError(f"reference fiber {i} out of range 0..{a.r}")
    return replace(a, reference=i)


def _fiber_relators(a: Assembly, i: int, presimplify: bool) -> list[FreeWord]:
    # relators are read in the fiber x_i^- and carried back to the reference fiber
    back = braid_to_endo(a.rho(i).inverse())
    twisted = a.twisted(i)
    pure = twisted.pure_power()
    if pure is not None:
        # a pure power s_k^p is the single bracket {a_k, a_k+1}_p
        k, p = pure
        return [back.apply(bracket_relator((k,), (k + 1,), p))]
    fiber = a.fibers[i - 1]
    if presimplify and fiber.slope in ((1, 2), (3, 4)):
        # a node on the slope pair next to one A_p point on the other pair
        other = 3 if fiber.slope == (1, 2) else 1
        exponents = dict(fiber.points)
        if exponents.get(4 - other) == 1 and other in exponents:
            p = exponents[other] + 1
            pair = multiply(power((other, other + 1), 2), fiber.slope)
            if other == 3:
                pair = multiply(fiber.slope, power((3, 4), 2))
            return [
                back.apply(pair),
                back.apply(bracket_relator((other,), (other + 1,), p + 4)),
            ]
    # general case: a_j = m(a_j) for each generator
    endo = twisted.endo()
    return [
        back.apply(multiply(invert((j,)), endo.apply((j,)))) for j in range(1, STRANDS + 1)
    ]


def presentation(
    a: Assembly, presimplify: bool = False, infinity: list[FreeWord] | None = None
) -> Presentation:
    """Relations of the group: twisted braid relations and the relations at infinity.

    ``infinity`` replaces the four relators of the monodromy at infinity, for
    instance by a single bracket when that monodromy is a known conjugate of a
    generator power.
    """
    relators: list[FreeWord] = []
    presimplified = False
    for i in range(1, a.r + 1):
        words = _fiber_relators(a, i, presimplify)
        presimplified |= presimplify and bool(a.fibers[i - 1].slope) and len(words) == 2
        relators.extend(words)
    # the monodromy along the boundary of the upper half plane
    if infinity is None:
        endo = braid_to_endo(a.rho_infinity)
        relators.extend(
            multiply(invert((j,)), endo.apply((j,))) for j in range(1, STRANDS + 1)
        )
    else:
        relators.extend(infinity)
    # (a1 a2 a3 a4)^d equals the product of the global slopes, last fiber first
    if not presimplified:
        slopes = [a.global_slope(i) for i in range(a.r, 0, -1)]
        boundary = power(tuple(range(1, STRANDS + 1)), a.d)
        relators.append(multiply(boundary, invert(multiply(*slopes))))
    result = Presentation(STRANDS, tuple(relators))
    _LOGGER.debug(
        "Presentation with %s relators of total length %s",
        len(result.relators),
        result.total_length,
    )
    return result


def infinity_bracket(a: Assembly, conjugator: Braid, k: int, pair: int = 1) -> list[FreeWord]:
    """The single relation replacing the monodromy at infinity.

    ``conjugator`` is a braid c with monodromy c^-1 s_pair^k c along the
    boundary of the upper half plane, based at the fiber over -R. This is
    checked as an identity of free group automorphisms before use.
    """
    expected = conjugator.inverse() * Braid.sigma(pair, k) * conjugator
    if not braids_equal(a.chain_infinity, expected):
        raise HypothesisError(
            f"the monodromy at infinity {a.chain_infinity} is not {expected}"
        )
    if a.reference:
        conjugator = conjugator * a.chain[a.reference - 1]
    return [braid_to_endo(conjugator).apply(bracket_relator((pair,), (pair + 1,), k))]


def perturbation_exponent(mu1: int, mu2: int) -> int:
    """Exponent of the braid relation after splitting a point into A_mu1 and A_mu2."""
    return math.gcd(mu1 + 1, mu2 + 1)


def perturbed_singularities(singularities: str, mu: int, mu1: int, mu2: int) -> str:
    """The set of singularities after splitting one A_mu point."""
    counts: dict[int, int] = {}
    for term in re.split(r"[+()\s]+", singularities):
        match = re.fullmatch(r"(\d*)A(\d+)", term)
        if match:
            counts[int(match.group(2))] = counts.get(int(match.group(2)), 0) + int(
                match.group(1) or 1
            )
    if counts.get(mu, 0) == 0:
        raise HypothesisError(f"no A{mu} point in {singularities}")
    counts[mu] -= 1
    for new in (mu1, mu2):
        if new > 0:
            counts[new] = counts.get(new, 0) + 1
    terms = []
    for k in sorted((k for k, n in counts.items() if n), reverse=True):
        n = counts[k]
        terms.append(f"A{k}" if n == 1 else f"{n}A{k}")
    return "+".join(terms)


def perturb(
    a: Assembly,
    fiber: int,
    point: int,
    mu1: int,
    mu2: int,
    singularities: str | None = None,
) -> Presentation:
    """Presentation after splitting the given point into A_mu1 and A_mu2.

    ``fiber`` is 1-based; ``point`` indexes the points of that fiber.
    """
    if not 1 <= fiber <= a.r:
        raise HypothesisError(f"fiber {fiber} out of range 1..{a.r}")
    relation = a.fibers[fiber - 1]
    if not 0 <= point < len(relation.points):
        raise HypothesisError(f"fiber {fiber} has no point {point}")
    pair, mu = relation.points[point]
    if mu1 < 0 or mu2 < 0 or mu1 + mu2 != mu - 1:
        raise HypothesisError(f"A{mu} cannot split into A{mu1} and A{mu2}")
    if singularities is not None:
        result = perturbed_singularities(singularities, mu, mu1, mu2)
        if (singularities.replace(" ", ""), result) in EXCLUDED_PERTURBATIONS:
            raise HypothesisError(
                f"perturbation {singularities} -> {result} gives a dihedral-special sextic"
            )
    if relation.slope:
        raise HypothesisError("the point blown up by the projection cannot be perturbed here")
    s = perturbation_exponent(mu1, mu2)
    lam = IDENTITY
    for k, (other_pair, other_mu) in enumerate(relation.points):
        exponent = s if k == point else other_mu + 1
        lam = lam * Braid.sigma(other_pair, exponent)
    fibers = list(a.fibers)
    fibers[fiber - 1] = replace(relation, lam=lam)
    _LOGGER.info("Perturbing A%s on pair %s: braid exponent %s -> %s", mu, pair, mu + 1, s)
    return presentation(replace(a, fibers=tuple(fibers)))


def braid_listing(a: Assembly) -> list[tuple[str, Braid]]:
    """All combinatorial braids by name, in chain order."""
    items: list[tuple[str, Braid]] = [("gamma_0", a.gammas[0])]
    for i, fiber in enumerate(a.fibers, start=1):
        items.append((f"beta_{i}", fiber.beta))
        items.append((f"lambda_{i}", fiber.lam))
        items.append((f"gamma_{i}", a.gammas[i]))
    items.append(("beta_inf", garside_delta(a.d)))
    items.append(("rho_inf", a.rho_infinity))
    return items
