"""Analysis of finitely presented groups."""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce

from sympy import ZZ, Matrix, Poly, gcd, symbols
from sympy.combinatorics.coset_table import coset_enumeration_c, coset_enumeration_r
from sympy.combinatorics.fp_groups import (
    FpGroup,
    define_schreier_generators,
    reidemeister_relators,
    simplify_presentation,
)
from sympy.combinatorics.free_groups import free_group
from sympy.matrices.normalforms import smith_normal_form

from .braidkit import FreeWord, exponent_sum, format_word, invert, multiply, power, reduce_word
from .const import DEFAULT_COSET_LIMIT, DEFAULT_TIETZE_BUDGET
from .exceptions import CertificationError, HypothesisError, InconclusiveError
from .vankampen import Presentation

_LOGGER = logging.getLogger(__name__)

T = symbols("t")

RELATOR_BASED = "relator_based"
COSET_TABLE_BASED = "coset_table_based"
STRATEGIES = (RELATOR_BASED, COSET_TABLE_BASED)

# Abelianization of every irreducible sextic group met here
CYCLIC_SIX = (6,)


class TableStatus(str, Enum):
    """Outcome of a coset enumeration."""

    COMPLETE = "complete"
    OVERFLOW = "overflow"


@dataclass(frozen=True)
class CosetTable:
    """A coset table over generators and their inverses.

    Columns follow the order a1, a1^-1, a2, a2^-1, ...
    """

    status: TableStatus
    limit: int
    rows: tuple[tuple[int, ...], ...] = ()

    @property
    def index(self) -> int | None:
        """Number of cosets of a complete table."""
        if self.status is not TableStatus.COMPLETE:
            return None
        return len(self.rows)

    def transversal(self) -> list[FreeWord]:
        """A Schreier transversal, one word per coset, read off breadth first."""
        if self.status is not TableStatus.COMPLETE:
            raise InconclusiveError("the coset enumeration overflowed")
        words: dict[int, FreeWord] = {0: ()}
        queue = [0]
        while queue:
            coset = queue.pop(0)
            for column, target in enumerate(self.rows[coset]):
                if target not in words:
                    letter = column // 2 + 1
                    words[target] = words[coset] + ((letter if column % 2 == 0 else -letter),)
                    queue.append(target)
        return [words[coset] for coset in range(len(self.rows))]

    def __str__(self) -> str:
        if self.status is TableStatus.COMPLETE:
            return f"complete, index {self.index}"
        return f"overflow beyond {self.limit} cosets"


@dataclass(frozen=True)
class LaurentPoly:
    """An integer Laurent polynomial in t, normalized up to units +-t^k."""

    coefficients: tuple[int, ...] = (0,)

    @classmethod
    def normalized(cls, terms: dict[int, int]) -> LaurentPoly:
        """Shift to lowest exponent 0 and make the leading coefficient positive."""
        terms = {k: c for k, c in terms.items() if c}
        if not terms:
            return cls((0,))
        low, high = min(terms), max(terms)
        coefficients = [terms.get(k, 0) for k in range(low, high + 1)]
        if coefficients[-1] < 0:
            coefficients = [-c for c in coefficients]
        return cls(tuple(coefficients))

    @classmethod
    def from_poly(cls, poly: Poly) -> LaurentPoly:
        """Normalize a sympy polynomial in t."""
        return cls.normalized({exp[0]: int(c) for exp, c in poly.terms()})

    @property
    def degree(self) -> int:
        """Span of the exponents."""
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return self.coefficients == (0,)

    @property
    def is_unit(self) -> bool:
        return self.coefficients == (1,)

    def __str__(self) -> str:
        terms = []
        for exp in range(self.degree, -1, -1):
            c = self.coefficients[exp]
            if not c:
                continue
            monomial = "" if exp == 0 else ("t" if exp == 1 else f"t^{exp}")
            magnitude = abs(c)
            if not monomial:
                body = str(magnitude)
            else:
                body = monomial if magnitude == 1 else f"{magnitude}{monomial}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


@dataclass(frozen=True)
class AbelianGroup:
    """Invariant factors (each dividing the next) and free rank."""

    torsion: tuple[int, ...] = ()
    rank: int = 0

    @property
    def is_cyclic_six(self) -> bool:
        return self.rank == 0 and self.torsion == CYCLIC_SIX

    @property
    def order(self) -> int | None:
        """Order of the group, None if infinite."""
        if self.rank:
            return None
        return reduce(lambda a, b: a * b, self.torsion, 1)

    def __str__(self) -> str:
        parts = [f"C{n}" for n in self.torsion] + ["Z"] * self.rank
        return " x ".join(parts) if parts else "1"


class Verdict(str, Enum):
    """Outcome of the recognition of C2*C3."""

    GAMMA = "gamma"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class GammaCertificate:
    """Evidence that a presentation defines C2*C3."""

    verdict: Verdict
    ratio: FreeWord | None = None
    abelianization: AbelianGroup | None = None
    closure: Presentation | None = None
    closure_index: int | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def is_gamma(self) -> bool:
        return self.verdict is Verdict.GAMMA

    def describe(self) -> str:
        """Structured text form."""
        lines = [f"verdict: {self.verdict.value}"]
        if self.ratio is not None:
            lines.append(f"ratio: {format_word(self.ratio)}")
        if self.abelianization is not None:
            lines.append(f"abelianization: {self.abelianization}")
        if self.closure_index is not None:
            lines.append(f"closure index: {self.closure_index}")
        if self.closure is not None:
            lines.append(
                f"closure: {self.closure.generators} generators, "
                f"{len(self.closure.relators)} relators"
            )
        lines.extend(f"note: {note}" for note in self.notes)
        return "\n".join(lines)


def _free(n: int):
    group, *gens = free_group(", ".join(f"a{i}" for i in range(1, n + 1)))
    return group, gens


def _element(word: FreeWord, group, gens):
    element = group.identity
    for letter in word:
        gen = gens[abs(letter) - 1]
        element = element * (gen if letter > 0 else gen**-1)
    return element


def _word(element, index: dict) -> FreeWord:
    letters: list[int] = []
    for sym, exp in element.array_form:
        letter = index[sym]
        letters.extend([letter if exp > 0 else -letter] * abs(exp))
    return reduce_word(letters)


def _fp_group(p: Presentation):
    group, gens = _free(p.generators)
    return FpGroup(group, [_element(word, group, gens) for word in p.relators]), group, gens


def cyclic_reduce(word: FreeWord) -> FreeWord:
    """Strip letters cancelling around the end of a relator."""
    word = reduce_word(word)
    while len(word) > 1 and word[0] == -word[-1]:
        word = word[1:-1]
    return word


def _canonical(word: FreeWord) -> FreeWord:
    rotations = [word[k:] + word[:k] for k in range(len(word))] or [()]
    inverse = invert(word)
    rotations += [inverse[k:] + inverse[:k] for k in range(len(inverse))]
    return min(rotations, key=lambda w: (len(w), w))


def _dedupe(relators: Iterable[FreeWord]) -> list[FreeWord]:
    seen: dict[FreeWord, FreeWord] = {}
    for word in relators:
        word = cyclic_reduce(word)
        if word:
            seen.setdefault(_canonical(word), word)
    return sorted(seen.values(), key=lambda w: (len(w), w))


def _find_cyclic(word: FreeWord, piece: FreeWord) -> int | None:
    n = len(word)
    if not piece or len(piece) > n:
        return None
    doubled = word + word[: len(piece) - 1]
    for k in range(n):
        if doubled[k : k + len(piece)] == piece:
            return k
    return None


def _shorten(relators: list[FreeWord], budget: int) -> tuple[list[FreeWord], int]:
    """Replace long pieces of relators by the shorter complement of another relator."""
    spent = 0
    changed = True
    while changed and spent < budget:
        changed = False
        relators = _dedupe(relators)
        for s_index, s in enumerate(relators):
            n = len(s)
            half = n // 2 + 1
            candidates = []
            for base in (s, invert(s)):
                for k in range(n):
                    rotated = base[k:] + base[:k]
                    candidates.append((rotated[:half], invert(rotated[half:])))
            for r_index, r in enumerate(relators):
                if r_index == s_index or len(r) < half:
                    continue
                for piece, replacement in candidates:
                    at = _find_cyclic(r, piece)
                    if at is None:
                        continue
                    rotated = r[at:] + r[:at]
                    shorter = cyclic_reduce(replacement + rotated[len(piece) :])
                    if len(shorter) < len(r):
                        relators[r_index] = shorter
                        spent += 1
                        changed = True
                        break
                if changed or spent >= budget:
                    break
            if changed or spent >= budget:
                break
    return _dedupe(relators), spent


def _eliminate(p: Presentation) -> Presentation:
    if p.generators == 0 or not p.relators:
        return p
    group, gens = _free(p.generators)
    rels = [_element(word, group, gens) for word in p.relators]
    kept, rels = simplify_presentation(list(gens), rels, change_gens=True)
    if not kept:
        return Presentation(0, ())
    index = {gen.array_form[0][0]: k for k, gen in enumerate(kept, start=1)}
    return Presentation(len(kept), tuple(_word(rel, index) for rel in rels))


def _size(p: Presentation) -> tuple[int, int, int]:
    return p.generators, len(p.relators), p.total_length


def tietze_simplify(p: Presentation, budget: int = DEFAULT_TIETZE_BUDGET) -> Presentation:
    """Heuristically shorten a presentation with Tietze moves.

    Alternates generator elimination with substitution of long relator pieces
    until nothing improves or ``budget`` substitutions were made.
    """
    current = Presentation(p.generators, tuple(_dedupe(p.relators)))
    spent = 0
    while True:
        before = _size(current)
        current = _eliminate(current)
        relators, used = _shorten(list(current.relators), budget - spent)
        spent += used
        current = Presentation(current.generators, tuple(relators))
        if _size(current) >= before or spent >= budget:
            break
    _LOGGER.debug(
        "Simplified %s generators / %s relators to %s / %s (total length %s)",
        p.generators,
        len(p.relators),
        current.generators,
        len(current.relators),
        current.total_length,
    )
    return current


def _table(fp, subgroup: list, limit: int, strategy: str):
    enumerate_ = coset_enumeration_r if strategy == RELATOR_BASED else coset_enumeration_c
    table = enumerate_(fp, subgroup, max_cosets=limit)
    table.compress()
    table.standardize()
    return table


def todd_coxeter(
    p: Presentation,
    subgroup: Sequence[FreeWord] = (),
    coset_limit: int = DEFAULT_COSET_LIMIT,
    strategy: str = RELATOR_BASED,
) -> CosetTable:
    """Enumerate the cosets of a subgroup; the trivial subgroup gives the order."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown coset enumeration strategy {strategy!r}")
    if p.generators == 0:
        return CosetTable(TableStatus.COMPLETE, coset_limit, ((),))
    fp, group, gens = _fp_group(p)
    try:
        table = _table(fp, [_element(w, group, gens) for w in subgroup], coset_limit, strategy)
    except ValueError as err:
        _LOGGER.debug("Coset enumeration overflow: %s", err)
        return CosetTable(TableStatus.OVERFLOW, coset_limit)
    rows = tuple(tuple(row) for row in table.table)
    return CosetTable(TableStatus.COMPLETE, coset_limit, rows)


def normal_closure_presentation(
    p: Presentation,
    w: FreeWord,
    coset_limit: int = DEFAULT_COSET_LIMIT,
    budget: int = DEFAULT_TIETZE_BUDGET,
) -> Presentation:
    """Reidemeister-Schreier presentation of the normal closure of w, simplified."""
    quotient = todd_coxeter(p.with_relators(w), (), coset_limit)
    if quotient.status is TableStatus.OVERFLOW:
        raise InconclusiveError(
            f"the normal closure of {format_word(w)} has infinite or unreachable index "
            f"(more than {coset_limit} cosets)"
        )
    index = quotient.index
    fp, group, gens = _fp_group(p)
    subgroup = [multiply(invert(t), w, t) for t in quotient.transversal()]
    while True:
        table = _table(fp, [_element(h, group, gens) for h in subgroup], coset_limit, RELATOR_BASED)
        if len(table.table) == index:
            break
        # not yet normal: close under conjugation by the generators
        subgroup = subgroup + [
            multiply(invert((g,)), h, (g,))
            for h in subgroup
            for g in itertools.chain(range(1, p.generators + 1), range(-p.generators, 0))
        ]
        subgroup = list(dict.fromkeys(subgroup))
    define_schreier_generators(table)
    expected = index * (p.generators - 1) + 1
    if len(table._schreier_generators) != expected:
        raise AssertionError(
            f"Schreier generators: {len(table._schreier_generators)} != {expected}"
        )
    reidemeister_relators(table)
    kept = table._schreier_generators
    lookup = {gen.array_form[0][0]: k for k, gen in enumerate(kept, start=1)}
    relators = []
    for rel in table._reidemeister_relators:
        unknown = [str(sym) for sym, _ in rel.array_form if sym not in lookup]
        if unknown:
            raise CertificationError(
                f"Reidemeister relator {rel} uses {', '.join(unknown)}, "
                "which is not a Schreier generator"
            )
        relators.append(_word(rel, lookup))
    raw = Presentation(len(kept), tuple(relators))
    _LOGGER.debug("Normal closure of index %s: %s Schreier generators", index, raw.generators)
    return tietze_simplify(raw, budget)


def _exponent_of(word: FreeWord, g: int) -> int:
    return word.count(g) - word.count(-g)


def abelianization(p: Presentation) -> AbelianGroup:
    """Invariant factors of the relator exponent matrix."""
    n = p.generators
    if n == 0:
        return AbelianGroup()
    rows = [[_exponent_of(word, g) for g in range(1, n + 1)] for word in p.relators]
    if not rows:
        return AbelianGroup((), n)
    snf = smith_normal_form(Matrix(rows), domain=ZZ)
    diagonal = [abs(int(snf[k, k])) for k in range(min(snf.shape))]
    nonzero = [d for d in diagonal if d]
    return AbelianGroup(tuple(d for d in nonzero if d > 1), n - len(nonzero))


def _weight(word: FreeWord, character: Sequence[int]) -> int:
    return sum(character[abs(l) - 1] * (1 if l > 0 else -1) for l in word)


def _fox_row(word: FreeWord, n: int, character: Sequence[int]) -> list[dict[int, int]]:
    row: list[dict[int, int]] = [{} for _ in range(n)]
    prefix = 0
    for letter in word:
        g = abs(letter) - 1
        if letter > 0:
            row[g][prefix] = row[g].get(prefix, 0) + 1
            prefix += character[g]
        else:
            prefix -= character[g]
            row[g][prefix] = row[g].get(prefix, 0) - 1
    return row


def alexander_polynomial(
    p: Presentation, character: Sequence[int] | None = None, affine: bool = False
) -> LaurentPoly:
    """Gcd of the maximal minors of the Fox matrix under a character onto Z.

    The default character sends every generator to t. With ``affine`` the
    relators of nonzero weight, the relations at infinity of a curve group,
    are left out instead of rejected.
    """
    n = p.generators
    character = list(character) if character is not None else [1] * n
    if len(character) != n:
        raise HypothesisError("the character needs one weight per generator")
    relators = []
    for word in p.relators:
        if _weight(word, character) == 0:
            relators.append(word)
        elif affine:
            _LOGGER.debug("Leaving out relator %s of nonzero weight", format_word(word))
        else:
            raise HypothesisError(
                f"the character does not vanish on relator {format_word(word)}"
            )
    size = n - 1
    if size <= 0:
        return LaurentPoly((1,))
    rows = []
    for word in relators:
        fox = _fox_row(word, n, character)
        shift = -min((min(entry) for entry in fox if entry), default=0)
        rows.append([sum(c * T ** (k + shift) for k, c in entry.items()) for entry in fox])
    if len(rows) < size:
        return LaurentPoly((0,))
    matrix = Matrix(rows)
    result = Poly(0, T, domain=ZZ)
    for chosen_rows in itertools.combinations(range(len(rows)), size):
        for chosen_cols in itertools.combinations(range(n), size):
            minor = matrix.extract(list(chosen_rows), list(chosen_cols)).det(method="berkowitz")
            minor = Poly(minor, T, domain=ZZ)
            if minor.is_zero:
                continue
            result = minor if result.is_zero else gcd(result, minor)
            if result.degree() == 0:
                return LaurentPoly((1,))
    if result.is_zero:
        return LaurentPoly((0,))
    return LaurentPoly.from_poly(result)


def quotient_probe(
    p: Presentation,
    w: FreeWord,
    k: int,
    coset_limit: int = DEFAULT_COSET_LIMIT,
    strategy: str = RELATOR_BASED,
) -> CosetTable:
    """Order of the quotient by the extra relator w^k."""
    table = todd_coxeter(p.with_relators(power(w, k)), (), coset_limit, strategy)
    _LOGGER.info("Quotient by (%s)^%s: %s", format_word(w), k, table)
    return table


def _commutators(n: int) -> list[FreeWord]:
    return [
        multiply((a,), (b,), (-a,), (-b,)) for a, b in itertools.combinations(range(1, n + 1), 2)
    ]


# Elements of C2*C3 = <u, v | u^2, v^3> are alternating syllables: 0 is u, 1 is v, 2 is v^2
_U = 0
GAMMA_PRESENTATION = Presentation(2, ((1, 1), (2, 2, 2)))
PARABOLIC = (_U, 1)
MAX_CONJUGATOR = 4

GammaElement = tuple[int, ...]


def gamma_multiply(a: GammaElement, b: GammaElement) -> GammaElement:
    """Product in C2*C3 in reduced syllable form."""
    left, right = list(a), list(b)
    while left and right:
        x, y = left[-1], right[0]
        if (x == _U) != (y == _U):
            break
        left.pop()
        right.pop(0)
        if x != _U and (x + y) % 3:
            left.append((x + y) % 3)
            break
    return tuple(left + right)


def gamma_inverse(a: GammaElement) -> GammaElement:
    """Inverse in C2*C3."""
    return tuple(s if s == _U else 3 - s for s in reversed(a))


def _gamma_elements(length: int) -> list[GammaElement]:
    elements: list[GammaElement] = [()]
    layer: list[GammaElement] = [()]
    for _ in range(length):
        layer = [
            word + (s,)
            for word in layer
            for s in (_U, 1, 2)
            if not word or (word[-1] == _U) != (s == _U)
        ]
        elements.extend(layer)
    return elements


def _gamma_image(word: FreeWord, images: Sequence[GammaElement]) -> GammaElement:
    element: GammaElement = ()
    for letter in word:
        image = images[abs(letter) - 1]
        element = gamma_multiply(element, image if letter > 0 else gamma_inverse(image))
    return element


def _gamma_word(element: GammaElement) -> FreeWord:
    letters: list[int] = []
    for s in element:
        letters.extend((1,) if s == _U else (2,) * s)
    return tuple(letters)


def gamma_epimorphism(
    p: Presentation,
    max_conjugator: int = MAX_CONJUGATOR,
    coset_limit: int = DEFAULT_COSET_LIMIT,
) -> tuple[GammaElement, ...] | None:
    """Images of the generators in C2*C3 defining an epimorphism, or None if none is found.

    Generators are meridians, so each goes to a conjugate of uv; the first one
    to uv itself. Conjugators are searched up to ``max_conjugator`` syllables.
    """
    n = p.generators
    if n == 0:
        return None
    candidates = sorted(
        {
            gamma_multiply(gamma_multiply(c, PARABOLIC), gamma_inverse(c))
            for c in _gamma_elements(max_conjugator)
        },
        key=lambda element: (len(element), element),
    )
    # relators checked as soon as their last generator has an image
    by_top: dict[int, list[FreeWord]] = {}
    for word in p.relators:
        if word:
            by_top.setdefault(max(abs(letter) for letter in word), []).append(word)
    images: list[GammaElement] = [PARABOLIC]

    def kills(k: int) -> bool:
        return all(_gamma_image(word, images) == () for word in by_top.get(k, ()))

    def onto() -> bool:
        table = todd_coxeter(GAMMA_PRESENTATION, [_gamma_word(e) for e in images], coset_limit)
        return table.index == 1

    def extend(k: int) -> bool:
        if k > n:
            return onto()
        for candidate in candidates:
            images.append(candidate)
            if kills(k) and extend(k + 1):
                return True
            images.pop()
        return False

    if not kills(1) or not extend(2):
        return None
    _LOGGER.debug("Epimorphism onto C2*C3: %s", images)
    return tuple(images)


def _certify(
    p: Presentation, ratio: FreeWord, ab: AbelianGroup, coset_limit: int, budget: int
) -> GammaCertificate | None:
    if exponent_sum(ratio) != 0:
        return None
    quotient = todd_coxeter(p.with_relators(ratio), (), coset_limit)
    if quotient.index != ab.order:
        return None
    abelian = todd_coxeter(p.with_relators(ratio, *_commutators(p.generators)), (), coset_limit)
    if abelian.index != quotient.index:
        return None
    try:
        closure = normal_closure_presentation(p, ratio, coset_limit, budget)
    except InconclusiveError:
        return None
    if closure.generators != 2 or closure.relators:
        return None
    return GammaCertificate(
        verdict=Verdict.GAMMA,
        ratio=ratio,
        abelianization=ab,
        closure=closure,
        closure_index=quotient.index,
        notes=(
            "the normal closure of the ratio is the commutant and is free of rank 2",
            "an epimorphism onto C2*C3 with equal commutant and abelianization is an isomorphism",
        ),
    )


def recognize_gamma(
    p: Presentation,
    ratios: Iterable[FreeWord],
    coset_limit: int = DEFAULT_COSET_LIMIT,
    budget: int = DEFAULT_TIETZE_BUDGET,
) -> GammaCertificate:
    """Decide that a presentation defines C2*C3, or report that the evidence is inconclusive."""
    ab = abelianization(p)
    if not ab.is_cyclic_six:
        return GammaCertificate(
            Verdict.INCONCLUSIVE, abelianization=ab, notes=(f"abelianization is {ab}",)
        )
    for ratio in ratios:
        certificate = _certify(p, ratio, ab, coset_limit, budget)
        if certificate is not None:
            _LOGGER.info("Recognized C2*C3 through %s", format_word(ratio))
            return certificate
    return GammaCertificate(
        Verdict.INCONCLUSIVE,
        abelianization=ab,
        notes=("no candidate ratio has a free normal closure of rank 2",),
    )


def verify_certificate(
    p: Presentation, certificate: GammaCertificate, coset_limit: int = DEFAULT_COSET_LIMIT
) -> bool:
    """Check a positive certificate without the search that produced it.

    An explicit epimorphism onto C2*C3 must exist, the normal closure of the
    ratio must be the commutant, of index 6, and it must be generated by two
    elements. The epimorphism then maps this 2-generated commutant onto the
    free commutant of C2*C3, which forces both to be free of rank 2 and the
    epimorphism to be an isomorphism.
    """
    if not certificate.is_gamma or certificate.ratio is None or certificate.closure is None:
        return False
    if certificate.closure.generators != 2 or certificate.closure.relators:
        return False
    if not abelianization(p).is_cyclic_six:
        return False
    ratio = certificate.ratio
    quotient = todd_coxeter(p.with_relators(ratio), (), coset_limit, COSET_TABLE_BASED)
    abelian = todd_coxeter(
        p.with_relators(ratio, *_commutators(p.generators)), (), coset_limit, COSET_TABLE_BASED
    )
    index = CYCLIC_SIX[0]
    if not quotient.index == abelian.index == certificate.closure_index == index:
        return False
    try:
        closure = normal_closure_presentation(p, ratio, coset_limit)
    except InconclusiveError:
        return False
    if closure.generators != 2:
        return False
    if gamma_epimorphism(p, coset_limit=coset_limit) is None:
        _LOGGER.info("No epimorphism onto C2*C3 found")
        return False
    return True
