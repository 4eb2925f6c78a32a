"""Real singular fibers, branch orderings and segment profiles of a tetragonal curve."""

from __future__ import annotations

import functools
import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import mpmath
import sympy

from .braidkit import FreeWord, Transition, slope_for, zone_path
from .const import (
    DEFAULT_HIRZEBRUCH_DEGREE,
    EPSILON_FRACTION,
    EPSILON_RETRIES,
    ORDER_EPS,
    ORDER_MAX_REFINE,
)
from .exactpoly import (
    X,
    Y,
    AlgebraicNumber,
    BiPoly,
    Box,
    RatPoly,
    bipoly,
    cauchy_bound,
    coefficients,
    compare,
    complex_roots_boxed,
    discriminant,
    enclose,
    evaluate,
    fiber,
    ratpoly,
    real_roots_with_multiplicity,
    resultant,
    round_down,
    sign_at,
    sqrt_lower,
    sqrt_upper,
    squarefree_decompose,
    subresultant,
    to_rational,
    y_coefficients,
)
from .exceptions import CertificationError, HypothesisError, ZeroPolynomialError
from .resolvent import (
    QuarticModel,
    ResolventData,
    Signature,
    TwistCertificate,
    cubic_resolvent,
    depress_quartic,
    real_root_signature,
    twist_parameter,
)

_LOGGER = logging.getLogger(__name__)

MAX_EPSILON = Fraction(1, 4)
# x -> x - shear * y, tried in turn until the double points of a fiber project apart
SHEARS = tuple(Fraction(s) * a for a in (1, 2, Fraction(1, 2), 3, Fraction(1, 3)) for s in (1, -1))
SPLIT_STEPS = 4
ENCLOSURE_STEPS = 12
STRADDLE_STEPS = 6
WINDOW_DPS = 60


class SingularInfinity(HypothesisError):
    """The fiber over infinity is singular; the curve needs regularization."""


@dataclass(frozen=True)
class Branch:
    """One root of f(x, .) in canonical position."""

    box: Box
    point: tuple[Fraction, Fraction]

    @property
    def is_real(self) -> bool:
        """Whether the root is real."""
        return self.box.is_real


@dataclass(frozen=True)
class FiberPoint:
    """A double point of a real singular fiber."""

    mu: int
    pair: int
    transition: Transition
    y0: complex = 0j
    special: bool = False


@dataclass(frozen=True)
class FiberEvent:
    """A classified real singular fiber."""

    x: AlgebraicNumber
    points: tuple[FiberPoint, ...]
    multiplicity: int
    center: Fraction
    epsilon: Fraction
    proper: bool = True
    slope: FreeWord = ()

    @property
    def x_minus(self) -> Fraction:
        """Regular fiber just left of the singular one."""
        return self.center - self.epsilon

    @property
    def x_plus(self) -> Fraction:
        """Regular fiber just right of the singular one."""
        return self.center + self.epsilon

    @property
    def label(self) -> str:
        """Singularity types, e.g. ``A1+A2``."""
        return "+".join(f"A{point.mu}" for point in self.points)


@dataclass(frozen=True)
class NonrealFiber:
    """A conjugate pair of non-real singular fibers and the types of their double points."""

    multiplicity: int
    mus: tuple[int, ...]

    @property
    def label(self) -> str:
        """Singularity types, e.g. ``A1+A1``."""
        return "+".join(f"A{mu}" for mu in self.mus)


@dataclass(frozen=True)
class SegmentProfile:
    """Real branch data over a segment between consecutive real singular fibers."""

    index: int
    start: Fraction
    end: Fraction
    real_count: int
    crossings: tuple[tuple[int, int], ...] = ()
    twist_certificate: TwistCertificate | None = None

    @property
    def twist(self) -> int:
        """Twist parameter, zero unless all branches are imaginary."""
        return self.twist_certificate.t if self.twist_certificate else 0


@dataclass(frozen=True)
class ImproperSpec:
    """An improper curve with a single improper fiber at x = 0 and its proper model."""

    original: BiPoly
    transformed: BiPoly
    mu: int
    node_pair: int | None = None


@dataclass(frozen=True)
class MobiusRecord:
    """The real change x = cut - 1/x' moving the fiber over ``cut`` to infinity."""

    cut: Fraction | None = None

    @property
    def is_identity(self) -> bool:
        """Whether no change was applied."""
        return self.cut is None

    def to_working(self, x: Fraction) -> Fraction | None:
        """Image of an original abscissa; None stands for infinity."""
        if self.cut is None:
            return x
        if x == self.cut:
            return None
        return 1 / (self.cut - x)

    def to_original(self, x: float) -> float:
        """Original abscissa of a working one, as a float for display."""
        if self.cut is None:
            return x
        if x == 0:
            return math.inf
        return float(self.cut) - 1 / x


@dataclass
class CurveDiagram:
    """Everything the monodromy computation needs about the real part of a curve."""

    f: BiPoly
    d: int
    model: QuarticModel
    data: ResolventData
    events: tuple[FiberEvent, ...]
    segments: tuple[SegmentProfile, ...]
    radius: Fraction
    mobius: MobiusRecord = field(default_factory=MobiusRecord)
    improper: ImproperSpec | None = None
    nonreal: tuple[NonrealFiber, ...] = ()
    reference: int = 0

    @property
    def nonreal_pairs(self) -> int:
        """Number of pairs of conjugate non-real singular fibers."""
        return len(self.nonreal)

    def original_position(self, event: FiberEvent) -> float:
        """Abscissa of a fiber in the coordinates of the input curve."""
        return self.mobius.to_original(float(event.x))


def _clear_denominators(expr: sympy.Expr) -> sympy.Expr:
    numerator, _ = sympy.fraction(sympy.cancel(sympy.together(expr)))
    return sympy.expand(numerator)


def improper_to_proper(f_tilde: BiPoly) -> ImproperSpec:
    """Transform an improper model with a4 = c x^2 and x | a3 into f_nr = x^2 f~(x, y/x)."""
    coeffs = y_coefficients(f_tilde)
    if len(coeffs) != 5:
        raise HypothesisError(f"improper model must have y-degree 4, got {len(coeffs) - 1}")
    a4 = coeffs[4]
    if a4.degree() != 2 or coeffs[4].as_expr() != a4.LC() * X**2:
        raise HypothesisError(f"leading coefficient must be a multiple of x^2, got {a4.as_expr()}")
    if not coeffs[3].is_zero and evaluate(coeffs[3], Fraction(0)) != 0:
        raise HypothesisError("x must divide the coefficient of y^3")
    lead = a4.LC()
    transformed = bipoly(
        _clear_denominators(X**2 * f_tilde.as_expr().subs(Y, Y / X) / lead)
    )
    terms = dict(transformed.terms())
    if any(terms.get(key, 0) != 0 for key in ((0, 0), (1, 0), (0, 1))):
        raise HypothesisError("transformed curve has no singular point at the origin")
    c20, c11, c02 = (terms.get(key, 0) for key in ((2, 0), (1, 1), (0, 2)))
    if c11**2 - 4 * c20 * c02 == 0:
        raise HypothesisError("the singular point at the origin is not a node")
    disc = coefficients(discriminant(transformed))
    multiplicity = next((k for k, c in enumerate(disc) if c != 0), 0)
    if multiplicity < 2:
        raise HypothesisError("the fiber x = 0 is not singular")
    _LOGGER.debug("Improper fiber carries an A%s point", multiplicity - 1)
    return ImproperSpec(original=f_tilde, transformed=transformed, mu=multiplicity - 1)


def check_degrees(f: BiPoly, d: int) -> None:
    """Verify that f defines a proper tetragonal curve in the Hirzebruch surface of degree d."""
    coeffs = y_coefficients(f)
    if len(coeffs) != 5:
        raise HypothesisError(f"curve is not tetragonal (y-degree {len(coeffs) - 1})")
    for i, a in enumerate(coeffs):
        if not a.is_zero and a.degree() > d * (4 - i):
            raise HypothesisError(f"deg a_{i} = {a.degree()} exceeds {d * (4 - i)}")


def _candidate_cuts():
    yield Fraction(0)
    for n in itertools.count(1):
        for den in range(1, n + 1):
            if math.gcd(n, den) == 1:
                yield Fraction(-n, den)
                yield Fraction(n, den)


def regularize_infinity(
    f: BiPoly, d: int = DEFAULT_HIRZEBRUCH_DEGREE, cut: Fraction | None = None
) -> tuple[BiPoly, MobiusRecord]:
    """Move a regular fiber to infinity if needed, x = cut - 1/x'."""
    disc = discriminant(f)
    if disc.is_zero:
        raise HypothesisError("curve is not reduced")
    if cut is None:
        if disc.degree() == 12 * d:
            return f, MobiusRecord()
        cut = next(a for a in _candidate_cuts() if evaluate(disc, a) != 0)
    elif evaluate(disc, cut) == 0:
        raise HypothesisError(f"the fiber over the cut {cut} is singular")
    a = to_rational(cut)
    moved = _clear_denominators(
        X ** (4 * d) * f.as_expr().subs({X: a - 1 / X, Y: Y / X**d}, simultaneous=True)
    )
    g = bipoly(moved)
    _LOGGER.debug("Moved the regular fiber over %s to infinity", cut)
    return g, MobiusRecord(cut)


@functools.lru_cache(maxsize=4096)
def canonical_order(f: BiPoly, x: Fraction, eps: Fraction = ORDER_EPS) -> tuple[Branch, ...]:
    """The roots of f(x, .) by decreasing real part, then decreasing imaginary part."""
    g = fiber(f, x)
    if not g.is_sqf:
        raise HypothesisError(f"fiber over {x} is singular")
    for _ in range(ORDER_MAX_REFINE):
        boxes = complex_roots_boxed(g, eps)
        slots = [b for b in boxes if b.is_real or b.im[0] + b.im[1] > 0]
        slots.sort(key=lambda b: b.re[0], reverse=True)
        if all(nxt.re[1] < cur.re[0] for cur, nxt in itertools.pairwise(slots)):
            branches: list[Branch] = []
            for box in slots:
                re, im = box.center
                if box.is_real:
                    branches.append(Branch(box, (re, Fraction(0))))
                else:
                    branches.append(Branch(box, (re, im)))
                    branches.append(Branch(box.conjugate(), (re, -im)))
            return tuple(branches)
        eps /= 16
    raise CertificationError(f"real parts of the roots over {x} could not be separated")


def pair_zone(order: tuple[Branch, ...]) -> int:
    """Position zone of the imaginary pair in a fiber with two real branches."""
    flags = [branch.is_real for branch in order]
    if flags.count(False) != 2:
        raise HypothesisError("zones are defined for fibers with exactly two real branches")
    return flags.index(False)


def _mp(value: Fraction) -> mpmath.mpf:
    return mpmath.mpf(value.numerator) / value.denominator


def _numeric_roots(coeffs: list[list[Fraction]], x: mpmath.mpc) -> list[mpmath.mpc]:
    values = []
    for column in coeffs:
        acc = mpmath.mpc(0)
        for c in reversed(column):
            acc = acc * x + _mp(c)
        values.append(acc)
    roots = mpmath.polyroots(
        list(reversed(values)), maxsteps=400, extraprec=2 * mpmath.mp.prec
    )
    return [mpmath.mpc(root) for root in roots]


_TRANSITIONS = {
    (True, True): Transition.REAL_TO_REAL,
    (False, False): Transition.CONJUGATE_MERGE,
    (False, True): Transition.REAL_PAIR_APPEARS,
    (True, False): Transition.REAL_PAIR_VANISHES,
}

_ON_AXIS = (Fraction(0), Fraction(0))


@functools.lru_cache(maxsize=32)
def _gcd_chain(f: BiPoly, k: int) -> tuple[RatPoly, ...]:
    """Coefficients in y of the k-th subresultant of f and f_y, padded to length k + 1."""
    coeffs = y_coefficients(subresultant(f, f.diff(Y), k))
    return tuple(coeffs + [ratpoly(0)] * (k + 1 - len(coeffs)))


@functools.lru_cache(maxsize=64)
def _sheared_projection(f: BiPoly, shear: Fraction) -> RatPoly | None:
    """Res_y(f, f_y) after x -> x - shear * y, or None if the shear loses a point at infinity."""
    a = to_rational(shear)
    moved = [bipoly(p.as_expr().subs(X, X - a * Y)) for p in (f, f.diff(Y))]
    if any(y_coefficients(p)[-1].degree() > 0 for p in moved):
        return None
    projected = resultant(*moved)
    return None if projected.is_zero else projected


@dataclass(frozen=True)
class _SingularLocus:
    """Double points of a real singular fiber as the real roots of gcd(f, f_y) over x."""

    gcd: tuple[RatPoly, ...]
    mus: tuple[int, ...]
    node: int | None = None


def _interval_product(a, b) -> tuple[Fraction, Fraction]:
    products = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(products), max(products)


def _interval_quotient(a, b) -> tuple[Fraction, Fraction]:
    return _interval_product(a, (1 / b[1], 1 / b[0]))


def _point_boxes(values: list[tuple[Fraction, Fraction]]) -> list[Box] | None:
    """Intervals around the real roots of the gcd, by decreasing y; None if too coarse."""
    if len(values) == 2:
        s0, s1 = values
        if s1[0] <= 0 <= s1[1]:
            return None
        return [Box(_interval_quotient((-s0[1], -s0[0]), s1), _ON_AXIS)]
    s0, s1, s2 = values
    if s2[0] <= 0 <= s2[1]:
        return None
    square, product = _interval_product(s1, s1), _interval_product(s2, s0)
    delta = (square[0] - 4 * product[1], square[1] - 4 * product[0])
    if delta[0] <= 0:
        return None
    root = (sqrt_lower(delta[0]), sqrt_upper(delta[1]))
    twice = (2 * s2[0], 2 * s2[1])
    numerators = ((root[0] - s1[1], root[1] - s1[0]), (-root[1] - s1[1], -root[0] - s1[0]))
    boxes = [Box(_interval_quotient(num, twice), _ON_AXIS) for num in numerators]
    boxes.sort(key=lambda box: box.re[0], reverse=True)
    if boxes[0].re[0] <= boxes[1].re[1]:
        return None
    return boxes


def _locate_points(
    gcd: tuple[RatPoly, ...], x: AlgebraicNumber, width: Fraction
) -> tuple[AlgebraicNumber, list[Box]]:
    """Refine x until the y-intervals of its double points are at most ``width`` wide."""
    for _ in range(ENCLOSURE_STEPS):
        boxes = _point_boxes([enclose(c, x.lo, x.hi) for c in gcd])
        if boxes and all(box.re[1] - box.re[0] <= width for box in boxes):
            return x, boxes
        if x.is_rational:
            break
        x = x.refined((x.hi - x.lo) / 2**16)
    raise CertificationError(f"double points over {float(x):.6g} could not be enclosed")


def _count_in(factors: list[tuple[RatPoly, int]], lo: Fraction, hi: Fraction) -> int:
    return sum(m * g.count_roots(to_rational(lo), to_rational(hi)) for g, m in factors)


def _split_multiplicity(
    f: BiPoly, x: AlgebraicNumber, gcd: tuple[RatPoly, ...], multiplicity: int
) -> tuple[int, int]:
    """Types of two real double points from the orders of Res(f, f_y) along a sheared projection."""
    for shear in SHEARS:
        projected = _sheared_projection(f, shear)
        if projected is None:
            continue
        factors = squarefree_decompose(projected)
        width = Fraction(1, 2**12)
        for _ in range(SPLIT_STEPS):
            x, boxes = _locate_points(gcd, x, width)
            windows = []
            for box in boxes:
                moved = (shear * box.re[0], shear * box.re[1])
                windows.append((x.lo + min(moved) - width, x.hi + max(moved) + width))
            (lo1, hi1), (lo2, hi2) = windows
            if hi1 < lo2 or hi2 < lo1:
                counts = [_count_in(factors, lo, hi) for lo, hi in windows]
                # each count bounds its intersection number from above
                if sum(counts) == multiplicity and min(counts) >= 1:
                    _LOGGER.debug(
                        "Split multiplicity %s as %s with shear %s", multiplicity, counts, shear
                    )
                    return counts[0] - 1, counts[1] - 1
            width /= 2**16
    raise CertificationError(f"types of the double points over {float(x):.6g} are not separated")


def _singular_locus(
    f: BiPoly, x: AlgebraicNumber, multiplicity: int, special: bool
) -> _SingularLocus:
    """Exact number and types of the double points of the fiber over x."""
    where = float(x)
    first = _gcd_chain(f, 1)
    if sign_at(first[1], x) != 0:
        locus = _SingularLocus(first, (multiplicity - 1,))
    else:
        second = _gcd_chain(f, 2)
        s0, s1, s2 = second
        if sign_at(s2, x) == 0:
            raise HypothesisError(f"fiber near {where:.6g} has a point of multiplicity 3")
        delta = sign_at(s1**2 - 4 * s2 * s0, x)
        if delta == 0:
            raise HypothesisError(f"fiber near {where:.6g} has a point of multiplicity 3")
        if delta < 0:
            raise HypothesisError(f"fiber near {where:.6g} has two non-real double points")
        locus = _SingularLocus(second, _split_multiplicity(f, x, second, multiplicity))
    if not special:
        return locus
    if sign_at(locus.gcd[0], x) != 0:
        raise HypothesisError("the improper fiber has no double point at y = 0")
    node = 0
    if len(locus.mus) == 2 and sign_at(locus.gcd[1], x) * sign_at(locus.gcd[2], x) < 0:
        # the other point -s1/s2 lies above the node
        node = 1
    if locus.mus[node] != 1:
        raise HypothesisError(f"the improper fiber carries A{locus.mus[node]}, not a node")
    return replace(locus, node=node)


def _crossing_resultant(even: sympy.Expr, odd: sympy.Expr) -> RatPoly:
    try:
        res = resultant(bipoly(even), bipoly(odd))
    except ZeroPolynomialError as err:
        raise CertificationError("a side of a double point window meets a root everywhere") from err
    if res.is_zero:
        raise CertificationError("a side of a double point window meets a root everywhere")
    return res


def _vertical_crossings(f: BiPoly, a: Fraction) -> tuple[RatPoly, RatPoly]:
    """Polynomials in x vanishing wherever a root of f(x, .) has real part a."""
    c = [p.as_expr() for p in y_coefficients(bipoly(f.as_expr().subs(Y, Y + to_rational(a))))]
    even = sum(((-1) ** (k // 2) * c[k] * Y**k for k in range(0, len(c), 2)), sympy.Integer(0))
    odd = sum(
        ((-1) ** (k // 2) * c[k] * Y ** (k - 1) for k in range(1, len(c), 2)), sympy.Integer(0)
    )
    return ratpoly(c[0]), _crossing_resultant(even, odd)


def _horizontal_crossings(f: BiPoly, h: Fraction) -> RatPoly:
    """A polynomial in x vanishing wherever a root of f(x, .) has imaginary part h or -h."""
    b = to_rational(h)
    terms, derivative = [], f.as_expr()
    for k in range(f.degree(Y) + 1):
        terms.append(derivative * b**k / sympy.factorial(k))
        derivative = sympy.diff(derivative, Y)
    even = sum(((-1) ** (k // 2) * terms[k] for k in range(0, len(terms), 2)), sympy.Integer(0))
    odd = sum(((-1) ** (k // 2) * terms[k] / b for k in range(1, len(terms), 2)), sympy.Integer(0))
    return _crossing_resultant(even, odd)


@dataclass(frozen=True)
class _PointWindow:
    """A rectangle around one double point and the polynomials marking roots on its sides."""

    rect: Box
    crossings: tuple[RatPoly, ...]

    @property
    def y0(self) -> complex:
        """Center of the rectangle."""
        re, im = self.rect.center
        return complex(float(re), float(im))

    def is_sealed(self, lo: Fraction, hi: Fraction) -> bool:
        """Whether no root of f(x, .) meets the sides for x in [lo, hi]."""
        return all(
            p.degree() <= 0 or p.count_roots(to_rational(lo), to_rational(hi)) == 0
            for p in self.crossings
        )


def _point_windows(
    f: BiPoly, x: AlgebraicNumber, locus: _SingularLocus
) -> tuple[_PointWindow, ...]:
    """Squares around the double points reaching a third of the way to the other roots."""
    coeffs = [coefficients(a) for a in y_coefficients(f)]
    with mpmath.workdps(WINDOW_DPS):
        # just off the fiber, where the double roots are simple
        xs = mpmath.mpc(_mp(x.refined(Fraction(1, 2**200)).midpoint + Fraction(1, 2**150)))
        roots = [complex(z) for z in _numeric_roots(coeffs, xs)]
    _, rough = _locate_points(locus.gcd, x, Fraction(1, 2**24))
    halves = []
    for box in rough:
        y0 = float(box.center[0])
        gap = sorted(abs(z - y0) for z in roots)[2]
        halves.append(round_down(Fraction(gap / 3), 16))
    if min(halves) <= 0:
        raise CertificationError(f"double points over {float(x):.6g} are not separated")
    _, fine = _locate_points(locus.gcd, x, min(halves) / 16)
    windows = []
    for box, half in zip(fine, halves, strict=True):
        grid = half / 64
        c = math.floor(box.center[0] / grid) * grid
        rect = Box((c - half, c + half), (-half, half))
        crossings = (*_vertical_crossings(f, c - half), *_vertical_crossings(f, c + half))
        windows.append(_PointWindow(rect, (*crossings, _horizontal_crossings(f, half))))
    return tuple(windows)


def _inside(box: Box, rect: Box) -> bool | None:
    """Whether a root box lies inside the rectangle, outside it, or None if it straddles."""
    if (
        rect.re[0] < box.re[0]
        and box.re[1] < rect.re[1]
        and rect.im[0] < box.im[0]
        and box.im[1] < rect.im[1]
    ):
        return True
    if (
        box.re[1] < rect.re[0]
        or rect.re[1] < box.re[0]
        or box.im[1] < rect.im[0]
        or rect.im[1] < box.im[0]
    ):
        return False
    return None


def _merging_pair(f: BiPoly, x: Fraction, rect: Box) -> tuple[int, bool]:
    """Position j of the two branches over x inside the rectangle and whether they are real."""
    eps = ORDER_EPS
    for _ in range(STRADDLE_STEPS):
        order = canonical_order(f, x, eps)
        flags = [_inside(branch.box, rect) for branch in order]
        if None not in flags:
            inside = [k for k, flag in enumerate(flags) if flag]
            if len(inside) != 2 or inside[1] != inside[0] + 1:
                raise CertificationError(
                    f"branches {[k + 1 for k in inside]} over {float(x):.6g} meet a double point"
                )
            return inside[0] + 1, all(order[k].is_real for k in inside)
        eps /= 2**8
    raise CertificationError(f"a root over {float(x):.6g} stays on the side of a window")


def _parity_ok(mu: int, transition: Transition) -> bool:
    even = transition in (Transition.REAL_PAIR_APPEARS, Transition.REAL_PAIR_VANISHES)
    return mu >= 0 and (mu % 2 == 0) == even


def _classify_fiber(
    f: BiPoly,
    locus: _SingularLocus,
    windows: tuple[_PointWindow, ...],
    center: Fraction,
    eps: Fraction,
) -> tuple[FiberPoint, ...]:
    """Merging pair and transition of each double point, certified around the fiber."""
    lo, hi = center - eps, center + eps
    points = []
    for i, (mu, window) in enumerate(zip(locus.mus, windows, strict=True)):
        if not window.is_sealed(lo, hi):
            raise CertificationError("a root crosses the window of a double point", (lo, hi))
        pair_minus, real_minus = _merging_pair(f, lo, window.rect)
        pair_plus, real_plus = _merging_pair(f, hi, window.rect)
        if pair_minus != pair_plus:
            raise CertificationError(
                f"merging pair moves from {pair_minus} to {pair_plus}", (lo, hi)
            )
        transition = _TRANSITIONS[(real_minus, real_plus)]
        if not _parity_ok(mu, transition):
            raise CertificationError(f"A{mu} cannot show {transition.value}", (lo, hi))
        points.append(FiberPoint(mu, pair_plus, transition, window.y0, i == locus.node))
    return tuple(sorted(points, key=lambda point: point.pair))


def _nonreal_types(f: BiPoly, h: RatPoly, multiplicity: int) -> tuple[int, ...]:
    """Types of the double points over the roots of an irreducible factor h of D."""
    first = _gcd_chain(f, 1)
    if not first[1].rem(h).is_zero:
        return (multiplicity - 1,)
    s0, s1, s2 = gcd = _gcd_chain(f, 2)
    if s2.rem(h).is_zero or (s1**2 - 4 * s2 * s0).rem(h).is_zero:
        raise HypothesisError("a non-real singular fiber has a point of multiplicity 3")
    if multiplicity < 4:
        return (0, multiplicity - 2)
    s = sympy.Dummy("s")
    for shear in SHEARS:
        projected = _sheared_projection(f, shear)
        if projected is None:
            continue
        lifted = sum(
            c.as_expr().subs(X, s) * ((X - s) / to_rational(shear)) ** j
            for j, c in enumerate(gcd)
        )
        trace = ratpoly(sympy.resultant(h.as_expr().subs(X, s), _clear_denominators(lifted), s))
        if trace.degree() != 2 * h.degree() or not trace.is_sqf:
            continue
        counts = []
        for g, m in squarefree_decompose(projected):
            counts.extend([m] * g.gcd(trace).degree())
        low, high = min(counts, default=0), max(counts, default=0)
        if (
            len(counts) == 2 * h.degree()
            and sum(counts) == multiplicity * h.degree()
            and (low == high or counts.count(low) == h.degree())
        ):
            return low - 1, high - 1
    raise CertificationError("types of a non-real singular fiber are not separated")


def _approximate_roots(disc: RatPoly) -> list[complex]:
    roots: list[complex] = []
    with mpmath.workdps(50):
        for g, _ in squarefree_decompose(disc):
            coeffs = [_mp(c) for c in reversed(coefficients(g))]
            roots.extend(complex(z) for z in mpmath.polyroots(coeffs, maxsteps=400, extraprec=200))
    return roots


def _square_count(disc_sqf: RatPoly, center: Fraction, half: Fraction) -> int:
    lo = to_rational(center - half) - sympy.I * to_rational(half)
    hi = to_rational(center + half) + sympy.I * to_rational(half)
    return disc_sqf.count_roots(lo, hi)


def _neighbourhood(
    x: AlgebraicNumber, others: list[complex], q_roots: list[AlgebraicNumber], disc_sqf: RatPoly
) -> tuple[Fraction, Fraction]:
    """Rational center and radius of a square around x free of other roots of D and q."""
    xf = float(x)
    gaps = [abs(z - xf) for z in others if abs(z - xf) > 1e-12]
    gaps += [abs(float(root) - xf) for root in q_roots if compare(root, x) != 0]
    gap = Fraction(min(gaps, default=1.0)).limit_denominator(2**40)
    eps = round_down(min(gap * EPSILON_FRACTION, MAX_EPSILON), 16)
    while True:
        refined = x.refined(eps / 16)
        center = refined.lo if refined.is_rational else round_down(refined.midpoint, 64)
        if (
            abs(center - refined.midpoint) <= eps / 8
            and _square_count(disc_sqf, center, eps * 9 / 8) == 1
        ):
            return center, eps
        eps /= 2


def _real_roots(f: RatPoly) -> list[AlgebraicNumber]:
    if f.is_zero or f.degree() <= 0:
        return []
    return [root for root, _ in real_roots_with_multiplicity(f)]


def locate_singular_fibers(
    f: BiPoly,
    d: int = DEFAULT_HIRZEBRUCH_DEGREE,
    special_x: Fraction | None = None,
) -> tuple[tuple[FiberEvent, ...], tuple[NonrealFiber, ...]]:
    """Classify all real singular fibers and the conjugate pairs of non-real ones."""
    model = depress_quartic(f)
    data = cubic_resolvent(model)
    disc = data.D
    if disc.is_zero:
        raise HypothesisError("curve is not reduced")
    if disc.degree() < 12 * d:
        raise SingularInfinity("the fiber at infinity is singular")
    disc_sqf = disc.sqf_part()
    approx = _approximate_roots(disc)
    q_roots = _real_roots(model.q)
    nonreal: list[NonrealFiber] = []
    located: list[tuple[AlgebraicNumber, int]] = []
    # real roots become events; each conjugate pair of the others is typed once
    for g, k in squarefree_decompose(disc):
        real = _real_roots(g)
        located.extend((root, k) for root in real)
        if g.degree() == len(real):
            continue
        for h, _ in g.factor_list()[1]:
            pairs = (h.degree() - len(_real_roots(h))) // 2
            if pairs:
                nonreal.extend([NonrealFiber(k, _nonreal_types(f, h, k))] * pairs)
    located.sort(key=lambda item: float(item[0]))
    events = []
    for x, k in located:
        special = special_x is not None and compare(x, AlgebraicNumber.rational(special_x)) == 0
        # the double points and their windows do not depend on eps
        locus = _singular_locus(f, x, k, special)
        windows = _point_windows(f, x, locus)
        center, eps = _neighbourhood(x, approx, q_roots, disc_sqf)
        # shrink eps until every double point is isolated in its window
        for _ in range(EPSILON_RETRIES):
            try:
                points = _classify_fiber(f, locus, windows, center, eps)
                break
            except CertificationError as err:
                _LOGGER.debug("Shrinking neighbourhood of %.6g: %s", float(x), err)
                eps = round_down(eps * 7 / 16, 16)
        else:
            raise CertificationError(
                f"cannot certify the fiber near {float(x):.6g}", (center - eps, center + eps)
            )
        node = next((point.pair for point in points if point.special), None)
        events.append(
            FiberEvent(
                x=x,
                points=points,
                multiplicity=k,
                center=center,
                epsilon=eps,
                proper=not special,
                slope=slope_for(node),
            )
        )
        _LOGGER.debug("Fiber %.6g: %s (multiplicity %s)", float(x), events[-1].label, k)
    return tuple(events), tuple(sorted(nonreal, key=lambda fiber: (fiber.multiplicity, fiber.mus)))


def diagram_radius(model: QuarticModel, data: ResolventData, events) -> Fraction:
    """A power of two beyond every root of D, q and b1 and every fiber neighbourhood."""
    bound = cauchy_bound(data.D)
    for poly in (model.q, data.b1):
        if poly.degree() > 0:
            bound = max(bound, cauchy_bound(poly))
    for event in events:
        bound = max(bound, abs(event.center) + event.epsilon)
    radius = Fraction(2)
    while radius <= 2 * bound:
        radius *= 2
    return radius


def segment_profiles(
    f: BiPoly,
    model: QuarticModel,
    data: ResolventData,
    events: tuple[FiberEvent, ...],
    radius: Fraction,
) -> tuple[SegmentProfile, ...]:
    """Real branch count, zone moves and twist over each segment between fibers."""
    # segments run between the regular fibers x_i^+ and x_{i+1}^-, closed off at +-R
    starts = [-radius] + [event.x_plus for event in events]
    ends = [event.x_minus for event in events] + [radius]
    profiles = []
    for index, (start, end) in enumerate(zip(starts, ends, strict=True)):
        # the real root count is constant on a segment, so its midpoint decides it
        signature = real_root_signature(model, (start + end) / 2, data)
        if signature is Signature.DEGENERATE:
            raise HypothesisError(f"segment {index} meets a singular fiber")
        if signature is Signature.TWO_REAL:
            # the imaginary pair walks one zone at a time between the end fibers
            zones = zone_path(
                pair_zone(canonical_order(f, start)), pair_zone(canonical_order(f, end))
            )
            profiles.append(SegmentProfile(index, start, end, 2, crossings=zones))
        elif signature is Signature.ZERO_REAL:
            # all four branches imaginary: the roots of q give the twist
            cert = twist_parameter(model, start, end, data)
            profiles.append(SegmentProfile(index, start, end, 0, twist_certificate=cert))
        else:
            profiles.append(SegmentProfile(index, start, end, 4))
    return tuple(profiles)


def scan_curve(
    f: BiPoly,
    d: int = DEFAULT_HIRZEBRUCH_DEGREE,
    improper: ImproperSpec | None = None,
    cut: Fraction | None = None,
    reference: int = 0,
) -> CurveDiagram:
    """Build the curve diagram of a proper tetragonal curve."""
    check_degrees(f, d)
    working, mobius = regularize_infinity(f, d, cut)
    special_x = mobius.to_working(Fraction(0)) if improper is not None else None
    events, nonreal = locate_singular_fibers(working, d, special_x)
    model = depress_quartic(working)
    data = cubic_resolvent(model)
    radius = diagram_radius(model, data, events)
    segments = segment_profiles(working, model, data, events, radius)
    if improper is not None:
        node = next(
            (point.pair for event in events for point in event.points if point.special), None
        )
        improper = replace(improper, node_pair=node)
    if not 0 <= reference <= len(events):
        raise HypothesisError(f"reference fiber {reference} out of range 0..{len(events)}")
    _LOGGER.info(
        "Scanned curve: %s real singular fibers, %s conjugate pairs of non-real ones",
        len(events),
        len(nonreal),
    )
    return CurveDiagram(
        f=working,
        d=d,
        model=model,
        data=data,
        events=events,
        segments=segments,
        radius=radius,
        mobius=mobius,
        improper=improper,
        nonreal=nonreal,
        reference=reference,
    )


def describe_nonreal(nonreal: tuple[NonrealFiber, ...]) -> list[str]:
    """Types of the non-real singular fibers, one label per conjugate pair."""
    return [fiber.label for fiber in nonreal]


__all__ = [
    "Branch",
    "CurveDiagram",
    "FiberEvent",
    "FiberPoint",
    "ImproperSpec",
    "MobiusRecord",
    "NonrealFiber",
    "SegmentProfile",
    "SingularInfinity",
    "canonical_order",
    "improper_to_proper",
    "locate_singular_fibers",
    "regularize_infinity",
    "scan_curve",
    "segment_profiles",
]
