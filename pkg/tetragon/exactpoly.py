"""Exact polynomial arithmetic over the rationals.

Univariate polynomials (``RatPoly``) are sympy ``Poly`` objects in ``X`` over
``QQ``; bivariate curve equations (``BiPoly``) are ``Poly`` objects in ``X``
and ``Y``. Every decision made here is exact: floating point only ever
appears in ``__float__`` conversions used for display.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Any

import sympy
from sympy import QQ, Poly

from .exceptions import HypothesisError, ZeroPolynomialError

_LOGGER = logging.getLogger(__name__)

X, Y = sympy.symbols("x y")

RatPoly = Poly
BiPoly = Poly


def to_fraction(value: Any) -> Fraction:
    """Convert a sympy/gmpy rational to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    p = getattr(value, "p", None)
    if p is not None:
        return Fraction(int(p), int(value.q))
    return Fraction(int(value.numerator), int(value.denominator))


def to_rational(value: Fraction | int) -> sympy.Rational:
    """Convert a Fraction to a sympy Rational."""
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def ratpoly(expr: Any, gen: sympy.Symbol = X) -> RatPoly:
    """Build a univariate polynomial over QQ."""
    return Poly(expr, gen, domain=QQ)


def bipoly(expr: Any) -> BiPoly:
    """Build a bivariate polynomial in x, y over QQ."""
    return Poly(expr, X, Y, domain=QQ)


def coefficients(f: RatPoly) -> list[Fraction]:
    """Dense coefficient list of a univariate polynomial, indexed by degree."""
    if f.is_zero:
        return []
    return [to_fraction(c) for c in reversed(f.all_coeffs())]


def y_coefficients(f: BiPoly) -> list[RatPoly]:
    """Coefficients a_i(x) of a bivariate polynomial, indexed by the y-degree i."""
    as_y = Poly(f.as_expr(), Y)
    return [ratpoly(c) for c in reversed(as_y.all_coeffs())]


def horner(coeffs: list[Fraction], x: Fraction) -> Fraction:
    """Evaluate a dense ascending coefficient list at an exact rational."""
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def evaluate(f: RatPoly, x: Fraction) -> Fraction:
    """Exact value of a univariate polynomial at a rational point."""
    return horner(coefficients(f), Fraction(x))


def fiber(f: BiPoly, x: Fraction) -> RatPoly:
    """The univariate polynomial f(x, .) in Y at a rational abscissa."""
    return ratpoly(f.as_expr().subs(X, to_rational(x)), Y)


def sign(value: Fraction) -> int:
    """Sign of an exact rational."""
    return (value > 0) - (value < 0)


def cauchy_bound(f: RatPoly) -> Fraction:
    """A rational bound strictly larger than the modulus of every complex root."""
    coeffs = coefficients(f)
    if not coeffs:
        raise ZeroPolynomialError("root bound of the zero polynomial")
    lead = abs(coeffs[-1])
    return 1 + max((abs(c) / lead for c in coeffs[:-1]), default=Fraction(0))


def round_up(value: Fraction, bits: int = 64) -> Fraction:
    """Round a nonnegative rational up to a dyadic with ``bits`` significant bits."""
    if value <= 0:
        return Fraction(0) if value == 0 else -round_down(-value, bits)
    shift = bits - (value.numerator.bit_length() - value.denominator.bit_length())
    scale = Fraction(2) ** shift
    scaled = value * scale
    return Fraction(-((-scaled.numerator) // scaled.denominator)) / scale


def round_down(value: Fraction, bits: int = 64) -> Fraction:
    """Round a nonnegative rational down to a dyadic with ``bits`` significant bits."""
    if value <= 0:
        return Fraction(0) if value == 0 else -round_up(-value, bits)
    shift = bits - (value.numerator.bit_length() - value.denominator.bit_length())
    scale = Fraction(2) ** shift
    scaled = value * scale
    return Fraction(scaled.numerator // scaled.denominator) / scale


def sqrt_upper(value: Fraction) -> Fraction:
    """Rational upper bound of the square root of a nonnegative rational."""
    value = round_up(value, 96)
    num, den = value.numerator, value.denominator
    root = isqrt(num * den)
    if root * root < num * den:
        root += 1
    return Fraction(root, den)


def sqrt_lower(value: Fraction) -> Fraction:
    """Rational lower bound of the square root of a nonnegative rational."""
    value = round_down(value, 96)
    num, den = value.numerator, value.denominator
    return Fraction(isqrt(num * den), den)


@dataclass(frozen=True)
class AlgebraicNumber:
    """A real algebraic number given by a squarefree polynomial and an isolator."""

    defining: RatPoly
    lo: Fraction
    hi: Fraction
    _coeffs: tuple[Fraction, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self) -> None:
        """Cache the coefficient vector."""
        if not self._coeffs:
            object.__setattr__(self, "_coeffs", tuple(coefficients(self.defining)))

    @classmethod
    def rational(cls, value: Fraction | int) -> AlgebraicNumber:
        """Wrap an exact rational."""
        value = Fraction(value)
        return cls(ratpoly(X - to_rational(value)), value, value)

    @property
    def is_rational(self) -> bool:
        """Whether the isolator has collapsed to a point."""
        return self.lo == self.hi

    @property
    def midpoint(self) -> Fraction:
        """Midpoint of the current isolator."""
        return (self.lo + self.hi) / 2

    def value_at(self, x: Fraction) -> Fraction:
        """Value of the defining polynomial at a rational point."""
        return horner(list(self._coeffs), x)

    def refined(self, width: Fraction) -> AlgebraicNumber:
        """Return the same number with an isolator of width at most ``width``."""
        lo, hi = refine(self, width)
        if (lo, hi) == (self.lo, self.hi):
            return self
        return AlgebraicNumber(self.defining, lo, hi, self._coeffs)

    def __float__(self) -> float:
        """Approximate value for display."""
        return float(self.refined(Fraction(1, 2**60)).midpoint)

    def __repr__(self) -> str:
        """Short representation showing the approximate value."""
        if self.is_rational:
            return f"AlgebraicNumber({self.lo})"
        return f"AlgebraicNumber(~{float(self):.6g})"


@dataclass(frozen=True)
class Box:
    """A rectangle in the complex plane with rational corners."""

    re: tuple[Fraction, Fraction]
    im: tuple[Fraction, Fraction]

    @property
    def is_real(self) -> bool:
        """Whether the box is a real interval."""
        return self.im == (Fraction(0), Fraction(0))

    @property
    def center(self) -> tuple[Fraction, Fraction]:
        """Center of the box as a (re, im) pair."""
        return (self.re[0] + self.re[1]) / 2, (self.im[0] + self.im[1]) / 2

    def conjugate(self) -> Box:
        """Mirror image in the real axis."""
        return Box(self.re, (-self.im[1], -self.im[0]))

    def corners(self) -> list[tuple[Fraction, Fraction]]:
        """The four corners (two for a real interval)."""
        if self.is_real:
            return [(self.re[0], Fraction(0)), (self.re[1], Fraction(0))]
        return [(a, b) for a in self.re for b in self.im]


def _require_nonzero(*polys: Poly) -> None:
    for f in polys:
        if f.is_zero:
            raise ZeroPolynomialError(f"zero polynomial in {f.gens}")


def resultant(f: Poly, g: Poly, gen: sympy.Symbol = Y) -> RatPoly:
    """Resultant of f and g eliminating ``gen`` (subresultant PRS)."""
    _require_nonzero(f, g)
    if f.degree(gen) <= 0 and g.degree(gen) <= 0:
        raise ZeroPolynomialError(f"both arguments are constant in {gen}")
    res = sympy.resultant(f.as_expr(), g.as_expr(), gen)
    remaining = [s for s in (X, Y) if s != gen]
    return ratpoly(sympy.expand(res), remaining[0] if remaining else X)


def discriminant(f: Poly, gen: sympy.Symbol = Y) -> RatPoly:
    """Discriminant of f with respect to ``gen``.

    Normalized as (-1)^(n(n-1)/2) res(f, f') / lc(f), so the discriminant of a
    monic depressed quartic is the classical expression in p, q, r.
    """
    _require_nonzero(f)
    disc = sympy.discriminant(f.as_expr(), gen)
    remaining = [s for s in (X, Y) if s != gen]
    return ratpoly(sympy.expand(disc), remaining[0] if remaining else X)


def subresultant(f: Poly, g: Poly, k: int, gen: sympy.Symbol = Y) -> BiPoly:
    """The k-th subresultant of f and g in ``gen``, from its determinantal formula.

    Its coefficient of ``gen^k`` is the principal subresultant coefficient; where
    the leading coefficients do not vanish, the gcd of the specialized
    polynomials has degree k exactly when the principal coefficients of
    index below k vanish and the one of index k does not.
    """
    _require_nonzero(f, g)
    m, n = f.degree(gen), g.degree(gen)
    if not 0 <= k < min(m, n):
        raise ValueError(f"subresultant index {k} out of range for degrees {m}, {n}")
    fc = Poly(f.as_expr(), gen).all_coeffs()
    gc = Poly(g.as_expr(), gen).all_coeffs()
    width = m + n - k
    rows = [[fc[c - r] if 0 <= c - r <= m else 0 for c in range(width)] for r in range(n - k)]
    rows += [[gc[c - r] if 0 <= c - r <= n else 0 for c in range(width)] for r in range(m - k)]
    head = m + n - 2 * k - 1
    total = sympy.Integer(0)
    for j in range(k + 1):
        minor = sympy.Matrix([row[:head] + [row[width - 1 - j]] for row in rows])
        total += sympy.expand(minor.det(method="berkowitz")) * gen**j
    return bipoly(sympy.expand(total))


def enclose(f: RatPoly, lo: Fraction, hi: Fraction, bits: int = 128) -> tuple[Fraction, Fraction]:
    """An interval containing f([lo, hi]), by outward rounded interval Horner evaluation."""
    acc = (Fraction(0), Fraction(0))
    for c in reversed(coefficients(f)):
        products = (acc[0] * lo, acc[0] * hi, acc[1] * lo, acc[1] * hi)
        acc = (round_down(min(products) + c, bits), round_up(max(products) + c, bits))
    return acc


def squarefree_decompose(f: RatPoly) -> list[tuple[RatPoly, int]]:
    """Monic squarefree factors with multiplicities; the constant is discarded."""
    _require_nonzero(f)
    _, factors = f.sqf_list()
    return [(g, k) for g, k in factors if g.degree() > 0]


def _verified_interval(sqf: RatPoly, lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    if lo == hi:
        return lo, hi
    if sqf.count_roots(to_rational(lo), to_rational(hi)) != 1:
        raise HypothesisError(f"isolator [{lo}, {hi}] does not isolate a single root")
    if evaluate(sqf, lo) == 0:
        return lo, lo
    if evaluate(sqf, hi) == 0:
        return hi, hi
    return lo, hi


def real_roots_with_multiplicity(f: RatPoly) -> list[tuple[AlgebraicNumber, int]]:
    """All real roots of f in increasing order, with multiplicities."""
    _require_nonzero(f)
    if f.degree() <= 0:
        return []
    sqf = f.sqf_part()
    roots = []
    for (a, b), k in f.intervals():
        lo, hi = _verified_interval(sqf, to_fraction(a), to_fraction(b))
        roots.append((AlgebraicNumber(sqf, lo, hi), k))
    roots.sort(key=lambda item: item[0].lo)
    _LOGGER.debug("Isolated %s real roots of a degree %s polynomial", len(roots), f.degree())
    return roots


def isolate_real_roots(f: RatPoly) -> list[AlgebraicNumber]:
    """Complete, disjoint, increasing isolation of the real roots of f."""
    return [root for root, _ in real_roots_with_multiplicity(f)]


def refine(a: AlgebraicNumber, width: Fraction) -> tuple[Fraction, Fraction]:
    """Bisect the isolator of ``a`` until its width is at most ``width``.

    The returned interval nests inside the current one; a wider request
    returns the current isolator unchanged.
    """
    lo, hi = a.lo, a.hi
    if hi - lo <= width:
        return lo, hi
    s_lo = sign(a.value_at(lo))
    while hi - lo > width:
        mid = (lo + hi) / 2
        s_mid = sign(a.value_at(mid))
        if s_mid == 0:
            return mid, mid
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def compare(a: AlgebraicNumber, b: AlgebraicNumber) -> int:
    """Exact comparison of two real algebraic numbers."""
    if a.is_rational and b.is_rational:
        return sign(a.lo - b.lo)
    common = sympy.gcd(a.defining, b.defining)
    width = max(a.hi - a.lo, b.hi - b.lo)
    while True:
        if a.hi < b.lo:
            return -1
        if b.hi < a.lo:
            return 1
        if common.degree() > 0 and (
            _root_count(common, a.lo, a.hi) == 1
            and _root_count(common, b.lo, b.hi) == 1
            and _root_count(common, max(a.lo, b.lo), min(a.hi, b.hi)) == 1
        ):
            return 0
        width /= 2
        a, b = a.refined(width), b.refined(width)


def _root_count(f: RatPoly, lo: Fraction, hi: Fraction) -> int:
    return f.count_roots(to_rational(lo), to_rational(hi))


def sign_at(f: RatPoly, a: AlgebraicNumber) -> int:
    """Exact sign of f at a real algebraic number."""
    if f.is_zero:
        return 0
    if a.is_rational:
        return sign(evaluate(f, a.lo))
    reduced = f.rem(a.defining)
    if reduced.is_zero:
        return 0
    common = sympy.gcd(reduced, a.defining)
    if common.degree() > 0 and common.count_roots(to_rational(a.lo), to_rational(a.hi)) > 0:
        return 0
    sqf = reduced.sqf_part()
    if sqf.degree() <= 0:
        return sign(to_fraction(reduced.LC()))
    width = a.hi - a.lo
    while sqf.count_roots(to_rational(a.lo), to_rational(a.hi)) > 0:
        width /= 2
        a = a.refined(width)
        if a.is_rational:
            return sign(evaluate(reduced, a.lo))
    return sign(evaluate(reduced, a.midpoint))


def complex_roots_boxed(f: RatPoly, precision: Fraction | None = None) -> list[Box]:
    """Disjoint isolating boxes for all complex roots of a squarefree f.

    Non-real boxes come in exactly conjugate pairs; real roots get degenerate
    imaginary intervals.
    """
    _require_nonzero(f)
    if not f.is_sqf:
        raise HypothesisError("complex root isolation needs a squarefree polynomial")
    kwargs = {"all": True, "sqf": True}
    if precision is not None:
        kwargs["eps"] = to_rational(precision)
    real, nonreal = f.intervals(**kwargs)
    boxes = [Box((to_fraction(a), to_fraction(b)), (Fraction(0), Fraction(0))) for a, b in real]
    for lower, upper in nonreal:
        u, v = (to_fraction(part) for part in sympy.sympify(lower).as_real_imag())
        s, t = (to_fraction(part) for part in sympy.sympify(upper).as_real_imag())
        if v + t <= 0:
            continue
        box = Box((u, s), (v, t))
        boxes.extend((box, box.conjugate()))
    if len(boxes) != f.degree():
        raise HypothesisError(f"found {len(boxes)} root boxes for a degree {f.degree()} polynomial")
    return boxes
