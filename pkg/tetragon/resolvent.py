"""Reduced quartic, cubic resolvent and twist parameter of a tetragonal curve."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import sympy

from .exactpoly import (
    X,
    Y,
    AlgebraicNumber,
    BiPoly,
    RatPoly,
    cauchy_bound,
    compare,
    evaluate,
    isolate_real_roots,
    ratpoly,
    sign,
    sign_at,
    squarefree_decompose,
    to_fraction,
    to_rational,
    y_coefficients,
)
from .exceptions import HypothesisError

_LOGGER = logging.getLogger(__name__)


class Signature(str, Enum):
    """Number of real roots of the quartic in a fiber."""

    FOUR_REAL = "four-real"
    TWO_REAL = "two-real"
    ZERO_REAL = "zero-real"
    DEGENERATE = "degenerate"

    @property
    def real_count(self) -> int:
        """Number of real branches, -1 for a singular fiber."""
        return {"four-real": 4, "two-real": 2, "zero-real": 0}.get(self.value, -1)


@dataclass(frozen=True)
class QuarticModel:
    """The depressed monic quartic y^4 + p y^2 + q y + r."""

    p: RatPoly
    q: RatPoly
    r: RatPoly
    shift: RatPoly
    lead: Fraction

    def as_bipoly(self) -> BiPoly:
        """The depressed quartic as a bivariate polynomial."""
        expr = Y**4 + self.p.as_expr() * Y**2 + self.q.as_expr() * Y + self.r.as_expr()
        return sympy.Poly(expr, X, Y, domain=sympy.QQ)


@dataclass(frozen=True)
class ResolventData:
    """Modified cubic resolvent y^3 - 2p y^2 + b1 y + q^2 and its reduced form."""

    b1: RatPoly
    g2: RatPoly
    g3: RatPoly
    D: RatPoly

    def resolvent(self, model: QuarticModel) -> BiPoly:
        """The modified cubic resolvent as a bivariate polynomial."""
        expr = (
            Y**3
            - 2 * model.p.as_expr() * Y**2
            + self.b1.as_expr() * Y
            + model.q.as_expr() ** 2
        )
        return sympy.Poly(expr, X, Y, domain=sympy.QQ)

    def reduced(self) -> BiPoly:
        """The reduced resolvent y^3 + g2 y + g3."""
        expr = Y**3 + self.g2.as_expr() * Y + self.g3.as_expr()
        return sympy.Poly(expr, X, Y, domain=sympy.QQ)


@dataclass(frozen=True)
class TwistContribution:
    """One root of q inside a zero-real segment."""

    root: AlgebraicNumber
    multiplicity: int
    b1_sign: int
    direction: int

    @property
    def value(self) -> int:
        """Contribution to the twist parameter."""
        if self.multiplicity % 2 == 0 or self.b1_sign < 0:
            return 0
        return self.direction


@dataclass(frozen=True)
class TwistCertificate:
    """Roots of q on a segment with four non-real branches and the resulting twist."""

    lo: Fraction
    hi: Fraction
    contributions: tuple[TwistContribution, ...]

    @property
    def t(self) -> int:
        """The twist parameter."""
        return sum(c.value for c in self.contributions)


def depress_quartic(f: BiPoly) -> QuarticModel:
    """Normalize a proper tetragonal polynomial to y^4 + p y^2 + q y + r."""
    coeffs = y_coefficients(f)
    if len(coeffs) != 5:
        raise HypothesisError(f"curve is not tetragonal (y-degree {len(coeffs) - 1})")
    a4 = coeffs[4]
    if a4.degree() > 0:
        raise HypothesisError("curve not proper: leading coefficient depends on x")
    lead = to_fraction(a4.LC())
    shift = ratpoly(coeffs[3].as_expr() / (4 * to_rational(lead)))
    moved = sympy.expand(f.as_expr().subs(Y, Y - shift.as_expr()) / to_rational(lead))
    p3, p2, p1, p0 = reversed(y_coefficients(sympy.Poly(moved, X, Y, domain=sympy.QQ))[:4])
    if not p3.is_zero:
        raise HypothesisError("depression left a cubic term")
    _LOGGER.debug("Depressed quartic with shift %s", shift.as_expr())
    return QuarticModel(p=p2, q=p1, r=p0, shift=shift, lead=lead)


def cubic_resolvent(m: QuarticModel) -> ResolventData:
    """Resolvent data of a depressed quartic."""
    p, q, r = (poly.as_expr() for poly in (m.p, m.q, m.r))
    b1 = sympy.expand(p**2 - 4 * r)
    g2 = sympy.expand(b1 - sympy.Rational(4, 3) * p**2)
    g3 = sympy.expand(-sympy.Rational(16, 27) * p**3 + sympy.Rational(2, 3) * p * b1 + q**2)
    disc = sympy.expand(
        16 * p**4 * r
        - 4 * p**3 * q**2
        - 128 * p**2 * r**2
        + 144 * p * q**2 * r
        - 27 * q**4
        + 256 * r**3
    )
    return ResolventData(b1=ratpoly(b1), g2=ratpoly(g2), g3=ratpoly(g3), D=ratpoly(disc))


def _sign(f: RatPoly, x: Fraction | AlgebraicNumber) -> int:
    if isinstance(x, AlgebraicNumber):
        return sign_at(f, x)
    return sign(evaluate(f, Fraction(x)))


def real_root_signature(
    m: QuarticModel, x: Fraction | AlgebraicNumber, data: ResolventData | None = None
) -> Signature:
    """Exact count of real roots of the quartic at x."""
    data = data or cubic_resolvent(m)
    disc = _sign(data.D, x)
    if disc == 0:
        return Signature.DEGENERATE
    if disc < 0:
        return Signature.TWO_REAL
    if _sign(m.p, x) < 0 and _sign(data.b1, x) > 0:
        return Signature.FOUR_REAL
    return Signature.ZERO_REAL


def _bounds(m: QuarticModel, data: ResolventData, lo: Fraction | None, hi: Fraction | None):
    bound = max(cauchy_bound(data.D), cauchy_bound(m.q) if m.q.degree() > 0 else Fraction(1))
    return (-bound if lo is None else lo), (bound if hi is None else hi)


def _crossing_direction(q: RatPoly, root: AlgebraicNumber) -> int:
    """+1 if q increases through an odd-multiplicity root, -1 if it decreases."""
    sqf = q.sqf_part()
    delta = Fraction(1)
    if not root.is_rational:
        delta = root.hi - root.lo
    while True:
        if root.is_rational:
            lo, hi = root.lo - delta, root.lo + delta
        else:
            root = root.refined(delta)
            lo, hi = root.lo, root.hi
            if root.is_rational:
                continue
        if (
            sqf.count_roots(to_rational(lo), to_rational(hi)) == 1
            and evaluate(q, lo) != 0
            and evaluate(q, hi) != 0
        ):
            return sign(evaluate(q, hi))
        delta /= 2


def twist_parameter(
    m: QuarticModel,
    lo: Fraction | None,
    hi: Fraction | None,
    data: ResolventData | None = None,
) -> TwistCertificate:
    """Signed count of the roots of q where all four branches become imaginary.

    ``None`` endpoints stand for the unbounded ends of the real line.
    """
    data = data or cubic_resolvent(m)
    a, b = _bounds(m, data, lo, hi)
    disc_sqf = data.D.sqf_part()
    if disc_sqf.degree() > 0 and disc_sqf.count_roots(to_rational(a), to_rational(b)) > 0:
        raise HypothesisError(f"discriminant vanishes inside the segment [{a}, {b}]")
    if real_root_signature(m, (a + b) / 2, data) is not Signature.ZERO_REAL:
        raise HypothesisError("twist parameter requested on a segment with real branches")
    if m.q.is_zero:
        raise HypothesisError("q vanishes identically; perturb the coordinates")
    contributions = []
    low, high = AlgebraicNumber.rational(a), AlgebraicNumber.rational(b)
    for factor, k in squarefree_decompose(m.q):
        for root in isolate_real_roots(factor):
            if compare(root, low) <= 0 or compare(root, high) >= 0:
                continue
            b1_sign = sign_at(data.b1, root)
            if b1_sign == 0 and k % 2 == 1:
                raise HypothesisError(
                    f"b1 vanishes at a root of q near {float(root):.6g}; perturb the coordinates"
                )
            direction = _crossing_direction(m.q, root) if k % 2 == 1 else 0
            contributions.append(TwistContribution(root, k, b1_sign, direction))
    contributions.sort(key=lambda c: c.root.lo)
    cert = TwistCertificate(a, b, tuple(contributions))
    _LOGGER.debug("Twist on [%s, %s]: t=%s from %s roots of q", a, b, cert.t, len(contributions))
    return cert
