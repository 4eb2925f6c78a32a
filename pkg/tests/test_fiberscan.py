"""Tests for the fiber scan."""

from fractions import Fraction

import pytest

from tetragon.braidkit import Transition
from tetragon.exactpoly import X, Y, AlgebraicNumber, bipoly, ratpoly
from tetragon.exceptions import CertificationError, HypothesisError
from tetragon.fiberscan import (
    MobiusRecord,
    NonrealFiber,
    _classify_fiber,
    _nonreal_types,
    _point_windows,
    _singular_locus,
    canonical_order,
    check_degrees,
    describe_nonreal,
    improper_to_proper,
    pair_zone,
    regularize_infinity,
)


def test_canonical_order() -> None:
    """Test decreasing real part, then decreasing imaginary part."""
    f = bipoly(Y * (Y - 2) * (Y**2 - 2 * Y + 2))
    order = canonical_order(f, Fraction(0))
    assert [branch.is_real for branch in order] == [True, False, False, True]
    assert [float(branch.point[0]) for branch in order] == pytest.approx([2, 1, 1, 0], abs=1e-3)
    assert order[1].point[1] > 0 > order[2].point[1]
    assert pair_zone(order) == 1


def test_canonical_order_singular_fiber() -> None:
    """Test that a fiber with a double root is refused."""
    with pytest.raises(HypothesisError):
        canonical_order(bipoly((Y**2 - X) * (Y**2 - 4)), Fraction(0))


def test_pair_zone_needs_two_real() -> None:
    """Test that zones only exist with two real branches."""
    order = canonical_order(bipoly((Y**2 - 1) * (Y**2 - 4)), Fraction(0))
    with pytest.raises(HypothesisError):
        pair_zone(order)


def test_check_degrees() -> None:
    """Test the degree bounds deg a_i <= d (4 - i)."""
    check_degrees(bipoly(Y**4 + X**4), 1)
    with pytest.raises(HypothesisError):
        check_degrees(bipoly(Y**4 + X**5), 1)
    with pytest.raises(HypothesisError):
        check_degrees(bipoly(Y**3 + X), 1)


def test_regularize_keeps_regular_infinity() -> None:
    """Test that a discriminant of full degree needs no change."""
    f = bipoly(Y**4 + X**8 + 1)
    g, record = regularize_infinity(f, 2)
    assert record.is_identity
    assert g == f


def test_regularize_moves_a_regular_fiber() -> None:
    """Test the first regular cut."""
    f = bipoly(Y**4 + X)
    g, record = regularize_infinity(f, 1)
    assert record.cut == -1
    assert not record.is_identity
    check_degrees(g, 1)


def test_regularize_rejects_singular_cut() -> None:
    """Test that a cut over a singular fiber is refused."""
    with pytest.raises(HypothesisError):
        regularize_infinity(bipoly(Y**4 + X), 1, Fraction(0))


def test_mobius_record() -> None:
    """Test the coordinate change x = cut - 1/x'."""
    record = MobiusRecord(Fraction(-4))
    assert record.to_working(Fraction(-4)) is None
    assert record.to_working(Fraction(0)) == Fraction(-1, 4)
    assert record.to_original(-0.25) == pytest.approx(0.0)
    assert MobiusRecord().to_working(Fraction(3)) == 3


def test_improper_to_proper() -> None:
    """Test the model with a node at the origin tangent to the fiber."""
    f_tilde = bipoly((Y**2 - 1) * (X**2 * Y**2 - 1))
    spec = improper_to_proper(f_tilde)
    assert spec.transformed == bipoly((Y**2 - X**2) * (Y**2 - 1))
    assert spec.mu == 1
    assert spec.original == f_tilde


def test_improper_to_proper_shape() -> None:
    """Test that the leading coefficient must be a multiple of x^2."""
    with pytest.raises(HypothesisError):
        improper_to_proper(bipoly(X * Y**4 + 1))
    with pytest.raises(HypothesisError):
        improper_to_proper(bipoly(X**2 * Y**4 + Y**3 + 1))


CUSP = bipoly((Y**2 - X**3) * (Y - 2) * (Y + 3))
NODE_AND_A4 = bipoly((Y**2 - X**2) * ((Y - 3) ** 2 - X**5))
ORIGIN = AlgebraicNumber.rational(0)


def _classify(f, multiplicity: int, eps: Fraction, special: bool = False):
    locus = _singular_locus(f, ORIGIN, multiplicity, special)
    return _classify_fiber(f, locus, _point_windows(f, ORIGIN, locus), Fraction(0), eps)


def test_cusp_fiber() -> None:
    """Test an A2 point whose real pair appears on the right."""
    (point,) = _classify(CUSP, 3, Fraction(1, 2**10))
    assert (point.mu, point.pair, point.transition) == (2, 2, Transition.REAL_PAIR_APPEARS)
    assert point.y0 == pytest.approx(0, abs=1e-6)
    assert not point.special


def test_two_points_on_a_fiber() -> None:
    """Test the exact split of multiplicity 7 into A4 and A1."""
    points = _classify(NODE_AND_A4, 7, Fraction(1, 2**10))
    assert [(p.mu, p.pair, p.transition) for p in points] == [
        (4, 1, Transition.REAL_PAIR_APPEARS),
        (1, 3, Transition.REAL_TO_REAL),
    ]
    assert [p.y0.real for p in points] == pytest.approx([3, 0], abs=1e-6)


def test_improper_node_is_marked() -> None:
    """Test that the point at y = 0 of the improper fiber is the node."""
    locus = _singular_locus(NODE_AND_A4, ORIGIN, 7, special=True)
    assert locus.mus == (4, 1)
    assert locus.node == 1
    with pytest.raises(HypothesisError, match="not a node"):
        _singular_locus(CUSP, ORIGIN, 3, special=True)


def test_triple_point_is_refused() -> None:
    """Test that a fiber with a triple root is outside the model."""
    with pytest.raises(HypothesisError, match="multiplicity 3"):
        _singular_locus(bipoly((Y**3 - X**2) * (Y - 1)), ORIGIN, 4, special=False)


def test_nonreal_double_points_are_refused() -> None:
    """Test that conjugate double points over a real fiber are refused."""
    with pytest.raises(HypothesisError, match="non-real"):
        _singular_locus(bipoly((Y**2 + 1) ** 2 - X**2), ORIGIN, 2, special=False)


def test_window_crossed_by_a_root() -> None:
    """Test that a neighbourhood too wide for the local model is not certified."""
    with pytest.raises(CertificationError):
        _classify(CUSP, 3, Fraction(1))


@pytest.mark.slow
def test_nonreal_types() -> None:
    """Test the types over x = +-i, a node and a cusp on the same fiber."""
    f = bipoly((Y**2 - (X**2 + 1) ** 2) * ((Y - 3) ** 2 - (X**2 + 1) ** 3))
    assert _nonreal_types(f, ratpoly(X**2 + 1), 5) == (1, 2)


def test_describe_nonreal() -> None:
    """Test one label per conjugate pair of non-real fibers."""
    nonreal = (NonrealFiber(2, (1,)), NonrealFiber(5, (1, 2)))
    assert describe_nonreal(nonreal) == ["A1", "A1+A2"]
    assert nonreal[1].label == "A1+A2"
