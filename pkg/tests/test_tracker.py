"""Tests for certified strand tracking."""

from fractions import Fraction
from types import SimpleNamespace
from unittest.mock import patch

import pytest

from tetragon.braidkit import (
    BETA_TABLE,
    IDENTITY,
    Braid,
    Transition,
    beta_lambda_for,
    braids_equal,
)
from tetragon.exactpoly import X, Y, bipoly
from tetragon.exceptions import CertificationError
from tetragon.fiberscan import FiberPoint
from tetragon.tracker import (
    Disk,
    TrackedPath,
    ValidationEntry,
    ValidationReport,
    arc_at_infinity,
    cross_validate,
    format_log,
    loop,
    real_segment,
    semicircle,
    track,
)

EPS = Fraction(1, 4)


def test_semicircle_endpoints() -> None:
    """Test that the polygon runs over the upper half circle."""
    points = semicircle(Fraction(1), EPS)
    assert points[0] == (Fraction(3, 4), Fraction(0))
    assert points[-1] == (Fraction(5, 4), Fraction(0))
    for re, im in points:
        assert (re - 1) ** 2 + im**2 == EPS**2
        assert im >= 0


def test_loop_is_closed() -> None:
    """Test that the loop starts and ends at center + eps."""
    points = loop(Fraction(0), EPS)
    assert points[0] == points[-1] == (EPS, Fraction(0))
    assert any(im < 0 for _, im in points)


def test_arc_at_infinity() -> None:
    """Test that the arc runs from +R to -R."""
    points = arc_at_infinity(Fraction(10))
    assert points[0] == (Fraction(10), Fraction(0))
    assert points[-1] == (Fraction(-10), Fraction(0))


def test_disk() -> None:
    """Test containment and intersection of disks."""
    disk = Disk((Fraction(0), Fraction(0)), Fraction(1))
    assert disk.contains((Fraction(1), Fraction(0)))
    assert not disk.contains((Fraction(1), Fraction(1)))
    assert disk.meets(Disk((Fraction(2), Fraction(0)), Fraction(1)))
    assert not disk.meets(Disk((Fraction(3), Fraction(0)), Fraction(1)))


def test_track_parallel_strands() -> None:
    """Test that translated real branches give the trivial braid."""
    f = bipoly((Y - X) * (Y - 1 - X) * (Y - 2 - X) * (Y - 3 - X))
    path = track(f, real_segment(Fraction(0), Fraction(1)), label="shift")
    assert braids_equal(path.braid, IDENTITY)
    assert path.steps
    assert all(step.max_radius > 0 for step in path.steps)


def test_track_around_node() -> None:
    """Test that a loop around a node between the middle branches is a full twist."""
    f = bipoly((Y**2 - X**2) * (Y**2 - 100))
    path = track(f, loop(Fraction(0), EPS), label="node")
    assert braids_equal(path.braid, Braid.sigma(2, 2))


def test_track_around_fold() -> None:
    """Test that a loop around a simple tangency is a half twist."""
    f = bipoly((Y**2 - X) * (Y**2 - 100))
    path = track(f, loop(Fraction(0), EPS), label="fold")
    assert braids_equal(path.braid, Braid.sigma(2, 1))


def test_track_needs_real_endpoints() -> None:
    """Test that a path must start on the real axis."""
    f = bipoly((Y**2 - 1) * (Y**2 - 4))
    with pytest.raises(CertificationError):
        track(f, [(Fraction(0), Fraction(1)), (Fraction(1), Fraction(0))])


def test_format_log() -> None:
    """Test one header line per path and one line per step."""
    f = bipoly((Y - X) * (Y - 1 - X) * (Y - 2 - X) * (Y - 3 - X))
    path = track(f, real_segment(Fraction(0), Fraction(1)), label="gamma_0")
    lines = format_log([path]).splitlines()
    assert lines[0].startswith("# gamma_0:")
    assert len(lines) == len(path.steps) + 1
    assert all(line.startswith("gamma_0 edge=") for line in lines[1:])


def test_validation_report() -> None:
    """Test that mismatches are collected, not raised."""
    report = ValidationReport(
        entries=[
            ValidationEntry("beta_1", Braid((1, 2, 1)), Braid((2, 1, 2)), 3),
            ValidationEntry("lambda_1", Braid.sigma(1, 2), Braid.sigma(1, 1), 5),
        ],
        paths=[TrackedPath("beta_1", [])],
    )
    assert not report.ok
    assert [entry.name for entry in report.mismatches] == ["lambda_1"]


# Real branches kept away from a local pair at y = 0, by pair position counted from the right
FAR_BRANCHES = {1: (-10, -20), 2: (10, -10), 3: (20, 10)}


def _local_model(mu: int, pair: int, side: int):
    """y^2 = side * x^(mu+1) on the given pair, two constant real branches elsewhere."""
    a, b = FAR_BRANCHES[pair]
    return bipoly((Y**2 - side * X ** (mu + 1)) * (Y - a) * (Y - b))


def _transition(mu: int, side: int) -> Transition:
    if mu % 2:
        return Transition.REAL_TO_REAL if side > 0 else Transition.CONJUGATE_MERGE
    return Transition.REAL_PAIR_APPEARS if side > 0 else Transition.REAL_PAIR_VANISHES


def _upper(center: Fraction = Fraction(0)) -> list:
    return list(reversed(semicircle(center, EPS)))


def _lower(center: Fraction = Fraction(0)) -> list:
    return [(re, -im) for re, im in semicircle(center, EPS)]


@pytest.mark.slow
@pytest.mark.parametrize("side", [1, -1])
@pytest.mark.parametrize("pair", [1, 2, 3])
@pytest.mark.parametrize("mu", range(9))
def test_local_models(mu: int, pair: int, side: int) -> None:
    """Test semicircle and loop braids of every A_mu model against the combinatorial table."""
    f = _local_model(mu, pair, side)
    point = SimpleNamespace(mu=mu, pair=pair, transition=_transition(mu, side))
    beta, lam = beta_lambda_for([point])
    assert braids_equal(track(f, semicircle(Fraction(0), EPS)).braid, beta)
    assert braids_equal(track(f, loop(Fraction(0), EPS)).braid, lam)
    assert braids_equal(lam, Braid.sigma(pair, mu + 1))


@pytest.mark.parametrize(("mu", "pair"), [(2, 2), (3, 1), (4, 3)])
def test_tracked_braids_compose(mu: int, pair: int) -> None:
    """Test that the loop braid is the product of its two halves."""
    f = _local_model(mu, pair, 1)
    upper = track(f, _upper(), label="upper").braid
    lower = track(f, _lower(), label="lower").braid
    assert braids_equal(upper * lower, track(f, loop(Fraction(0), EPS)).braid)
    # a path run backwards gives the inverse braid
    forward = track(f, semicircle(Fraction(0), EPS)).braid
    assert braids_equal(forward * upper, IDENTITY)


@pytest.mark.parametrize(("mu", "pair"), [(1, 2), (3, 1), (5, 3)])
def test_conjugate_path_mirrors_braid(mu: int, pair: int) -> None:
    """Test that the complex conjugate path gives the mirror braid on a real curve."""
    f = _local_model(mu, pair, 1)
    upper = track(f, semicircle(Fraction(0), EPS)).braid
    lower = track(f, _lower()).braid
    assert braids_equal(lower, upper.mirror())
    assert not braids_equal(lower, upper)


def _names(report: ValidationReport) -> set[str]:
    return {entry.name for entry in report.mismatches}


def test_corrupted_beta_entry_is_reported() -> None:
    """Test that a wrong semicircle exponent shows up as exactly one mismatch."""
    f = _local_model(2, 2, 1)
    event = SimpleNamespace(
        center=Fraction(0),
        epsilon=EPS,
        points=(FiberPoint(2, 2, Transition.REAL_PAIR_APPEARS),),
    )
    diagram = SimpleNamespace(f=f, segments=(), events=(event,), d=2, radius=Fraction(30))
    clean = cross_validate(diagram)
    assert "beta_1" not in _names(clean)
    assert "lambda_1" not in _names(clean)
    key = (0, Transition.REAL_PAIR_APPEARS)
    table = dict(BETA_TABLE)
    table[key] = lambda mu: BETA_TABLE[key](mu) - 1
    corrupted = cross_validate(diagram, table)
    assert _names(corrupted) - _names(clean) == {"beta_1"}
    assert _names(clean) - _names(corrupted) == set()


def test_corrupted_zone_step_is_reported() -> None:
    """Test that a wrong zone move shows up as exactly one mismatch."""
    # the imaginary pair y = -x +- i passes the real branch y = -1
    f = bipoly(((Y + X) ** 2 + 1) * (Y + 1) * (Y + 4))
    segment = SimpleNamespace(
        index=0, start=Fraction(0), end=Fraction(2), real_count=2, crossings=((0, 1),), twist=0
    )
    diagram = SimpleNamespace(f=f, segments=(segment,), events=(), d=1, radius=Fraction(10))
    clean = cross_validate(diagram)
    assert "gamma_0" not in _names(clean)
    with patch.dict("tetragon.braidkit.ZONE_STEPS", {(0, 1): Braid((-2, 1, 3))}):
        corrupted = cross_validate(diagram)
    assert _names(corrupted) - _names(clean) == {"gamma_0"}
    assert _names(clean) - _names(corrupted) == set()
