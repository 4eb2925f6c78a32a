"""Tests for braids and their action on the free group."""

import random
from fractions import Fraction
from types import SimpleNamespace

import pytest

from tetragon.braidkit import (
    IDENTITY,
    ZONE_STEPS,
    Braid,
    FreeEndo,
    Transition,
    TwistedMonodromy,
    beta_lambda_for,
    braid_to_endo,
    braids_equal,
    bracket_relator,
    conjugate,
    describe,
    format_word,
    gamma_for,
    garside_delta,
    is_conjugate_to,
    parse_word,
    slope_for,
    tau,
    zone_path,
)
from tetragon.fiberscan import FiberPoint, SegmentProfile

PRODUCT = (1, 2, 3, 4)


def test_sigma_one_images() -> None:
    """Test the action of s1 on the generators."""
    assert braid_to_endo(Braid.sigma(1)).images == ((1, 2, -1), (1,), (3,), (4,))


def test_sigma_inverse_is_inverse() -> None:
    """Test that s1 s1^-1 acts trivially."""
    endo = braid_to_endo(Braid.sigma(1)).then(braid_to_endo(Braid.sigma(1, -1)))
    assert endo == FreeEndo.identity()


def test_right_action() -> None:
    """Test that the action of a product is the composite in chain order."""
    first = Braid.parse("s1 s2^-1")
    second = Braid.parse("s3 s2^2")
    assert braid_to_endo(first * second) == braid_to_endo(first).then(braid_to_endo(second))


def test_braid_relations() -> None:
    """Test the Artin relations through the free group action."""
    assert braids_equal(Braid((1, 2, 1)), Braid((2, 1, 2)))
    assert braids_equal(Braid((1, 3)), Braid((3, 1)))
    assert not braids_equal(Braid((1, 2)), Braid((2, 1)))


def test_every_braid_preserves_product() -> None:
    """Test that a1 a2 a3 a4 is fixed by every braid."""
    assert braid_to_endo(Braid.parse("s1 s2^-3 s3 s1^2")).preserves_product()
    assert braid_to_endo(tau()).preserves_product()


def _random_braid(rng: random.Random, max_length: int) -> Braid:
    length = rng.randint(0, max_length)
    return Braid(tuple(rng.choice((1, 2, 3)) * rng.choice((1, -1)) for _ in range(length)))


@pytest.mark.slow
def test_random_braids_preserve_product(rng: random.Random) -> None:
    """Test the product a1 a2 a3 a4 under a thousand random words of length at most 30."""
    for _ in range(1000):
        assert braid_to_endo(_random_braid(rng, 30)).preserves_product()


def test_action_is_a_homomorphism(rng: random.Random) -> None:
    """Test that products act as composites on random pairs."""
    for _ in range(50):
        first, second = _random_braid(rng, 8), _random_braid(rng, 8)
        composite = braid_to_endo(first).then(braid_to_endo(second))
        assert braid_to_endo(first * second) == composite


def test_full_twist_is_central() -> None:
    """Test that the square of the Garside element commutes with generators."""
    delta2 = garside_delta(2)
    for i in (1, 2, 3):
        assert braids_equal(delta2 * Braid.sigma(i), Braid.sigma(i) * delta2)


def test_full_twist_conjugates_by_product() -> None:
    """Test that the full twist acts as conjugation by a1 a2 a3 a4."""
    images = braid_to_endo(garside_delta(2)).images
    by_product = tuple(conjugate((j,), PRODUCT) for j in range(1, 5))
    by_inverse = tuple(conjugate((j,), tuple(-k for k in reversed(PRODUCT))) for j in range(1, 5))
    assert images in (by_product, by_inverse)


def test_permutation() -> None:
    """Test the strand permutation of s1."""
    assert Braid.sigma(1).permutation() == (1, 0, 2, 3)
    assert garside_delta(2).permutation() == (0, 1, 2, 3)


def test_braid_text() -> None:
    """Test the braid grammar."""
    braid = Braid.parse("s1 s2^-1 s3^2")
    assert braid.letters == (1, -2, 3, 3)
    assert str(braid) == "s1 s2^-1 s3^2"
    assert str(IDENTITY) == "1"
    with pytest.raises(ValueError):
        Braid.parse("s4")


def test_word_text() -> None:
    """Test the free word grammar."""
    assert parse_word("a2 a4^-1 a4 a1^2") == (2, 1, 1)
    assert format_word((2, 1, 1)) == "a2 a1^2"
    with pytest.raises(ValueError):
        parse_word("b1")


@pytest.mark.parametrize(
    ("k", "expected"),
    [
        (0, ()),
        (1, (1, -2)),
        (2, (1, 2, -1, -2)),
        (3, (1, 2, 1, -2, -1, -2)),
    ],
)
def test_bracket_relator(k: int, expected: tuple[int, ...]) -> None:
    """Test the words {a, b}_k."""
    assert bracket_relator((1,), (2,), k) == expected


def test_bracket_relator_negative() -> None:
    """Test that a negative length is refused."""
    with pytest.raises(ValueError):
        bracket_relator((1,), (2,), -1)


def test_beta_lambda_for_node() -> None:
    """Test a node between real branches."""
    point = FiberPoint(mu=1, pair=2, transition=Transition.REAL_TO_REAL)
    beta, lam = beta_lambda_for([point])
    assert beta == Braid.sigma(2, -1)
    assert lam == Braid.sigma(2, 2)


@pytest.mark.parametrize(
    ("mu", "transition", "exponent"),
    [
        (0, Transition.REAL_PAIR_APPEARS, 0),
        (0, Transition.REAL_PAIR_VANISHES, -1),
        (2, Transition.REAL_PAIR_APPEARS, -1),
        (2, Transition.REAL_PAIR_VANISHES, -2),
        (5, Transition.CONJUGATE_MERGE, -3),
    ],
)
def test_beta_exponents(mu: int, transition: Transition, exponent: int) -> None:
    """Test the semicircle braid exponent for each kind of point."""
    beta, lam = beta_lambda_for([FiberPoint(mu=mu, pair=1, transition=transition)])
    assert beta == Braid.sigma(1, exponent)
    assert lam == Braid.sigma(1, mu + 1)


def test_beta_lambda_for_two_points() -> None:
    """Test a fiber with points on both outer pairs."""
    points = [
        FiberPoint(mu=2, pair=3, transition=Transition.REAL_PAIR_APPEARS),
        FiberPoint(mu=1, pair=1, transition=Transition.REAL_TO_REAL),
    ]
    beta, lam = beta_lambda_for(points)
    assert beta == Braid.sigma(1, -1) * Braid.sigma(3, -1)
    assert lam == Braid.sigma(1, 2) * Braid.sigma(3, 3)


def test_beta_lambda_for_rejects_bad_input() -> None:
    """Test overlapping pairs and impossible transitions."""
    with pytest.raises(ValueError):
        beta_lambda_for(
            [
                FiberPoint(mu=1, pair=1, transition=Transition.REAL_TO_REAL),
                FiberPoint(mu=1, pair=2, transition=Transition.REAL_TO_REAL),
            ]
        )
    with pytest.raises(ValueError):
        beta_lambda_for([FiberPoint(mu=1, pair=1, transition=Transition.REAL_PAIR_APPEARS)])


def test_zone_steps() -> None:
    """Test that zone moves are inverse to one another."""
    assert zone_path(0, 2) == ((0, 1), (1, 2))
    assert zone_path(2, 0) == ((2, 1), (1, 0))
    assert zone_path(1, 1) == ()
    for (a, b), braid in ZONE_STEPS.items():
        assert braids_equal(braid * ZONE_STEPS[(b, a)], IDENTITY)


@pytest.mark.parametrize(
    ("real_count", "crossings", "twist", "expected"),
    [
        (4, (), 0, IDENTITY),
        (2, ((0, 1), (1, 2)), 0, Braid((-2, 1, -3, 2))),
        (0, (), 2, tau() ** 2),
        (0, (), -1, tau().inverse()),
    ],
)
def test_gamma_for(real_count, crossings, twist, expected: Braid) -> None:
    """Test the monodromy along segments free of singular fibers."""
    segment = SimpleNamespace(real_count=real_count, crossings=crossings, twist=twist)
    assert braids_equal(gamma_for(segment), expected)


def test_gamma_for_untwisted_profile() -> None:
    """Test that a profile without certificate has no twist."""
    segment = SegmentProfile(0, Fraction(0), Fraction(1), 0)
    assert segment.twist == 0
    assert gamma_for(segment) == IDENTITY


def test_slope_for() -> None:
    """Test slopes of improper nodes."""
    assert slope_for(None) == ()
    assert slope_for(3) == (3, 4)
    with pytest.raises(ValueError):
        slope_for(4)


def test_pure_power() -> None:
    """Test detection of generator powers."""
    assert TwistedMonodromy(Braid.sigma(2, 3)).pure_power() == (2, 3)
    assert TwistedMonodromy(Braid.sigma(2, 3), (1, 2)).pure_power() is None
    assert TwistedMonodromy(Braid((1, 3))).pure_power() is None


def test_twisted_endo_conjugates_by_slope() -> None:
    """Test that the slope conjugates every image."""
    endo = TwistedMonodromy(IDENTITY, (1, 2)).endo()
    assert endo.images[2] == (-2, -1, 3, 1, 2)


def test_is_conjugate_to() -> None:
    """Test the search of a short conjugator."""
    c = is_conjugate_to(Braid.sigma(2), Braid.sigma(1))
    assert c is not None
    assert braids_equal(c.inverse() * Braid.sigma(2) * c, Braid.sigma(1))
    assert is_conjugate_to(Braid.sigma(2), Braid.sigma(1, 2)) is None


def test_describe() -> None:
    """Test the braid listing format."""
    assert describe([("gamma_0", IDENTITY), ("beta_1", Braid.sigma(2, -1))]) == (
        "gamma_0 = 1\nbeta_1 = s2^-1"
    )
