"""Fixtures for tetragon tests."""

import random
from pathlib import Path

import pytest

from tetragon.braidkit import IDENTITY, Braid, bracket_relator, garside_delta
from tetragon.const import COMPLETE
from tetragon.curvespec import CurveSpec, parse
from tetragon.vankampen import Assembly, FiberRelation, Presentation

CORPUS = Path(__file__).parent.parent / "tetragon" / "corpus"

SMALL_SPEC = """\
# a smooth quartic fiberwise
name: small
model: tetragonal
equation: y^4 - 5*y^2 + 4 + x
hirzebruch_degree: 1
expect.order: 6
"""


RANDOM_SEED = 20


@pytest.fixture
def rng() -> random.Random:
    """A seeded random source, fresh for each test."""
    return random.Random(RANDOM_SEED)


@pytest.fixture
def corpus() -> Path:
    """Directory of the bundled curve specs."""
    return CORPUS


@pytest.fixture
def small_spec() -> CurveSpec:
    """A minimal tetragonal spec."""
    return parse(SMALL_SPEC)


@pytest.fixture
def small_spec_file(tmp_path: Path) -> Path:
    """The minimal spec written to disk."""
    path = tmp_path / "small.curve"
    path.write_text(SMALL_SPEC, encoding="utf-8")
    return path


@pytest.fixture
def trefoil() -> Presentation:
    """<a, b | aba = bab>."""
    return Presentation(2, (bracket_relator((1,), (2,), 3),))


@pytest.fixture
def modular() -> Presentation:
    """The braid group on three strands modulo its center: C2*C3."""
    return Presentation(2, (bracket_relator((1,), (2,), 3), (1, 2) * 3))


@pytest.fixture
def bare_assembly() -> Assembly:
    """Assembly of a curve without real singular fibers."""
    return Assembly(
        gammas=(IDENTITY,),
        fibers=(),
        chain=(),
        chain_infinity=garside_delta(2),
        d=2,
        completeness=COMPLETE,
    )


@pytest.fixture
def one_fiber_assembly() -> Assembly:
    """Assembly with a single proper fiber carrying an A1 point on the middle pair."""
    beta = Braid.sigma(2, -1)
    fiber = FiberRelation(
        beta=beta, lam=Braid.sigma(2, 2), slope=(), points=((2, 1),), label="A1"
    )
    return Assembly(
        gammas=(IDENTITY, IDENTITY),
        fibers=(fiber,),
        chain=(beta,),
        chain_infinity=beta * garside_delta(1),
        d=1,
        completeness=COMPLETE,
    )
