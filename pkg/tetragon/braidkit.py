"""Braids on four strands acting on the free group <a1, a2, a3, a4>.

Group actions are right actions: ``a ^ (b c) = (a ^ b) ^ c``. A free word is a
tuple of nonzero integers, ``i`` for the generator ``a_i`` and ``-i`` for its
inverse. A braid is a word in ``s1, s2, s3`` stored the same way.
"""

from __future__ import annotations

import itertools
import logging
import re
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from typing import Protocol

_LOGGER = logging.getLogger(__name__)

STRANDS = 4

FreeWord = tuple[int, ...]

_BRAID_TOKEN = re.compile(r"^s([1-3])(?:\^(-?\d+))?$")
_WORD_TOKEN = re.compile(r"^a(\d+)(?:\^(-?\d+))?$")


def reduce_word(letters: Iterable[int]) -> FreeWord:
    """Freely reduce a word."""
    out: list[int] = []
    for letter in letters:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def invert(word: FreeWord) -> FreeWord:
    """Inverse of a word."""
    return tuple(-letter for letter in reversed(word))


def power(word: FreeWord, k: int) -> FreeWord:
    """k-th power of a word, negative k allowed."""
    base = word if k >= 0 else invert(word)
    return reduce_word(base * abs(k))


def multiply(*words: FreeWord) -> FreeWord:
    """Reduced product of words."""
    return reduce_word(itertools.chain.from_iterable(words))


def conjugate(word: FreeWord, by: FreeWord) -> FreeWord:
    """The conjugate by^-1 word by."""
    return multiply(invert(by), word, by)


def generator(i: int) -> FreeWord:
    """The word a_i."""
    return (i,)


def format_word(word: FreeWord) -> str:
    """Serialize a free word as ``a1 a2^-1``; the empty word is ``1``."""
    if not word:
        return "1"
    tokens = []
    for letter, group in itertools.groupby(word):
        count = len(list(group))
        exponent = count if letter > 0 else -count
        name = f"a{abs(letter)}"
        tokens.append(name if exponent == 1 else f"{name}^{exponent}")
    return " ".join(tokens)


def parse_word(text: str) -> FreeWord:
    """Parse a free word written as ``a1 a2^-1``."""
    letters: list[int] = []
    for token in text.split():
        if token == "1":
            continue
        match = _WORD_TOKEN.match(token)
        if match is None:
            raise ValueError(f"invalid free word token {token!r}")
        index, exponent = int(match.group(1)), int(match.group(2) or 1)
        if index < 1:
            raise ValueError(f"invalid generator index in {token!r}")
        letters.extend([index if exponent > 0 else -index] * abs(exponent))
    return reduce_word(letters)


def exponent_sum(word: FreeWord) -> int:
    """Total exponent of a word."""
    return sum(1 if letter > 0 else -1 for letter in word)


@dataclass(frozen=True)
class Braid:
    """A word in the Artin generators s1, s2, s3."""

    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        """Validate generator indices."""
        for letter in self.letters:
            if letter == 0 or abs(letter) >= STRANDS:
                raise ValueError(f"invalid braid generator {letter}")

    @classmethod
    def sigma(cls, i: int, exponent: int = 1) -> Braid:
        """The braid s_i^exponent."""
        return cls((i if exponent > 0 else -i,) * abs(exponent))

    def __mul__(self, other: Braid) -> Braid:
        """Concatenation, applied left to right."""
        return Braid(reduce_word(self.letters + other.letters))

    def __pow__(self, k: int) -> Braid:
        """Integer power."""
        return Braid(power(self.letters, k))

    def inverse(self) -> Braid:
        """Inverse braid."""
        return Braid(invert(self.letters))

    def mirror(self) -> Braid:
        """Mirror image: every crossing changes sign."""
        return Braid(tuple(-letter for letter in self.letters))

    @property
    def exponent_sum(self) -> int:
        """Sum of exponents."""
        return exponent_sum(self.letters)

    def permutation(self) -> tuple[int, ...]:
        """Position (0-based) reached by the strand starting at each position."""
        position = list(range(STRANDS))
        for letter in self.letters:
            i = abs(letter) - 1
            for strand, pos in enumerate(position):
                if pos == i:
                    position[strand] = i + 1
                elif pos == i + 1:
                    position[strand] = i
        return tuple(position)

    def __str__(self) -> str:
        """Serialize as ``s1 s2^-1 s3^2``; the trivial braid is ``1``."""
        return format_word(self.letters).replace("a", "s")

    @classmethod
    def parse(cls, text: str) -> Braid:
        """Parse the ``s1 s2^-1`` grammar."""
        letters: list[int] = []
        for token in text.replace("*", " ").split():
            if token == "1":
                continue
            match = _BRAID_TOKEN.match(token)
            if match is None:
                raise ValueError(f"invalid braid token {token!r}")
            index, exponent = int(match.group(1)), int(match.group(2) or 1)
            letters.extend([index if exponent > 0 else -index] * abs(exponent))
        return cls(reduce_word(letters))


IDENTITY = Braid()


@dataclass(frozen=True)
class FreeEndo:
    """An endomorphism of F4 given by the images of a1..a4."""

    images: tuple[FreeWord, ...]

    @classmethod
    def identity(cls) -> FreeEndo:
        """Identity endomorphism."""
        return cls(tuple(generator(i) for i in range(1, STRANDS + 1)))

    def apply(self, word: FreeWord) -> FreeWord:
        """Image of a word."""
        out: list[int] = []
        for letter in word:
            image = self.images[abs(letter) - 1]
            out.extend(image if letter > 0 else invert(image))
        return reduce_word(out)

    def then(self, other: FreeEndo) -> FreeEndo:
        """The composite ``a -> (a ^ self) ^ other``."""
        return FreeEndo(tuple(other.apply(image) for image in self.images))

    def preserves_product(self) -> bool:
        """Whether a1 a2 a3 a4 is fixed."""
        total = tuple(range(1, STRANDS + 1))
        return self.apply(total) == total


def _sigma_images(letter: int) -> tuple[FreeWord, ...]:
    i = abs(letter)
    images = [generator(k) for k in range(1, STRANDS + 1)]
    if letter > 0:
        images[i - 1] = (i, i + 1, -i)
        images[i] = (i,)
    else:
        images[i - 1] = (i + 1,)
        images[i] = (-(i + 1), i, i + 1)
    return tuple(images)


def braid_to_endo(b: Braid) -> FreeEndo:
    """The automorphism of F4 induced by a braid (right action)."""
    images = FreeEndo.identity().images
    for letter in reversed(b.letters):
        current = FreeEndo(images)
        images = tuple(current.apply(word) for word in _sigma_images(letter))
    return FreeEndo(images)


def braids_equal(a: Braid, b: Braid) -> bool:
    """Equality in B4, decided through the faithful action on F4."""
    return a == b or braid_to_endo(a) == braid_to_endo(b)


def garside_delta(d: int = 1) -> Braid:
    """The Garside element s1 s2 s3 s1 s2 s1, raised to ``d``."""
    return Braid((1, 2, 3, 1, 2, 1)) ** d


def tau() -> Braid:
    """The braid s2^-1 s3 s1^-1 s2 rotating four imaginary branches."""
    return Braid((-2, 3, -1, 2))


def is_conjugate_to(b: Braid, target: Braid, max_length: int = 4) -> Braid | None:
    """Search a short conjugator c with c^-1 b c equal to ``target``."""
    if b.exponent_sum != target.exponent_sum:
        return None
    if sorted(_cycle_type(b.permutation())) != sorted(_cycle_type(target.permutation())):
        return None
    goal = braid_to_endo(target)
    letters = (1, -1, 2, -2, 3, -3)
    for length in range(max_length + 1):
        for word in itertools.product(letters, repeat=length):
            c = Braid(reduce_word(word))
            if len(c.letters) != length:
                continue
            if braid_to_endo(c.inverse() * b * c) == goal:
                return c
    return None


def _cycle_type(perm: Sequence[int]) -> list[int]:
    seen: set[int] = set()
    lengths = []
    for start in range(len(perm)):
        if start in seen:
            continue
        length, k = 0, start
        while k not in seen:
            seen.add(k)
            k = perm[k]
            length += 1
        lengths.append(length)
    return lengths


class Transition(str, Enum):
    """How the merging pair changes realness across a singular point."""

    REAL_TO_REAL = "real-to-real"
    REAL_PAIR_APPEARS = "real-pair-appears"
    REAL_PAIR_VANISHES = "real-pair-vanishes"
    CONJUGATE_MERGE = "conjugate-pair-merge"


class PointLike(Protocol):
    """A singular point of a fiber, as produced by the fiber scan."""

    mu: int
    pair: int
    transition: Transition


# Exponent of s_j in the semicircle braid, keyed by (parity of mu, transition)
BETA_TABLE: dict[tuple[int, Transition], Callable[[int], int]] = {
    (1, Transition.REAL_TO_REAL): lambda mu: -(mu + 1) // 2,
    (1, Transition.CONJUGATE_MERGE): lambda mu: -(mu + 1) // 2,
    (0, Transition.REAL_PAIR_APPEARS): lambda mu: -(mu // 2),
    (0, Transition.REAL_PAIR_VANISHES): lambda mu: -(mu // 2) - 1,
}


def beta_lambda_for(
    points: Sequence[PointLike],
    table: dict[tuple[int, Transition], Callable[[int], int]] | None = None,
) -> tuple[Braid, Braid]:
    """Semicircle braid and local monodromy of a singular fiber."""
    table = BETA_TABLE if table is None else table
    if not 1 <= len(points) <= 2:
        raise ValueError(f"a fiber carries one or two singular points, got {len(points)}")
    pairs = [point.pair for point in points]
    if any(not 1 <= j < STRANDS for j in pairs):
        raise ValueError(f"merging pair out of range: {pairs}")
    if len(points) == 2 and sorted(pairs) != [1, 3]:
        raise ValueError(f"two points must merge pairs (1,2) and (3,4), got {pairs}")
    beta, lam = IDENTITY, IDENTITY
    for point in sorted(points, key=lambda pt: pt.pair):
        key = (point.mu % 2, point.transition)
        if key not in table:
            raise ValueError(f"transition {point.transition.value} impossible for A{point.mu}")
        beta = beta * Braid.sigma(point.pair, table[key](point.mu))
        lam = lam * Braid.sigma(point.pair, point.mu + 1)
    return beta, lam


# Monodromy of a 2-real segment moving the imaginary pair between position zones:
# zone 0 means the pair sits at (1,2), zone 1 at (2,3), zone 2 at (3,4).
ZONE_STEPS: dict[tuple[int, int], Braid] = {
    (0, 1): Braid((-2, 1)),
    (1, 2): Braid((-3, 2)),
    (1, 0): Braid((-1, 2)),
    (2, 1): Braid((-2, 3)),
}


def zone_path(start: int, end: int) -> tuple[tuple[int, int], ...]:
    """Elementary zone moves from ``start`` to ``end``."""
    step = 1 if end > start else -1
    return tuple((z, z + step) for z in range(start, end, step))


class SegmentLike(Protocol):
    """Segment data as produced by the fiber scan."""

    real_count: int
    crossings: tuple[tuple[int, int], ...]
    twist: int


def gamma_for(segment: SegmentLike) -> Braid:
    """Monodromy along a real segment free of singular fibers."""
    if segment.real_count == 4:
        return IDENTITY
    if segment.real_count == 2:
        braid = IDENTITY
        for step in segment.crossings:
            braid = braid * ZONE_STEPS[step]
        return braid
    if segment.real_count == 0:
        return tau() ** segment.twist
    raise ValueError(f"invalid real branch count {segment.real_count}")


def slope_for(pair: int | None) -> FreeWord:
    """Slope a_j a_(j+1) of the node on pair (j, j+1); trivial for a proper fiber."""
    if pair is None:
        return ()
    if not 1 <= pair < STRANDS:
        raise ValueError(f"node pair out of range: {pair}")
    return (pair, pair + 1)


def bracket_relator(a: FreeWord, b: FreeWord, k: int) -> FreeWord:
    """The relator {a, b}_k, expressing that a and b satisfy a braid relation of length k."""
    if k < 0:
        raise ValueError("bracket length must be nonnegative")
    half, odd = divmod(k, 2)
    ab = multiply(a, b)
    if not odd:
        return multiply(power(ab, half), power(multiply(b, a), -half))
    return multiply(power(ab, half), a, power(ab, -half), invert(b))


@dataclass(frozen=True)
class TwistedMonodromy:
    """A braid followed by conjugation by the slope: a -> k^-1 (a ^ braid) k."""

    braid: Braid
    slope: FreeWord = ()

    def endo(self) -> FreeEndo:
        """The induced endomorphism of F4."""
        base = braid_to_endo(self.braid)
        return FreeEndo(tuple(conjugate(image, self.slope) for image in base.images))

    def pure_power(self) -> tuple[int, int] | None:
        """(r, p) if the monodromy is exactly s_r^p with trivial slope."""
        if self.slope or not self.braid.letters:
            return None
        gens = {abs(letter) for letter in self.braid.letters}
        if len(gens) != 1:
            return None
        return gens.pop(), self.braid.exponent_sum


def describe(braids: Iterable[tuple[str, Braid]]) -> str:
    """One braid per line, ``name = word``."""
    return "\n".join(f"{name} = {braid}" for name, braid in braids)
