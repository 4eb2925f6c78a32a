"""Certified tracking of the four branches along polygonal paths in the x-plane.

Each step covers a window of a path edge by a Taylor expansion around the
window midpoint. Approximate roots come from mpmath; the inclusion disks
around them are certified with exact rational arithmetic, so the braid read
off the disk centers is the braid of the true branches.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath.libmp import to_rational as mpf_to_rational

from .braidkit import (
    BETA_TABLE,
    Braid,
    beta_lambda_for,
    braids_equal,
    gamma_for,
    garside_delta,
    reduce_word,
)
from .const import (
    DEFAULT_DPS,
    INITIAL_STEPS,
    MAX_DPS,
    ORDER_EPS,
    ORDER_MAX_REFINE,
    POLYGON_SIDES,
    SEPARATION_FACTOR,
    STEP_FLOOR,
)
from .exactpoly import BiPoly, coefficients, round_up, sign, sqrt_lower, sqrt_upper, y_coefficients
from .exceptions import CertificationError, HypothesisError
from .fiberscan import Branch, CurveDiagram, canonical_order

_LOGGER = logging.getLogger(__name__)

Complex = tuple[Fraction, Fraction]

STRANDS = 4
PRECISION_THRESHOLD = Fraction(1, 2**12)
ZERO = Fraction(0)


def _add(a: Complex, b: Complex) -> Complex:
    return a[0] + b[0], a[1] + b[1]


def _sub(a: Complex, b: Complex) -> Complex:
    return a[0] - b[0], a[1] - b[1]


def _mul(a: Complex, b: Complex) -> Complex:
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


def _scale(a: Complex, s: Fraction) -> Complex:
    return a[0] * s, a[1] * s


def _abs2(a: Complex) -> Fraction:
    return a[0] * a[0] + a[1] * a[1]


def _lexsign(d: Fraction, e: Fraction) -> int:
    return sign(d) if d != 0 else sign(e)


def _to_mp(a: Complex) -> mpmath.mpc:
    return mpmath.mpc(
        mpmath.mpf(a[0].numerator) / a[0].denominator,
        mpmath.mpf(a[1].numerator) / a[1].denominator,
    )


def _from_mp(z: mpmath.mpc) -> Complex:
    z = mpmath.mpc(z)
    re, im = (mpf_to_rational(part._mpf_) for part in (z.real, z.imag))
    return Fraction(*re), Fraction(*im)


def semicircle(center: Fraction, eps: Fraction, sides: int = POLYGON_SIDES) -> list[Complex]:
    """Rational polygon on the upper half circle, from center - eps to center + eps."""
    points = []
    for k in range(sides + 1):
        u = Fraction(-1) + Fraction(2 * k, sides)
        den = 1 + u * u
        points.append((center + eps * 2 * u / den, eps * (1 - u * u) / den))
    return points


def loop(center: Fraction, eps: Fraction, sides: int = POLYGON_SIDES) -> list[Complex]:
    """Counterclockwise rational polygon on the circle, from center + eps back to itself."""
    upper = semicircle(center, eps, sides)
    lower = [(re, -im) for re, im in upper]
    return list(reversed(upper)) + lower[1:]


def arc_at_infinity(radius: Fraction, sides: int = POLYGON_SIDES) -> list[Complex]:
    """Upper half circle of the given radius, from radius to -radius."""
    return list(reversed(semicircle(ZERO, radius, sides)))


def real_segment(start: Fraction, end: Fraction) -> list[Complex]:
    """Straight path between two real abscissas."""
    return [(start, ZERO), (end, ZERO)]


@dataclass(frozen=True)
class Disk:
    """A certified inclusion disk for one branch."""

    center: Complex
    radius: Fraction

    def contains(self, point: Complex) -> bool:
        """Whether a point lies in the closed disk."""
        return _abs2(_sub(point, self.center)) <= self.radius * self.radius

    def meets(self, other: Disk) -> bool:
        """Whether two closed disks intersect."""
        reach = self.radius + other.radius
        return _abs2(_sub(self.center, other.center)) <= reach * reach


@dataclass(frozen=True)
class TrackStep:
    """One certified window of a path edge."""

    edge: int
    t0: Fraction
    t1: Fraction
    dps: int
    disks: tuple[Disk, ...]

    @property
    def max_radius(self) -> Fraction:
        """Largest inclusion radius of the step."""
        return max(disk.radius for disk in self.disks)


@dataclass
class TrackedPath:
    """Result of tracking: steps, model strands and the braid they span."""

    label: str
    vertices: list[Complex]
    steps: list[TrackStep] = field(default_factory=list)
    braid: Braid = field(default_factory=Braid)


class _Fiberwise:
    """Coefficient columns of f(x, y) = sum a_i(x) y^i for Taylor shifts in x."""

    def __init__(self, f: BiPoly) -> None:
        columns = [coefficients(a) for a in y_coefficients(f)]
        if len(columns) != STRANDS + 1:
            raise HypothesisError(f"curve is not tetragonal (y-degree {len(columns) - 1})")
        if len(columns[-1]) != 1:
            raise HypothesisError("curve not proper: leading coefficient depends on x")
        self.columns = columns
        self.lead = abs(columns[-1][0])

    def taylor(self, x: Complex) -> list[list[Complex]]:
        """For each a_i, the coefficients of a_i(x + s) in s."""
        shifted = []
        for column in self.columns:
            b: list[Complex] = [(c, ZERO) for c in column] or [(ZERO, ZERO)]
            n = len(b)
            for i in range(n - 1):
                for j in range(n - 2, i - 1, -1):
                    b[j] = _add(b[j], _mul(x, b[j + 1]))
            shifted.append(b)
        return shifted


def _certify(
    poly: _Fiberwise,
    a: Complex,
    b: Complex,
    t0: Fraction,
    t1: Fraction,
    dps: int,
    warm: list[mpmath.mpc] | None,
) -> list[Disk] | None:
    """Inclusion disks valid for every x in the window, or None if not separated."""
    tm = (t0 + t1) / 2
    direction = _sub(b, a)
    xm = _add(a, _scale(direction, tm))
    delta_bound = sqrt_upper(_abs2(_scale(direction, (t1 - t0) / 2)))
    taylor = poly.taylor(xm)
    values = [column[0] for column in taylor]
    with mpmath.workdps(dps):
        try:
            roots = mpmath.polyroots(
                [_to_mp(v) for v in reversed(values)],
                maxsteps=100,
                extraprec=dps * 2,
                roots_init=warm,
            )
        except mpmath.mp.NoConvergence:
            return None
        centers = [_from_mp(z) for z in roots]
    depth = max(len(column) for column in taylor)
    disks = []
    for k, z in enumerate(centers):
        powers = [(Fraction(1), ZERO)]
        for _ in range(STRANDS):
            powers.append(_mul(powers[-1], z))
        bound = ZERO
        delta_power = Fraction(1)
        for j in range(depth):
            term = (ZERO, ZERO)
            for i, column in enumerate(taylor):
                if j < len(column):
                    term = _add(term, _mul(column[j], powers[i]))
            bound += delta_power * sqrt_upper(_abs2(term))
            delta_power *= delta_bound
        spread = poly.lead
        for l, w in enumerate(centers):
            if l != k:
                spread *= sqrt_lower(_abs2(_sub(z, w)))
        if spread == 0:
            return None
        disks.append(Disk(z, round_up(STRANDS * bound / spread)))
    for d1, d2 in itertools.combinations(disks, 2):
        reach = SEPARATION_FACTOR * (d1.radius + d2.radius)
        if _abs2(_sub(d1.center, d2.center)) <= reach * reach:
            return None
    return disks


def _match_disks(previous: Sequence[Disk], current: Sequence[Disk]) -> list[Disk] | None:
    """Reorder ``current`` so that disk k meets previous disk k, and hulls stay apart."""
    ordered = []
    for disk in previous:
        hits = [other for other in current if disk.meets(other)]
        if len(hits) != 1:
            return None
        ordered.append(hits[0])
    if len({id(disk) for disk in ordered}) != len(current):
        return None
    for k, l in itertools.combinations(range(len(previous)), 2):
        reach = (previous[k].radius + 2 * ordered[k].radius) + (
            previous[l].radius + 2 * ordered[l].radius
        )
        if _abs2(_sub(previous[k].center, previous[l].center)) <= reach * reach:
            return None
    return ordered


def _box_inside(branch: Branch, disk: Disk) -> bool:
    return all(disk.contains(corner) for corner in branch.box.corners())


def _match_fiber(
    f: BiPoly, x: Fraction, disks: Sequence[Disk]
) -> list[tuple[int, Branch]] | None:
    """Canonical position and branch inside each disk, refining the root boxes as needed."""
    eps = ORDER_EPS
    for _ in range(ORDER_MAX_REFINE):
        order = canonical_order(f, x, eps)
        matched = []
        for disk in disks:
            inside = [(pos, br) for pos, br in enumerate(order) if _box_inside(br, disk)]
            if len(inside) != 1:
                break
            matched.append(inside[0])
        else:
            if len({pos for pos, _ in matched}) == len(disks):
                return matched
        eps /= 16
    return None


def _braid_from_model(
    nodes: list[list[Complex]], final_positions: Sequence[int], label: str
) -> Braid:
    """Read the braid of piecewise linear strands projected on the real axis.

    Ties in real parts are broken by imaginary parts, which amounts to
    projecting on a direction slightly turned from the real axis.
    """
    positions = list(range(STRANDS))
    letters: list[int] = []
    for step, (start, end) in enumerate(itertools.pairwise(nodes)):
        events = []
        for k, l in itertools.combinations(range(STRANDS), 2):
            d0, e0 = _sub(start[k], start[l])
            d1, e1 = _sub(end[k], end[l])
            if _lexsign(d0, e0) == _lexsign(d1, e1):
                continue
            if d0 == d1:
                raise CertificationError(f"strands {k} and {l} collide on {label}")
            s = d0 / (d0 - d1)
            e = e0 + s * (e1 - e0)
            if e == 0:
                raise CertificationError(f"strands {k} and {l} collide on {label}")
            events.append((s, -e / (d1 - d0), k, l, e))
        events.sort(key=lambda event: event[:2])
        for first, second in itertools.pairwise(events):
            if first[:2] == second[:2] and {first[2], first[3]} & {second[2], second[3]}:
                raise CertificationError(f"simultaneous crossings at model step {step} of {label}")
        for _, _, k, l, e in events:
            pk, pl = positions[k], positions[l]
            if abs(pk - pl) != 1:
                raise CertificationError(f"non-adjacent crossing at model step {step} of {label}")
            low = min(pk, pl)
            # the strand leaving position low passes above when it has the larger imaginary part
            direction = sign(e) if pk == low else -sign(e)
            letters.append((low + 1) * direction)
            positions[k], positions[l] = pl, pk
    if positions != list(final_positions):
        raise CertificationError(f"strand positions do not match the end fiber of {label}")
    return Braid(reduce_word(letters))


def track(
    f: BiPoly, vertices: Sequence[Complex], dps: int = DEFAULT_DPS, label: str = "path"
) -> TrackedPath:
    """Certify the branches of f along a polygon with real rational endpoints.

    Strand k starts at the k-th branch of the canonical order of the first fiber.
    """
    if vertices[0][1] != 0 or vertices[-1][1] != 0:
        raise CertificationError(f"{label} must start and end on the real axis")
    poly = _Fiberwise(f)
    result = TrackedPath(label, list(vertices))
    previous: list[Disk] | None = None
    start: list[Complex] = []
    for edge, (a, b) in enumerate(itertools.pairwise(vertices)):
        t = ZERO
        width = Fraction(1, INITIAL_STEPS)
        while t < 1:
            t1 = min(t + width, Fraction(1))
            warm = [_to_mp(disk.center) for disk in previous] if previous else None
            disks = _certify(poly, a, b, t, t1, dps, warm)
            ordered = None
            if disks is not None and previous is None:
                matched = _match_fiber(f, vertices[0][0], disks)
                if matched is not None:
                    by_position = sorted(zip(matched, disks, strict=True), key=lambda m: m[0][0])
                    ordered = [disk for _, disk in by_position]
                    start = [branch.point for (_, branch), _ in by_position]
            elif disks is not None:
                ordered = _match_disks(previous, disks)
            if ordered is None:
                width /= 2
                if width < STEP_FLOOR:
                    raise CertificationError(f"step floor reached on {label}", (t, t1))
                if width < PRECISION_THRESHOLD and dps < MAX_DPS:
                    dps = min(2 * dps, MAX_DPS)
                    _LOGGER.debug("Raising precision to %s digits on %s", dps, label)
                continue
            result.steps.append(TrackStep(edge, t, t1, dps, tuple(ordered)))
            previous = ordered
            t = t1
            width = min(2 * width, Fraction(1, INITIAL_STEPS))
    if previous is None:
        raise CertificationError(f"{label} has no edges")
    matched = _match_fiber(f, vertices[-1][0], previous)
    if matched is None:
        raise CertificationError(f"end fiber of {label} could not be matched", (ZERO, Fraction(1)))
    nodes = [start]
    nodes.extend([disk.center for disk in step.disks] for step in result.steps)
    nodes.append([branch.point for _, branch in matched])
    result.braid = _braid_from_model(nodes, [pos for pos, _ in matched], label)
    _LOGGER.debug("Tracked %s in %s steps: %s", label, len(result.steps), result.braid)
    return result


def format_log(paths: Sequence[TrackedPath]) -> str:
    """One line per certified step."""
    lines = []
    for path in paths:
        lines.append(f"# {path.label}: {len(path.steps)} steps, braid {path.braid}")
        for step in path.steps:
            lines.append(
                f"{path.label} edge={step.edge} t=[{float(step.t0):.6g}, {float(step.t1):.6g}]"
                f" dps={step.dps} r<={float(step.max_radius):.3e}"
            )
    return "\n".join(lines)


@dataclass(frozen=True)
class ValidationEntry:
    """Combinatorial and tracked braid of one path."""

    name: str
    expected: Braid
    tracked: Braid
    steps: int

    @property
    def ok(self) -> bool:
        """Whether the braids agree in B4."""
        return braids_equal(self.expected, self.tracked)


@dataclass
class ValidationReport:
    """All comparisons made by ``cross_validate``."""

    entries: list[ValidationEntry] = field(default_factory=list)
    paths: list[TrackedPath] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        """Whether every comparison succeeded."""
        return all(entry.ok for entry in self.entries)

    @property
    def mismatches(self) -> list[ValidationEntry]:
        """Entries whose braids disagree."""
        return [entry for entry in self.entries if not entry.ok]


def cross_validate(
    diagram: CurveDiagram, table=None, dps: int = DEFAULT_DPS
) -> ValidationReport:
    """Track every elementary path of the diagram and compare with the combinatorial braids.

    Mismatches are reported, not raised.
    """
    table = BETA_TABLE if table is None else table
    report = ValidationReport()

    def check(name: str, expected: Braid, vertices: list[Complex]) -> None:
        path = track(diagram.f, vertices, dps, name)
        report.paths.append(path)
        entry = ValidationEntry(name, expected, path.braid, len(path.steps))
        report.entries.append(entry)
        if not entry.ok:
            _LOGGER.warning("%s: expected %s, tracked %s", name, expected, path.braid)

    for segment in diagram.segments:
        path = real_segment(segment.start, segment.end)
        check(f"gamma_{segment.index}", gamma_for(segment), path)
    for i, event in enumerate(diagram.events, start=1):
        beta, lam = beta_lambda_for(event.points, table)
        check(f"beta_{i}", beta, semicircle(event.center, event.epsilon))
        check(f"lambda_{i}", lam, loop(event.center, event.epsilon))
    check("beta_inf", garside_delta(diagram.d), arc_at_infinity(diagram.radius))
    _LOGGER.info(
        "Cross-validation: %s of %s paths agree", len(report.entries) - len(report.mismatches),
        len(report.entries),
    )
    return report
