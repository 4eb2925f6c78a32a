"""Curve spec files: exact curve equations plus the data steering the pipeline.

A spec is a line-oriented ``key: value`` file. Lines starting with ``#`` are
comments and indented lines continue the previous value. Numbers are exact
rationals written ``num/den``; floating point literals are rejected.

Example::

    name: 3A6+A1
    model: sextic
    parameter: t = -3
    equation: 2*t*(t^3-1)*(z0^4*z1*z2 + ...)
    substitution: z0 = 1; z1 = x + 1/3; z2 = y/x
    multiplier: x^4
    improper: yes
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from tokenize import TokenError
from typing import Any

import sympy
import voluptuous as vol
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .braidkit import Braid, FreeWord, parse_word
from .const import (
    CONF_EQUATION,
    CONF_EXPECT,
    CONF_F2,
    CONF_F3,
    CONF_HIRZEBRUCH_DEGREE,
    CONF_IMPROPER,
    CONF_INFINITY_CONJUGATOR,
    CONF_INFINITY_CUT,
    CONF_INFINITY_POWER,
    CONF_MODEL,
    CONF_MULTIPLIER,
    CONF_NAME,
    CONF_PARAMETER,
    CONF_PRESIMPLIFY,
    CONF_PROJECTION,
    CONF_RATIO,
    CONF_REFERENCE_FIBER,
    CONF_SINGULARITIES,
    CONF_SUBSTITUTION,
    CONF_TABLE_LINE,
    CONF_TORUS_TYPE,
    DEFAULT_HIRZEBRUCH_DEGREE,
    MODEL_SEXTIC,
    MODEL_TETRAGONAL,
    MODEL_TORUS,
    MODELS,
)
from .exactpoly import BiPoly, X, Y, bipoly
from .exceptions import CurveSpecError

_LOGGER = logging.getLogger(__name__)

Z0, Z1, Z2 = sympy.symbols("z0 z1 z2")

_LINE = re.compile(r"^([A-Za-z_][A-Za-z0-9_.]*)\s*:\s*(.*)$")
_FLOAT = re.compile(r"\d*\.\d|\d[eE][-+]?\d")
_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
_TRANSFORMATIONS = standard_transformations + (convert_xor,)

REPEATABLE = (CONF_PARAMETER, CONF_SUBSTITUTION, CONF_RATIO)

EXPECT_KEYS = (
    "order",
    "abelianization",
    "gamma",
    "alexander",
    "real_fibers",
    "completeness",
    "generators",
    "relators",
    "total_length",
)

# Serialization order
_ORDER = (
    CONF_NAME,
    CONF_SINGULARITIES,
    CONF_TABLE_LINE,
    CONF_MODEL,
    CONF_PROJECTION,
    CONF_PARAMETER,
    CONF_EQUATION,
    CONF_F2,
    CONF_F3,
    CONF_SUBSTITUTION,
    CONF_MULTIPLIER,
    CONF_IMPROPER,
    CONF_HIRZEBRUCH_DEGREE,
    CONF_INFINITY_CUT,
    CONF_REFERENCE_FIBER,
    CONF_TORUS_TYPE,
    CONF_RATIO,
    CONF_INFINITY_CONJUGATOR,
    CONF_INFINITY_POWER,
    CONF_PRESIMPLIFY,
)


def _exact(value: Any) -> str:
    """Accept an expression without floating point literals."""
    text = str(value).strip()
    if not text:
        raise vol.Invalid("empty expression")
    if (match := _FLOAT.search(text)) is not None:
        raise vol.Invalid(f"floating point literal at offset {match.start()}")
    return text


def _rational(value: Any) -> Fraction:
    text = _exact(value)
    try:
        return Fraction(text)
    except ValueError as err:
        raise vol.Invalid(f"not an exact rational: {text!r}") from err


def _boolean(value: Any) -> bool:
    text = str(value).strip().lower()
    if text in ("yes", "true", "1"):
        return True
    if text in ("no", "false", "0"):
        return False
    raise vol.Invalid(f"expected yes or no, got {value!r}")


def _parameter(value: Any) -> tuple[str, Fraction]:
    name, sep, rest = str(value).partition("=")
    name = name.strip()
    if not sep or not _NAME.match(name):
        raise vol.Invalid(f"expected 'name = value', got {value!r}")
    if name in ("x", "y", "z0", "z1", "z2"):
        raise vol.Invalid(f"parameter name {name!r} is a coordinate")
    return name, _rational(rest)


def _substitution(value: Any) -> str:
    text = _exact(value)
    for part in text.split(";"):
        target, sep, _ = part.partition("=")
        if not sep or target.strip() not in ("x", "y", "z0", "z1", "z2"):
            raise vol.Invalid(f"expected 'coordinate = expression', got {part.strip()!r}")
    return text


def _ratio(value: Any) -> str:
    try:
        parse_word(str(value))
    except ValueError as err:
        raise vol.Invalid(str(err)) from err
    return str(value).strip()


def _braid(value: Any) -> str:
    try:
        Braid.parse(str(value))
    except ValueError as err:
        raise vol.Invalid(str(err)) from err
    return str(value).strip()


def _expect(value: Any) -> dict[str, str]:
    unknown = set(value) - set(EXPECT_KEYS)
    if unknown:
        raise vol.Invalid(f"unknown expectation {sorted(unknown)[0]!r}")
    return {key: str(v).strip() for key, v in value.items()}


SPEC_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_NAME): vol.All(str, vol.Length(min=1)),
        vol.Required(CONF_MODEL): vol.In(MODELS),
        vol.Optional(CONF_SINGULARITIES): str,
        vol.Optional(CONF_TABLE_LINE): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Optional(CONF_PROJECTION): str,
        vol.Optional(CONF_PARAMETER, default=list): [_parameter],
        vol.Optional(CONF_EQUATION): _exact,
        vol.Optional(CONF_F2): _exact,
        vol.Optional(CONF_F3): _exact,
        vol.Optional(CONF_SUBSTITUTION, default=list): [_substitution],
        vol.Optional(CONF_MULTIPLIER): _exact,
        vol.Optional(CONF_IMPROPER, default="no"): _boolean,
        vol.Optional(CONF_HIRZEBRUCH_DEGREE, default=DEFAULT_HIRZEBRUCH_DEGREE): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
        vol.Optional(CONF_INFINITY_CUT): _rational,
        vol.Optional(CONF_REFERENCE_FIBER, default=0): vol.All(vol.Coerce(int), vol.Range(min=0)),
        vol.Optional(CONF_TORUS_TYPE, default="no"): _boolean,
        vol.Optional(CONF_RATIO, default=list): [_ratio],
        vol.Optional(CONF_INFINITY_CONJUGATOR): _braid,
        vol.Optional(CONF_INFINITY_POWER): vol.All(vol.Coerce(int), vol.Range(min=1)),
        vol.Optional(CONF_PRESIMPLIFY, default="no"): _boolean,
        vol.Optional(CONF_EXPECT, default=dict): _expect,
    }
)


@dataclass(frozen=True)
class CurveSpec:
    """A parsed curve spec."""

    name: str
    model: str
    equation: str | None = None
    f2: str | None = None
    f3: str | None = None
    parameters: tuple[tuple[str, Fraction], ...] = ()
    substitutions: tuple[str, ...] = ()
    multiplier: str | None = None
    improper: bool = False
    hirzebruch_degree: int = DEFAULT_HIRZEBRUCH_DEGREE
    infinity_cut: Fraction | None = None
    reference_fiber: int = 0
    torus_type: bool = False
    ratios: tuple[str, ...] = ()
    singularities: str | None = None
    table_line: int | None = None
    projection: str | None = None
    infinity_conjugator: str | None = None
    infinity_power: int | None = None
    presimplify: bool = False
    expect: dict[str, str] = field(default_factory=dict, compare=True, hash=False)

    @property
    def ratio_words(self) -> list[FreeWord]:
        """Candidate ratios for the commutant test."""
        return [parse_word(text) for text in self.ratios]

    @property
    def conjugator(self) -> Braid | None:
        """Braid c with monodromy at infinity c^-1 s1^k c, if known."""
        if self.infinity_conjugator is None:
            return None
        return Braid.parse(self.infinity_conjugator)

    def polynomial(self) -> BiPoly:
        """The exact tetragonal equation in x and y described by the spec."""
        names = {"x": X, "y": Y, "z0": Z0, "z1": Z1, "z2": Z2}
        names.update({name: sympy.Symbol(name) for name, _ in self.parameters})
        values = {sympy.Symbol(name): _to_sympy(value) for name, value in self.parameters}
        if self.model == MODEL_TORUS:
            expr = _parse(self.f2, names, CONF_F2) ** 3 + _parse(self.f3, names, CONF_F3) ** 2
        else:
            expr = _parse(self.equation, names, CONF_EQUATION)
        expr = expr.subs(values)
        if self.model == MODEL_SEXTIC:
            homogeneous = sympy.Poly(expr, Z0, Z1, Z2)
            if not homogeneous.is_homogeneous or homogeneous.total_degree() != 6:
                raise CurveSpecError("the sextic must be homogeneous of degree 6 in z0, z1, z2")
        for text in self.substitutions:
            mapping = {}
            for part in text.split(";"):
                target, _, value = part.partition("=")
                mapping[names[target.strip()]] = _parse(value, names, CONF_SUBSTITUTION)
            expr = expr.subs(mapping, simultaneous=True)
        if self.multiplier is not None:
            expr = expr * _parse(self.multiplier, names, CONF_MULTIPLIER)
        expr = sympy.cancel(sympy.together(expr))
        _, denominator = sympy.fraction(expr)
        if denominator.free_symbols or not expr.free_symbols <= {X, Y}:
            raise CurveSpecError(
                f"the substituted equation is not a polynomial in x, y: {expr.free_symbols}"
            )
        return bipoly(sympy.expand(expr))

    def serialize(self) -> str:
        """Text form; parsing it gives back an equal spec."""
        values: dict[str, Any] = {
            CONF_NAME: self.name,
            CONF_SINGULARITIES: self.singularities,
            CONF_TABLE_LINE: self.table_line,
            CONF_MODEL: self.model,
            CONF_PROJECTION: self.projection,
            CONF_PARAMETER: [f"{name} = {value}" for name, value in self.parameters],
            CONF_EQUATION: self.equation,
            CONF_F2: self.f2,
            CONF_F3: self.f3,
            CONF_SUBSTITUTION: list(self.substitutions),
            CONF_MULTIPLIER: self.multiplier,
            CONF_IMPROPER: "yes" if self.improper else None,
            CONF_HIRZEBRUCH_DEGREE: self.hirzebruch_degree,
            CONF_INFINITY_CUT: self.infinity_cut,
            CONF_REFERENCE_FIBER: self.reference_fiber or None,
            CONF_TORUS_TYPE: "yes" if self.torus_type else None,
            CONF_RATIO: list(self.ratios),
            CONF_INFINITY_CONJUGATOR: self.infinity_conjugator,
            CONF_INFINITY_POWER: self.infinity_power,
            CONF_PRESIMPLIFY: "yes" if self.presimplify else None,
        }
        lines = []
        for key in _ORDER:
            value = values[key]
            for item in value if isinstance(value, list) else [value]:
                if item is not None:
                    lines.append(f"{key}: {item}")
        lines.extend(f"{CONF_EXPECT}.{key}: {value}" for key, value in self.expect.items())
        return "\n".join(lines) + "\n"


def _to_sympy(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _parse(text: str | None, names: dict[str, sympy.Symbol], key: str) -> sympy.Expr:
    if text is None:
        raise CurveSpecError(f"missing {key}")
    try:
        expr = parse_expr(text, local_dict=dict(names), transformations=_TRANSFORMATIONS)
    except (SyntaxError, TypeError, TokenError) as err:
        column = getattr(err, "offset", None)
        raise CurveSpecError(f"{key}: cannot parse {text!r}", column=column) from err
    unknown = {str(s) for s in expr.free_symbols} - set(names)
    if unknown:
        raise CurveSpecError(f"{key}: unknown symbol {sorted(unknown)[0]!r}")
    if any(isinstance(atom, sympy.Float) for atom in expr.atoms(sympy.Number)):
        raise CurveSpecError(f"{key}: floating point value in {text!r}")
    return expr


def _collect(text: str) -> tuple[dict[str, Any], dict[str, tuple[int, int]]]:
    raw: dict[str, Any] = {}
    positions: dict[str, tuple[int, int]] = {}
    last: str | None = None
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if line[0].isspace():
            if last is None:
                raise CurveSpecError("continuation line without a key", number, 1)
            if isinstance(raw[last], list):
                raw[last][-1] += " " + stripped
            elif last.startswith(f"{CONF_EXPECT}."):
                sub = last.split(".", 1)[1]
                raw[CONF_EXPECT][sub] += " " + stripped
            else:
                raw[last] += " " + stripped
            continue
        match = _LINE.match(line)
        if match is None:
            raise CurveSpecError("expected 'key: value'", number, 1)
        key, value = match.group(1), match.group(2).strip()
        column = match.start(2) + 1
        if key.startswith(f"{CONF_EXPECT}."):
            sub = key.split(".", 1)[1]
            raw.setdefault(CONF_EXPECT, {})
            if sub in raw[CONF_EXPECT]:
                raise CurveSpecError(f"duplicate key {key!r}", number, 1)
            raw[CONF_EXPECT][sub] = value
            positions.setdefault(CONF_EXPECT, (number, column))
        elif key in REPEATABLE:
            raw.setdefault(key, []).append(value)
            positions.setdefault(key, (number, column))
        else:
            if key in raw:
                raise CurveSpecError(f"duplicate key {key!r}", number, 1)
            raw[key] = value
            positions[key] = (number, column)
        last = key
    return raw, positions


def parse(text: str) -> CurveSpec:
    """Parse and validate the text of a curve spec."""
    raw, positions = _collect(text)
    try:
        data = SPEC_SCHEMA(raw)
    except vol.MultipleInvalid as err:
        first = err.errors[0]
        key = str(first.path[0]) if first.path else ""
        line, column = positions.get(key, (None, None))
        raise CurveSpecError(f"{key}: {first.msg}" if key else first.msg, line, column) from err
    model = data[CONF_MODEL]
    if model == MODEL_TORUS and (CONF_F2 not in data or CONF_F3 not in data):
        raise CurveSpecError("a torus model needs both f2 and f3", *positions[CONF_MODEL])
    if model in (MODEL_SEXTIC, MODEL_TETRAGONAL) and CONF_EQUATION not in data:
        raise CurveSpecError(f"a {model} model needs an equation", *positions[CONF_MODEL])
    spec = CurveSpec(
        name=data[CONF_NAME],
        model=model,
        equation=data.get(CONF_EQUATION),
        f2=data.get(CONF_F2),
        f3=data.get(CONF_F3),
        parameters=tuple(data[CONF_PARAMETER]),
        substitutions=tuple(data[CONF_SUBSTITUTION]),
        multiplier=data.get(CONF_MULTIPLIER),
        improper=data[CONF_IMPROPER],
        hirzebruch_degree=data[CONF_HIRZEBRUCH_DEGREE],
        infinity_cut=data.get(CONF_INFINITY_CUT),
        reference_fiber=data[CONF_REFERENCE_FIBER],
        torus_type=data[CONF_TORUS_TYPE],
        ratios=tuple(data[CONF_RATIO]),
        singularities=data.get(CONF_SINGULARITIES),
        table_line=data.get(CONF_TABLE_LINE),
        projection=data.get(CONF_PROJECTION),
        infinity_conjugator=data.get(CONF_INFINITY_CONJUGATOR),
        infinity_power=data.get(CONF_INFINITY_POWER),
        presimplify=data[CONF_PRESIMPLIFY],
        expect=data[CONF_EXPECT],
    )
    if (spec.infinity_conjugator is None) != (spec.infinity_power is None):
        raise CurveSpecError("infinity_conjugator and infinity_power go together")
    return spec


def load(path: str | Path) -> CurveSpec:
    """Read and parse a curve spec file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise CurveSpecError(f"cannot read {path}: {err.strerror}") from err
    _LOGGER.debug("Loading curve spec %s", path)
    return parse(text)


__all__ = ["CurveSpec", "SPEC_SCHEMA", "load", "parse"]
