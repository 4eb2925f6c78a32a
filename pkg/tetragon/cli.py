"""Command line interface."""

from __future__ import annotations

import argparse
import asyncio
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

import voluptuous as vol

from .braidkit import FreeWord, parse_word
from .const import (
    DEFAULT_COSET_LIMIT,
    DEFAULT_JOBS,
    DEFAULT_TIETZE_BUDGET,
    DOMAIN,
    EXIT_OK,
    EXIT_PARSE,
    FORMAT_SCRIPT,
    FORMAT_TEXT,
)
from .coordinator import (
    AnalysisCoordinator,
    AnalysisData,
    AnalysisOptions,
    async_analyze_many,
    specs_in,
)
from .curvespec import load
from .exceptions import CurveSpecError, TetragonError
from .messages import DEFAULT_LANGUAGE, LANGUAGES, command_text, error_message
from .report import expectation_failures, render, render_braids
from .svg import write_svg
from .tracker import format_log

_LOGGER = logging.getLogger(__name__)

EXIT_EXPECTATION = 1
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def _point(value: str) -> tuple[int, int]:
    """Parse ``3`` or ``3.1``: a 1-based fiber index and a 1-based point index."""
    fiber, _, point = str(value).partition(".")
    try:
        return int(fiber), int(point or 1) - 1
    except ValueError as err:
        raise vol.Invalid(f"expected FIBER or FIBER.POINT, got {value!r}") from err


def _split(value: str) -> tuple[int, int]:
    parts = str(value).split(",")
    if len(parts) != 2:
        raise vol.Invalid(f"expected two types such as 5,2, got {value!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as err:
        raise vol.Invalid(f"expected two types such as 5,2, got {value!r}") from err


def _probe(value: str) -> tuple[FreeWord, int]:
    word, sep, k = str(value).rpartition(":")
    if not sep:
        raise vol.Invalid(f"expected WORD:K, got {value!r}")
    try:
        return parse_word(word), int(k)
    except (ValueError, CurveSpecError) as err:
        raise vol.Invalid(f"invalid probe {value!r}: {err}") from err


PERTURB_SCHEMA = vol.Schema(
    {
        vol.Required("point"): _point,
        vol.Required("split"): _split,
    }
)

OPTIONS_SCHEMA = vol.Schema(
    {
        vol.Optional("reference_fiber"): vol.Any(None, vol.All(int, vol.Range(min=0))),
        vol.Required("coset_limit"): vol.All(int, vol.Range(min=1)),
        vol.Required("tietze_budget"): vol.All(int, vol.Range(min=0)),
        vol.Optional("probe", default=list): [_probe],
    },
    extra=vol.REMOVE_EXTRA,
)


def _validated(schema: vol.Schema, values: dict) -> dict:
    try:
        return schema(values)
    except vol.Invalid as err:
        raise CurveSpecError(str(err)) from err


def _options(args: argparse.Namespace) -> AnalysisOptions:
    values = _validated(OPTIONS_SCHEMA, vars(args))
    return AnalysisOptions(
        reference_fiber=values.get("reference_fiber"),
        coset_limit=values["coset_limit"],
        tietze_budget=values["tietze_budget"],
        probes=tuple(values["probe"]),
    )


def build_parser(language: str = DEFAULT_LANGUAGE) -> argparse.ArgumentParser:
    """The argument parser, with help texts in the given language."""

    def text(command: str, field: str | None = None) -> str:
        return command_text(command, field, language)

    parser = argparse.ArgumentParser(prog=DOMAIN)
    parser.add_argument("--log-level", default="WARNING", choices=LOG_LEVELS)
    parser.add_argument("--language", default=DEFAULT_LANGUAGE, choices=LANGUAGES)
    subparsers = parser.add_subparsers(dest="command", required=True)

    def group_options(sub: argparse.ArgumentParser, command: str) -> None:
        sub.add_argument(
            "--reference-fiber", type=int, help=text(command, "reference_fiber")
        )
        sub.add_argument(
            "--coset-limit",
            type=int,
            default=DEFAULT_COSET_LIMIT,
            help=text(command, "coset_limit"),
        )
        sub.add_argument(
            "--tietze-budget",
            type=int,
            default=DEFAULT_TIETZE_BUDGET,
            help=text(command, "tietze_budget"),
        )

    analyze = subparsers.add_parser("analyze", help=text("analyze"))
    analyze.add_argument("spec", nargs="+", help=text("analyze", "spec"))
    group_options(analyze, "analyze")
    analyze.add_argument("--jobs", type=int, default=DEFAULT_JOBS, help=text("analyze", "jobs"))
    analyze.add_argument(
        "--format",
        choices=(FORMAT_TEXT, FORMAT_SCRIPT),
        default=FORMAT_TEXT,
        help=text("analyze", "format"),
    )
    analyze.add_argument("--probe", action="append", default=[], help=text("analyze", "probe"))
    analyze.add_argument("--check", action="store_true", help=text("analyze", "check"))

    svg = subparsers.add_parser("svg", help=text("svg"))
    svg.add_argument("spec", help=text("svg", "spec"))
    svg.add_argument("-o", "--output", help=text("svg", "output"))

    perturb = subparsers.add_parser("perturb", help=text("perturb"))
    perturb.add_argument("spec", help=text("perturb", "spec"))
    perturb.add_argument("point", help=text("perturb", "point"))
    perturb.add_argument("split", help=text("perturb", "split"))
    group_options(perturb, "analyze")

    braids = subparsers.add_parser("braids", help=text("braids"))
    braids.add_argument("spec", help=text("braids", "spec"))
    braids.add_argument("--reference-fiber", type=int, help=text("analyze", "reference_fiber"))

    validate = subparsers.add_parser("validate", help=text("validate"))
    validate.add_argument("spec", help=text("validate", "spec"))
    validate.add_argument("--log", help=text("validate", "log"))
    return parser


def _report(data: AnalysisData, fmt: str, check: bool) -> int:
    sys.stdout.write(render(data, fmt))
    if not check:
        return EXIT_OK
    failures = expectation_failures(data)
    for failure in failures:
        _LOGGER.error("%s: %s", data.spec.name, failure)
    return EXIT_EXPECTATION if failures else EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    """Analyse every spec; the exit code is the first non-zero one."""
    options = _options(args)
    paths = specs_in(args.spec)
    if not paths:
        raise CurveSpecError("no curve spec given")
    results = asyncio.run(async_analyze_many(paths, options, args.jobs))
    code = EXIT_OK
    for path, result in zip(paths, results, strict=True):
        if isinstance(result, TetragonError):
            sys.stderr.write(f"{path}: {error_message(result, args.language)}\n")
            status = result.exit_code
        else:
            status = _report(result, args.format, args.check)
        code = code or status
    return code


def cmd_svg(args: argparse.Namespace) -> int:
    spec = load(args.spec)
    data = AnalysisCoordinator().scan(spec)
    output = Path(args.output) if args.output else Path(args.spec).with_suffix(".svg")
    write_svg(data.diagram, output, spec.name)
    return EXIT_OK


def cmd_perturb(args: argparse.Namespace) -> int:
    values = _validated(PERTURB_SCHEMA, {"point": args.point, "split": args.split})
    fiber, point = values["point"]
    coordinator = AnalysisCoordinator(_options(args))
    data = coordinator.perturb(load(args.spec), fiber, point, values["split"])
    sys.stdout.write(render(data))
    return EXIT_OK


def cmd_braids(args: argparse.Namespace) -> int:
    options = AnalysisOptions(reference_fiber=args.reference_fiber)
    data = AnalysisCoordinator(options).scan(load(args.spec))
    sys.stdout.write(render_braids(data))
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    coordinator = AnalysisCoordinator()
    data = coordinator.scan(load(args.spec))
    try:
        report = coordinator.validate(data)
    finally:
        if args.log and data.validation is not None:
            Path(args.log).write_text(format_log(data.validation.paths) + "\n", encoding="utf-8")
    sys.stdout.write(f"{data.spec.name}: {len(report.entries)} paths agree\n")
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "svg": cmd_svg,
    "perturb": cmd_perturb,
    "braids": cmd_braids,
    "validate": cmd_validate,
}


def _language(argv: Sequence[str]) -> str:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--language", default=DEFAULT_LANGUAGE)
    known, _ = pre.parse_known_args(argv)
    return known.language if known.language in LANGUAGES else DEFAULT_LANGUAGE


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser(_language(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_PARSE if err.code else EXIT_OK
    logging.basicConfig(
        level=args.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )
    try:
        return COMMANDS[args.command](args)
    except TetragonError as err:
        sys.stderr.write(error_message(err, args.language) + "\n")
        return err.exit_code
