"""Command-line entry point.

Exit codes: 0 success, 1 error-severity findings, 2 parse failure,
3 usage or I/O problem.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

from . import fixture_text
from .analysis import assess, what_if
from .catalog import UnknownStandardError, limitations_for, standards_for
from .diagnostics import Diagnostic, DiagnosticError, has_errors
from .dsl import ParseError, parse_model, render_canonical
from .model import ControllabilityClass, ExposureClass, Limitation, QualLevel, SeverityClass
from .report import ReportFormat, render_table
from .tables import (
    RiskMatrix,
    default_risk_matrix,
    determine_asil,
    determine_risk,
    parse_matrix_config,
    validate_matrix,
)

OK, FINDINGS, PARSE_FAILURE, USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Exit(Exception):
    def __init__(self, code: int):
        self.code = code


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")

    def exit(self, status=0, message=None):
        if message:
            sys.stderr.write(message)
        raise _Exit(status if status == 0 else USAGE)


def _enum_arg(cls):
    def convert(raw: str):
        try:
            return cls.parse(raw)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    convert.__name__ = cls.__name__
    return convert


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="haratara", description="Combined HARA/TARA risk-model tool.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("check", help="parse, assess and lint risk models")
    p.add_argument("files", nargs="+", type=Path)
    p.add_argument("--matrix", type=Path, help="risk matrix config (impact,feasibility,risk lines)")

    p = sub.add_parser("report", help="render an assessment table")
    p.add_argument("file", type=Path)
    p.add_argument("--table", required=True, choices=("hara", "tara", "assets", "trace"))
    p.add_argument("--format", default="md", choices=("md", "csv", "json"))
    p.add_argument("--matrix", type=Path)
    p.add_argument("-o", "--output", type=Path)
    p.add_argument("--force", action="store_true", help="render even when errors were found")

    p = sub.add_parser("asil", help="look up the ASIL for S/E/C classes")
    p.add_argument("--severity", required=True, type=_enum_arg(SeverityClass))
    p.add_argument("--exposure", required=True, type=_enum_arg(ExposureClass))
    p.add_argument("--controllability", required=True, type=_enum_arg(ControllabilityClass))

    p = sub.add_parser("risk", help="look up the risk level for impact and feasibility")
    p.add_argument("--impact", required=True, type=_enum_arg(QualLevel))
    p.add_argument("--feasibility", required=True, type=_enum_arg(QualLevel))
    p.add_argument("--matrix", type=Path)

    p = sub.add_parser("what-if", help="show rating changes under field overrides")
    p.add_argument("file", type=Path)
    p.add_argument("--set", dest="sets", action="append", required=True, metavar="ID.FIELD=VALUE")
    p.add_argument("--matrix", type=Path)

    p = sub.add_parser("standards", help="query the standards coverage catalog")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--limitation", type=_enum_arg(Limitation))
    group.add_argument("--id", dest="standard")

    p = sub.add_parser("fmt", help="print or rewrite a model in canonical form")
    p.add_argument("file", type=Path)
    p.add_argument("--write", action="store_true")

    sub.add_parser("example", help="print the bundled perception case study")
    return parser


def _emit(diags: Sequence[Diagnostic], stream: TextIO, prefix: str = "") -> None:
    for d in diags:
        print(prefix + d.format(), file=stream)


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        print(f"haratara: cannot read {path}: {exc}", file=sys.stderr)
        raise _Exit(USAGE) from None


def _load_matrix(path: Optional[Path]) -> RiskMatrix:
    if path is None:
        return default_risk_matrix()
    try:
        matrix = parse_matrix_config(_read(path))
    except DiagnosticError as exc:
        _emit(exc.diagnostics, sys.stderr, f"{path}: ")
        raise _Exit(PARSE_FAILURE) from None
    problems = validate_matrix(matrix)
    if problems:
        _emit(problems, sys.stderr, f"{path}: ")
        raise _Exit(FINDINGS)
    return matrix


def _parse(path: Path, stream: TextIO, prefix: str = ""):
    try:
        return parse_model(_read(path))
    except ParseError as exc:
        _emit(exc.diagnostics, stream, prefix)
        raise _Exit(PARSE_FAILURE) from None


def cmd_check(args) -> int:
    matrix = _load_matrix(args.matrix)
    status = OK
    many = len(args.files) > 1
    for path in args.files:
        prefix = f"{path}: " if many else ""
        try:
            model = _parse(path, sys.stdout, prefix)
        except _Exit as stop:
            status = max(status, stop.code)
            continue
        assessment = assess(model, matrix)
        _emit(assessment.diagnostics, sys.stdout, prefix)
        if assessment.has_errors:
            status = max(status, FINDINGS)
    return status


def cmd_report(args) -> int:
    matrix = _load_matrix(args.matrix)
    model = _parse(args.file, sys.stderr)
    assessment = assess(model, matrix)
    _emit(assessment.diagnostics, sys.stderr)
    if assessment.has_errors and not args.force:
        print("haratara: refusing to render a report with errors; use --force", file=sys.stderr)
        return FINDINGS
    text = render_table(args.table, model, assessment, ReportFormat.parse(args.format))
    if args.output is not None:
        try:
            args.output.write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"haratara: cannot write {args.output}: {exc}", file=sys.stderr)
            return USAGE
    else:
        sys.stdout.write(text)
    return FINDINGS if assessment.has_errors else OK


def cmd_asil(args) -> int:
    print(determine_asil(args.severity, args.exposure, args.controllability).label)
    return OK


def cmd_risk(args) -> int:
    matrix = _load_matrix(args.matrix)
    print(determine_risk(args.impact, args.feasibility, matrix).label)
    return OK


def _parse_set(raw: str) -> tuple[str, str, str]:
    target, sep, value = raw.partition("=")
    ident, dot, field = target.rpartition(".")
    if not sep or not dot or not ident or not field or not value:
        raise UsageError(f"haratara what-if: error: malformed --set {raw!r}; expected ID.FIELD=VALUE")
    return ident.strip(), field.strip(), value.strip()


def cmd_what_if(args) -> int:
    overrides = [_parse_set(raw) for raw in args.sets]
    matrix = _load_matrix(args.matrix)
    model = _parse(args.file, sys.stderr)
    try:
        deltas = what_if(model, matrix, overrides)
    except DiagnosticError as exc:
        _emit(exc.diagnostics, sys.stderr)
        return FINDINGS
    for delta in deltas:
        print(delta)
    return OK


def cmd_standards(args) -> int:
    if args.limitation is not None:
        for entry in standards_for(args.limitation):
            print(entry.id)
        return OK
    try:
        covered = limitations_for(args.standard)
    except UnknownStandardError as exc:
        _emit(exc.diagnostics, sys.stderr)
        return FINDINGS
    for lim in sorted(covered):
        print(lim.label)
    return OK


def cmd_fmt(args) -> int:
    model = _parse(args.file, sys.stderr)
    text = render_canonical(model)
    if args.write:
        try:
            args.file.write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"haratara: cannot write {args.file}: {exc}", file=sys.stderr)
            return USAGE
    else:
        sys.stdout.write(text)
    return OK


def cmd_example(args) -> int:
    sys.stdout.write(fixture_text())
    return OK


COMMANDS = {
    "check": cmd_check,
    "report": cmd_report,
    "asil": cmd_asil,
    "risk": cmd_risk,
    "what-if": cmd_what_if,
    "standards": cmd_standards,
    "fmt": cmd_fmt,
    "example": cmd_example,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Execute one CLI invocation and return its exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return USAGE
    except _Exit as stop:
        return stop.code


def main() -> None:
    sys.exit(run())
