"""Command line front end.

Exit codes: 0 clean, 1 violations found, 2 validation errors,
3 parse errors, 4 usage errors. Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence, TextIO

from edgesec import __version__
from edgesec.analysis import UnknownAdversaryError, analyze
from edgesec.model import Model, SourceSpan
from edgesec.parser import ParseDiagnostic, ParseError, parse_model
from edgesec.report import (
    render,
    render_diagnostics,
    role_listing,
    traceability_matrix,
    trust_report,
)
from edgesec.validator import ERROR, WARNING, has_errors, validate

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_INVALID = 2
EXIT_PARSE = 3
EXIT_USAGE = 4

REPORT_KINDS = {
    "traceability": traceability_matrix,
    "trust": trust_report,
    "roles": role_listing,
}


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="edgesec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"edgesec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    common = _ArgumentParser(add_help=False)
    common.add_argument("file", type=Path, help=".edgesec model file")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--quiet", action="store_true", help="do not print warnings")
    common.add_argument("--no-banner", action="store_true", help="omit the version line in text output")

    sub.add_parser("check", parents=[common], help="parse and validate a model")
    analyze_p = sub.add_parser("analyze", parents=[common], help="check requirements against an adversary")
    analyze_p.add_argument("--adversary", required=True, help="adversary model to analyze against")
    report_p = sub.add_parser("report", parents=[common], help="class-view reports")
    report_p.add_argument("--kind", required=True, choices=sorted(REPORT_KINDS))
    return parser


def _use_color(stream: TextIO) -> bool:
    if os.environ.get("EDGESEC_NO_COLOR"):
        return False
    isatty = getattr(stream, "isatty", None)
    return bool(isatty and isatty())


def _paint(line: str, severity: str, color: bool) -> str:
    if not color:
        return line
    code = {ERROR: "31", WARNING: "33"}.get(severity)
    return f"\x1b[{code}m{line}\x1b[0m" if code else line


class _Session:
    def __init__(self, args: argparse.Namespace, out: TextIO, err: TextIO) -> None:
        self.args = args
        self.out = out
        self.err = err
        self.color = _use_color(err)

    def emit_diagnostics(self, diags) -> None:
        for d in diags:
            if self.args.quiet and d.severity == WARNING:
                continue
            self.err.write(_paint(str(d), d.severity, self.color) + "\n")

    def load(self) -> tuple[Optional[Model], int]:
        path: Path = self.args.file
        try:
            raw = path.read_bytes()
        except OSError as exc:
            self.err.write(f"edgesec: cannot read {path}: {exc.strerror or exc}\n")
            return None, EXIT_USAGE
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            span = SourceSpan(str(path), 1, 1, 1, 1)
            self.emit_diagnostics([ParseDiagnostic(ERROR, f"file is not valid UTF-8: {exc.reason}", span)])
            return None, EXIT_PARSE
        try:
            return parse_model(text, str(path)), EXIT_OK
        except ParseError as exc:
            self.emit_diagnostics(exc.diagnostics)
            if self.args.command == "check" and self.args.format == "json":
                self.out.write(render_diagnostics(str(path), exc.diagnostics, "json").payload)
            return None, EXIT_PARSE

    def validated(self) -> tuple[Optional[Model], int]:
        model, code = self.load()
        if model is None:
            return None, code
        diags = validate(model)
        self.emit_diagnostics(diags)
        if has_errors(diags):
            return None, EXIT_INVALID
        return model, EXIT_OK

    def write(self, obj) -> None:
        doc = render(obj, self.args.format, banner=not self.args.no_banner)
        self.out.write(doc.payload)


def cmd_check(s: _Session) -> int:
    model, code = s.load()
    if model is None:
        return code
    diags = validate(model)
    s.emit_diagnostics(diags)
    shown = [d for d in diags if not (s.args.quiet and d.severity == WARNING)]
    if s.args.format == "json":
        s.out.write(render_diagnostics(str(s.args.file), shown, "json").payload)
    else:
        s.out.write(render_diagnostics(str(s.args.file), shown).payload.splitlines()[-1] + "\n")
    return EXIT_INVALID if has_errors(diags) else EXIT_OK


def cmd_analyze(s: _Session) -> int:
    model, code = s.validated()
    if model is None:
        return code
    try:
        result = analyze(model, s.args.adversary)
    except UnknownAdversaryError as exc:
        s.err.write(f"edgesec: {exc}\n")
        return EXIT_USAGE
    s.write(result)
    return EXIT_VIOLATIONS if result.violations else EXIT_OK


def cmd_report(s: _Session) -> int:
    model, code = s.validated()
    if model is None:
        return code
    s.write(REPORT_KINDS[s.args.kind](model))
    return EXIT_OK


COMMANDS = {"check": cmd_check, "analyze": cmd_analyze, "report": cmd_report}


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    return COMMANDS[args.command](_Session(args, out, err))


if __name__ == "__main__":
    sys.exit(main())
