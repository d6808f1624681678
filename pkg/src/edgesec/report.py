"""Text and JSON rendering of diagnostics, analysis results and class-view reports.

JSON documents follow ``report.schema.json`` (shipped with the package).
Text output is line oriented and sorted so it can be compared against
golden files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence, Union

from edgesec import __version__
from edgesec.analysis import AnalysisReport, Cause
from edgesec.model import Model, sorted_roles, sorted_threats
from edgesec.parser import ParseDiagnostic
from edgesec.validator import ValidationDiagnostic, trust_closure_report

TOOL = "edgesec"
RIGHTS = "rights"
OBLIGATIONS = "obligations"

Diagnostic = Union[ParseDiagnostic, ValidationDiagnostic]


@dataclass(frozen=True)
class TraceabilityMatrix:
    """Rows are ``Class.attribute``; columns are actor names as referenced."""

    model: str
    rows: tuple[str, ...]
    columns: tuple[str, ...]
    cells: dict[tuple[str, str], frozenset[str]]

    def cell(self, row: str, column: str) -> frozenset[str]:
        return self.cells.get((row, column), frozenset())


@dataclass(frozen=True)
class TrustReport:
    model: str
    pairs: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class RoleListing:
    model: str
    actors: tuple[tuple[str, tuple[str, ...]], ...]


@dataclass(frozen=True)
class DiagnosticsReport:
    file: str
    diagnostics: tuple[Diagnostic, ...]


@dataclass(frozen=True)
class ReportDocument:
    format: str
    payload: str

    @property
    def bytes(self) -> bytes:
        return self.payload.encode("utf-8")


def traceability_matrix(model: Model) -> TraceabilityMatrix:
    cells: dict[tuple[str, str], set[str]] = {}
    for cls in model.classes:
        if not cls.is_traceable:
            continue
        for kind, tuples in ((RIGHTS, cls.rights), (OBLIGATIONS, cls.obligations)):
            for t in tuples or ():
                row = f"{cls.name}.{t.attribute}"
                for actor in t.actors:
                    cells.setdefault((row, actor), set()).add(kind)
    return TraceabilityMatrix(
        model=model.name,
        rows=tuple(sorted({r for r, _ in cells})),
        columns=tuple(sorted({c for _, c in cells})),
        cells={k: frozenset(v) for k, v in sorted(cells.items())},
    )


def trust_report(model: Model) -> TrustReport:
    return TrustReport(model.name, tuple(trust_closure_report(model)))


def role_listing(model: Model) -> RoleListing:
    actors = sorted(
        (spec.class_name, tuple(r.value for r in sorted_roles(spec.roles)))
        for spec in model.actor_specs
    )
    return RoleListing(model.name, tuple(actors))


# --------------------------------------------------------------------------
# JSON


def _header(kind: str) -> dict:
    return {"tool": TOOL, "version": __version__, "kind": kind}


def _cause_json(c: Cause) -> dict:
    return {
        "source": c.source,
        "element": c.element,
        "stereotype": c.stereotype,
        "matched": c.matched,
        "threat": c.threat.value,
        "adversary": c.adversary,
    }


def analysis_json(report: AnalysisReport) -> dict:
    return {
        **_header("analysis"),
        "model": report.model,
        "adversary": report.adversary,
        "exposed_nodes": [
            {"node": e.node, "stereotype": e.stereotype, "matched": e.matched}
            for e in report.exposed_nodes
        ],
        "channels": [
            {
                "channel": ch.channel,
                "kind": ch.kind,
                "nodes": list(ch.nodes),
                "stereotype": ch.stereotype,
                "matched": ch.matched,
                "threats": [t.value for t in sorted_threats(ch.threats)],
            }
            for ch in report.channels
        ],
        "violations": [
            {
                "dependency": v.dependency,
                "requirement": v.requirement.value,
                "threat": v.threat.value,
                "channel": v.channel,
                "causes": [_cause_json(c) for c in v.causes],
            }
            for v in report.violations
        ],
        "summary": {
            "violations": len(report.violations),
            "exposed_nodes": len(report.exposed_nodes),
        },
    }


def _span_json(span) -> dict | None:
    if span is None:
        return None
    return {
        "file": span.file,
        "start_line": span.start_line,
        "start_col": span.start_col,
        "end_line": span.end_line,
        "end_col": span.end_col,
    }


def diagnostics_json(report: DiagnosticsReport) -> dict:
    items = []
    for d in report.diagnostics:
        items.append(
            {
                "code": getattr(d, "code", None),
                "severity": d.severity,
                "message": d.message,
                "subject": getattr(d, "subject", None),
                "span": _span_json(d.span),
            }
        )
    return {
        **_header("diagnostics"),
        "file": report.file,
        "errors": sum(d.severity == "error" for d in report.diagnostics),
        "warnings": sum(d.severity == "warning" for d in report.diagnostics),
        "diagnostics": items,
    }


def matrix_json(m: TraceabilityMatrix) -> dict:
    return {
        **_header("traceability"),
        "model": m.model,
        "rows": list(m.rows),
        "columns": list(m.columns),
        "cells": [
            {"attribute": row, "actor": col, "relations": sorted(kinds)}
            for (row, col), kinds in m.cells.items()
        ],
    }


def trust_json(t: TrustReport) -> dict:
    return {
        **_header("trust"),
        "model": t.model,
        "pairs": [{"actor": a, "trusts": b} for a, b in t.pairs],
    }


def roles_json(r: RoleListing) -> dict:
    return {
        **_header("roles"),
        "model": r.model,
        "actors": [{"actor": a, "roles": list(roles)} for a, roles in r.actors],
    }


def load_schema() -> dict:
    text = resources.files("edgesec").joinpath("report.schema.json").read_text("utf-8")
    return json.loads(text)


# --------------------------------------------------------------------------
# Text


def _threats(threats: Iterable) -> str:
    names = [t.value for t in sorted_threats(threats)]
    return ", ".join(names) if names else "none"


def _stereo(stereotype: str, matched: str | None) -> str:
    if matched is None:
        return f"<<{stereotype}>> (no adversary entry)"
    if matched != stereotype:
        return f"<<{stereotype}>> (via <<{matched}>>)"
    return f"<<{stereotype}>>"


def _cause_text(c: Cause) -> str:
    if c.source == "node":
        return (
            f"node {c.element}: {_stereo(c.stereotype, c.matched)} grants access, "
            f"physical access implies read, insert, delete (adversary {c.adversary})"
        )
    return f"channel {c.element}: {_stereo(c.stereotype, c.matched)} grants {c.threat.value} (adversary {c.adversary})"


def analysis_text(report: AnalysisReport) -> list[str]:
    lines = [f'analysis of model "{report.model}" against adversary "{report.adversary}"', ""]
    lines.append(f"exposed nodes ({len(report.exposed_nodes)}):")
    for e in report.exposed_nodes:
        lines.append(f"  {e.node} {_stereo(e.stereotype, e.matched)}: access")
    if not report.exposed_nodes:
        lines.append("  none")
    lines.append("")
    lines.append(f"channel threats ({len(report.channels)}):")
    for ch in report.channels:
        if ch.stereotype is None:
            lines.append(f"  {ch.channel}: none (node not <<internal>>)")
            continue
        label = ch.channel if ch.kind == "inter-node" else f"{ch.channel} <<{ch.stereotype}>>"
        if ch.matched is None:
            label += " (no adversary entry)"
        elif ch.matched != ch.stereotype:
            label += f" (via <<{ch.matched}>>)"
        lines.append(f"  {label}: {_threats(ch.threats)}")
    if not report.channels:
        lines.append("  none")
    lines.append("")
    if not report.violations:
        lines.append("no violations")
        return lines
    lines.append(f"violations ({len(report.violations)}):")
    for v in report.violations:
        lines.append(
            f"  {v.dependency}: {v.requirement.value} violated by {v.threat.value} on {v.channel}"
        )
        lines += [f"    - {_cause_text(c)}" for c in v.causes]
    return lines


def diagnostic_line(d: Diagnostic) -> str:
    return str(d)


def diagnostics_text(report: DiagnosticsReport) -> list[str]:
    lines = [diagnostic_line(d) for d in report.diagnostics]
    errors = sum(d.severity == "error" for d in report.diagnostics)
    warnings = sum(d.severity == "warning" for d in report.diagnostics)
    lines.append(f"{report.file}: {errors} error(s), {warnings} warning(s)")
    return lines


def matrix_text(m: TraceabilityMatrix) -> list[str]:
    lines = [f'traceability matrix of model "{m.model}"']
    if not m.cells:
        return lines + ["no traceability tuples"]
    for (row, col), kinds in m.cells.items():
        lines.append(f"  {row} | {col} | {', '.join(sorted(kinds))}")
    return lines


def trust_text(t: TrustReport) -> list[str]:
    lines = [f'trust relations of model "{t.model}"']
    grouped: dict[str, list[str]] = {}
    for a, b in t.pairs:
        grouped.setdefault(a, []).append(b)
    if not grouped:
        return lines + ["no trust relations"]
    lines += [f"  {a} -> {', '.join(bs)}" for a, bs in grouped.items()]
    return lines


def roles_text(r: RoleListing) -> list[str]:
    lines = [f'actor roles of model "{r.model}"']
    if not r.actors:
        return lines + ["no actors"]
    lines += [f"  {a}: {', '.join(roles) if roles else '(none)'}" for a, roles in r.actors]
    return lines


_RENDERERS = {
    AnalysisReport: (analysis_json, analysis_text),
    DiagnosticsReport: (diagnostics_json, diagnostics_text),
    TraceabilityMatrix: (matrix_json, matrix_text),
    TrustReport: (trust_json, trust_text),
    RoleListing: (roles_json, roles_text),
}


def render(obj, fmt: str = "text", banner: bool = True) -> ReportDocument:
    """Render any report object. Identical input gives identical bytes."""
    try:
        to_json, to_text = _RENDERERS[type(obj)]
    except KeyError:
        raise TypeError(f"cannot render {type(obj).__name__}") from None
    if fmt == "json":
        return ReportDocument("json", json.dumps(to_json(obj), indent=2, ensure_ascii=False) + "\n")
    if fmt != "text":
        raise ValueError(f"unknown format '{fmt}'")
    lines = to_text(obj)
    if banner:
        lines = [f"{TOOL} {__version__}", *lines]
    return ReportDocument("text", "\n".join(lines) + "\n")


def render_diagnostics(file: str, diagnostics: Sequence[Diagnostic], fmt: str = "text", banner: bool = False) -> ReportDocument:
    return render(DiagnosticsReport(file, tuple(diagnostics)), fmt, banner)
