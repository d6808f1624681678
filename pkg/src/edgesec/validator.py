"""Well-formedness rules for parsed models.

Codes are stable; ``docs/diagnostics.md`` lists them. Errors block
analysis, warnings are lints only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from edgesec.model import (
    ClassDecl,
    Model,
    RoleType,
    SourceSpan,
    StereotypeKind,
    Threat,
    THREAT_BEARING_KINDS,
    TraceTuple,
    connecting_channels,
    normalize_name,
)

ERROR = "error"
WARNING = "warning"

#: code -> (severity, short title)
RULES: dict[str, tuple[str, str]] = {
    "V001": (ERROR, "connection stereotype outside a communication path"),
    "V002": (ERROR, "device or internal stereotype outside a node"),
    "V003": (ERROR, "requirement stereotype outside a dependency"),
    "V004": (ERROR, "Actor or DataTraceability stereotype outside a class"),
    "V005": (ERROR, "communication path without exactly one connection stereotype"),
    "V006": (ERROR, "node with more than one device stereotype"),
    "V007": (ERROR, "roles or trusts tag on a non-Actor class"),
    "V008": (ERROR, "rights or obligations tag on a class without DataTraceability"),
    "V009": (ERROR, "unknown attribute in rights/obligations tuple"),
    "V010": (ERROR, "rights/obligations tuple names a non-Actor"),
    "V011": (ERROR, "trusts names a non-Actor"),
    "V012": (ERROR, "communication path endpoint is not a node"),
    "V013": (ERROR, "dependency endpoint is not a deployed component"),
    "V014": (ERROR, "dependency without a connecting channel"),
    "V015": (ERROR, "adversary entry on a stereotype that cannot carry threats"),
    "V016": (ERROR, "threat not applicable to stereotype kind"),
    "V017": (ERROR, "ambiguous actor or attribute name"),
    "W101": (WARNING, "actor trusts itself"),
    "W102": (WARNING, "attribute listed in more than one tuple"),
    "W103": (WARNING, "obligations holder lacks DataController/DataProcessor role"),
    "W104": (WARNING, "dependency without protection requirements"),
    "W105": (WARNING, "reference spelled differently from its declaration"),
}

_PLACEMENT = {
    StereotypeKind.CONNECTION: ("V001", "communication paths"),
    StereotypeKind.DEVICE: ("V002", "nodes"),
    StereotypeKind.NODE_MARKER: ("V002", "nodes"),
    StereotypeKind.REQUIREMENT: ("V003", "dependencies"),
    StereotypeKind.ACTOR_MARKER: ("V004", "classes"),
    StereotypeKind.TRACEABILITY_MARKER: ("V004", "classes"),
}

_ALLOWED_ON = {
    "node": {StereotypeKind.DEVICE, StereotypeKind.NODE_MARKER},
    "path": {StereotypeKind.CONNECTION},
    "dependency": {StereotypeKind.REQUIREMENT},
    "class": {StereotypeKind.ACTOR_MARKER, StereotypeKind.TRACEABILITY_MARKER},
}

_OBLIGATION_ROLES = frozenset({RoleType.DATA_CONTROLLER, RoleType.DATA_PROCESSOR})


@dataclass(frozen=True)
class ValidationDiagnostic:
    code: str
    severity: str
    message: str
    subject: str
    span: Optional[SourceSpan] = None

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        return f"{where}{self.severity}: {self.code} {self.message} [{self.subject}]"


def has_errors(diags) -> bool:
    return any(d.severity == ERROR for d in diags)


def _diag(code: str, message: str, subject: str, span: Optional[SourceSpan]) -> ValidationDiagnostic:
    return ValidationDiagnostic(code, RULES[code][0], message, subject, span)


def validate(model: Model) -> list[ValidationDiagnostic]:
    """Run every rule over ``model``; diagnostics come back in a stable order."""
    diags = [
        *_check_placement(model),
        *_check_deployment(model),
        *_check_classes(model),
        *_check_adversaries(model),
    ]
    return sorted(diags, key=_sort_key)


def _sort_key(d: ValidationDiagnostic) -> tuple:
    s = d.span
    pos = (s.start_line, s.start_col) if s else (0, 0)
    return (pos, d.code, d.subject, d.message)


def _check_placement(model: Model) -> Iterator[ValidationDiagnostic]:
    tax = model.taxonomy
    elements = [
        *(("node", f"node {n.name}", n.stereotypes, n.span) for n in model.nodes),
        *(("path", f"path {p.label}", p.stereotypes, p.span) for p in model.paths),
        *(("dependency", f"dependency {d.name}", d.stereotypes, d.span) for d in model.dependencies),
        *(("class", f"class {c.name}", c.stereotypes, c.span) for c in model.classes),
    ]
    for where, subject, stereos, span in elements:
        for name in stereos:
            kind = tax.lookup(name).kind
            if kind not in _ALLOWED_ON[where]:
                code, target = _PLACEMENT[kind]
                yield _diag(
                    code,
                    f"<<{name}>> is a {kind.value} stereotype and applies only to {target}",
                    subject,
                    span,
                )

    for node in model.nodes:
        devices = [s for s in node.stereotypes if tax.lookup(s).kind is StereotypeKind.DEVICE]
        if len(devices) > 1:
            yield _diag(
                "V006",
                f"node has {len(devices)} device stereotypes ({', '.join(devices)}); at most one allowed",
                f"node {node.name}",
                node.span,
            )
    for path in model.paths:
        conns = [s for s in path.stereotypes if tax.lookup(s).kind is StereotypeKind.CONNECTION]
        if len(conns) != 1:
            yield _diag(
                "V005",
                f"communication path needs exactly one connection stereotype, found {len(conns)}",
                f"path {path.label}",
                path.span,
            )


def _check_deployment(model: Model) -> Iterator[ValidationDiagnostic]:
    node_names = {n.name for n in model.nodes}
    for path in model.paths:
        for end in path.endpoints:
            if end not in node_names:
                yield _diag("V012", f"unknown node '{end}'", f"path {path.label}", path.span)

    hosts = model.hosts
    for dep in model.dependencies:
        missing = [c for c in (dep.source, dep.target) if c not in hosts]
        for c in missing:
            yield _diag("V013", f"unknown component '{c}'", f"dependency {dep.name}", dep.span)
        if missing:
            continue
        if not connecting_channels(model, dep.source, dep.target):
            yield _diag(
                "V014",
                f"no communication path connects node '{hosts[dep.source].name}' "
                f"and node '{hosts[dep.target].name}'",
                f"dependency {dep.name}",
                dep.span,
            )
        if not dep.requirements:
            yield _diag(
                "W104",
                "dependency has no secrecy, integrity or availability requirement",
                f"dependency {dep.name}",
                dep.span,
            )


class _Index:
    """Spelling-insensitive lookup from a reference to declared names."""

    def __init__(self, names) -> None:
        self.by_key: dict[str, list[str]] = {}
        for name in names:
            self.by_key.setdefault(normalize_name(name), []).append(name)

    def find(self, ref: str) -> list[str]:
        return self.by_key.get(normalize_name(ref), [])

    def ambiguous(self) -> list[list[str]]:
        return [names for names in self.by_key.values() if len(names) > 1]


def resolve_actor(model: Model, ref: str) -> Optional[ClassDecl]:
    """The actor class ``ref`` denotes, or None if unresolved or ambiguous."""
    matches = [c for c in model.classes if c.is_actor and normalize_name(c.name) == normalize_name(ref)]
    return matches[0] if len(matches) == 1 else None


def _check_classes(model: Model) -> Iterator[ValidationDiagnostic]:
    actors = _Index(c.name for c in model.classes if c.is_actor)
    for names in actors.ambiguous():
        yield _diag(
            "V017",
            f"actor names {', '.join(sorted(names))} differ only in spelling",
            f"actor {names[0]}",
            None,
        )

    def check_actor_ref(ref: str, code: str, tag: str, subject: str, span) -> Iterator[ValidationDiagnostic]:
        found = actors.find(ref)
        if not found:
            yield _diag(code, f"'{ref}' in {tag} is not an Actor class", subject, span)
        elif len(found) == 1 and found[0] != ref:
            yield _diag("W105", f"'{ref}' in {tag} refers to actor '{found[0]}'", subject, span)

    for cls in model.classes:
        subject = f"class {cls.name}"
        if not cls.is_actor:
            for tag in ("roles", "trusts"):
                if getattr(cls, tag) is not None:
                    yield _diag("V007", f"tag '{tag}' requires <<Actor>>", subject, cls.span)
        else:
            for ref in cls.trusts or ():
                yield from check_actor_ref(ref, "V011", "trusts", subject, cls.span)
                if normalize_name(ref) == normalize_name(cls.name):
                    yield _diag("W101", "actor trusts itself", subject, cls.span)

        if not cls.is_traceable:
            for tag in ("rights", "obligations"):
                if getattr(cls, tag) is not None:
                    yield _diag("V008", f"tag '{tag}' requires <<DataTraceability>>", subject, cls.span)

        if not cls.is_traceable:
            continue
        attrs = _Index(cls.attributes)
        for names in attrs.ambiguous():
            yield _diag(
                "V017",
                f"attribute names {', '.join(sorted(names))} differ only in spelling",
                subject,
                cls.span,
            )
        for tag in ("rights", "obligations"):
            tuples: tuple[TraceTuple, ...] = getattr(cls, tag) or ()
            seen: set[str] = set()
            for t in tuples:
                found = attrs.find(t.attribute)
                if not found:
                    yield _diag(
                        "V009",
                        f"unknown attribute in {tag} tuple: '{t.attribute}'",
                        subject,
                        cls.span,
                    )
                elif len(found) == 1 and found[0] != t.attribute:
                    yield _diag(
                        "W105", f"'{t.attribute}' in {tag} refers to attribute '{found[0]}'", subject, cls.span
                    )
                key = normalize_name(t.attribute)
                if key in seen:
                    yield _diag(
                        "W102", f"attribute '{t.attribute}' appears in more than one {tag} tuple", subject, cls.span
                    )
                seen.add(key)
                for ref in t.actors:
                    yield from check_actor_ref(ref, "V010", f"{tag} tuple", subject, cls.span)

        for t in cls.obligations or ():
            for ref in t.actors:
                actor = resolve_actor(model, ref)
                if actor is not None and not (_OBLIGATION_ROLES & set(actor.roles or ())):
                    yield _diag(
                        "W103",
                        f"actor '{actor.name}' has obligations on '{t.attribute}' "
                        "but neither DataController nor DataProcessor role",
                        f"class {actor.name}",
                        actor.span,
                    )


def _check_adversaries(model: Model) -> Iterator[ValidationDiagnostic]:
    tax = model.taxonomy
    for adv in model.adversaries:
        subject = f"adversary {adv.name}"
        for entry in adv.entries:
            ref = tax.lookup(entry.stereotype)
            if ref.kind not in THREAT_BEARING_KINDS:
                yield _diag(
                    "V015",
                    f"{ref.kind.value} stereotype cannot carry threats: <<{ref.name}>>",
                    subject,
                    entry.span,
                )
                continue
            if ref.kind is StereotypeKind.DEVICE:
                bad = entry.threats - {Threat.ACCESS}
                allowed = "access"
            else:
                bad = entry.threats & {Threat.ACCESS}
                allowed = "read, insert, delete"
            for threat in sorted(t.value for t in bad):
                yield _diag(
                    "V016",
                    f"threat '{threat}' does not apply to <<{ref.name}>> ({ref.kind.value}); allowed: {allowed}",
                    subject,
                    entry.span,
                )


def trust_closure_report(model: Model) -> list[tuple[str, str]]:
    """Direct trust pairs ``(actor, trusted)`` as declared; never transitive."""
    pairs: list[tuple[str, str]] = []
    for cls in model.classes:
        if cls.is_actor:
            for ref in cls.trusts or ():
                if (cls.name, ref) not in pairs:
                    pairs.append((cls.name, ref))
    return sorted(pairs)
