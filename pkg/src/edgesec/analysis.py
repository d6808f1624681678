"""Checks dependency requirements against an adversary's threats.

A dependency's requirement is violated when the paired threat
(secrecy/read, integrity/insert, availability/delete) reaches any channel
the dependency can travel over. A channel is reached either through the
adversary's entry for its stereotype, or because a node hosting one of the
dependency's endpoints is physically compromised (``access``), which grants
read, insert and delete.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from edgesec.model import (
    INTERNAL,
    PHYSICAL_ACCESS_THREATS,
    AdversaryModel,
    Channel,
    Dependency,
    Model,
    Node,
    Requirement,
    StereotypeRef,
    Threat,
    channel_sort_key,
    connecting_channels,
    matching_entry,
    resolve_threats,
    sorted_threats,
)


class AnalysisError(Exception):
    pass


class UnknownAdversaryError(AnalysisError):
    def __init__(self, name: str, available: list[str]) -> None:
        self.name = name
        self.available = available
        listing = ", ".join(available) if available else "none defined"
        super().__init__(f"unknown adversary '{name}' (available: {listing})")


@dataclass(frozen=True)
class Cause:
    """One link of a violation's explanation.

    ``source`` is ``"channel"`` when the threat comes from the channel's own
    stereotype, ``"node"`` when it comes from physical access to a node.
    ``matched`` is the stereotype whose adversary entry applied; it differs
    from ``stereotype`` when the threat was inherited from a parent.
    """

    source: str
    element: str
    stereotype: str
    matched: str
    threat: Threat
    adversary: str


@dataclass(frozen=True)
class Violation:
    dependency: str
    requirement: Requirement
    threat: Threat
    channel: str
    causes: tuple[Cause, ...]


@dataclass(frozen=True)
class ExposedNode:
    node: str
    stereotype: str
    matched: str


@dataclass(frozen=True)
class ChannelThreats:
    channel: str
    kind: str
    nodes: tuple[str, ...]
    stereotype: Optional[str]
    matched: Optional[str]
    threats: frozenset[Threat]


@dataclass(frozen=True)
class AnalysisReport:
    model: str
    adversary: str
    violations: tuple[Violation, ...]
    exposed_nodes: tuple[ExposedNode, ...]
    channels: tuple[ChannelThreats, ...]


def _channel_stereotype(model: Model, ch: Channel) -> Optional[StereotypeRef]:
    if ch.path is not None:
        return model.connection_stereotype(ch.path)
    assert ch.node is not None
    return INTERNAL if ch.node.internal_marked else None


def effective_threats(model: Model, adv: AdversaryModel, ch: Channel) -> frozenset[Threat]:
    """Threats the channel's own stereotype exposes it to.

    Intra-node channels are only threatened on ``<<internal>>`` nodes.
    """
    st = _channel_stereotype(model, ch)
    if st is None:
        return frozenset()
    return resolve_threats(adv, st)


def node_compromised(model: Model, adv: AdversaryModel, node: Node) -> bool:
    st = model.device_stereotype(node)
    return st is not None and Threat.ACCESS in resolve_threats(adv, st)


def _channel_causes(model: Model, adv: AdversaryModel, ch: Channel, dep: Dependency) -> list[Cause]:
    causes = []
    st = _channel_stereotype(model, ch)
    if st is not None:
        match = matching_entry(adv, st)
        if match is not None:
            for threat in sorted_threats(adv.mapping[match.name]):
                causes.append(Cause("channel", ch.label, st.name, match.name, threat, adv.name))
    hosts = model.hosts
    seen = set()
    for comp in (dep.source, dep.target):
        node = hosts[comp]
        if node.name in seen:
            continue
        seen.add(node.name)
        if node_compromised(model, adv, node):
            dev = model.device_stereotype(node)
            assert dev is not None
            match = matching_entry(adv, dev)
            assert match is not None
            causes.append(Cause("node", node.name, dev.name, match.name, Threat.ACCESS, adv.name))
    return causes


def _grants(cause: Cause) -> frozenset[Threat]:
    if cause.source == "node":
        return PHYSICAL_ACCESS_THREATS
    return frozenset({cause.threat})


def check_dependency(model: Model, adv: AdversaryModel, dep: Dependency) -> list[Violation]:
    """Violations of ``dep``'s requirements, one per violated requirement.

    Worst case over parallel channels: the first channel (in stable order)
    that lets the paired threat through is reported, with every cause that
    contributes that threat on it.
    """
    channels = connecting_channels(model, dep.source, dep.target)
    if not channels:
        raise AnalysisError(f"dependency {dep.name} has no connecting channel")
    violations = []
    for req in sorted(dep.requirements, key=lambda r: r.value):
        threat = req.threat
        for ch in channels:
            causes = [c for c in _channel_causes(model, adv, ch, dep) if threat in _grants(c)]
            if causes:
                violations.append(Violation(dep.name, req, threat, ch.label, tuple(causes)))
                break
    return violations


def channel_table(model: Model, adv: AdversaryModel) -> list[ChannelThreats]:
    """Resolved threats of every path and of every node hosting two or more components."""
    channels = [Channel(path=p) for p in model.paths]
    channels += [Channel(node=n) for n in model.nodes if len(n.components) >= 2]
    rows = []
    for ch in sorted(channels, key=channel_sort_key):
        st = _channel_stereotype(model, ch)
        match = matching_entry(adv, st) if st is not None else None
        rows.append(
            ChannelThreats(
                channel=ch.label,
                kind=ch.kind,
                nodes=ch.nodes,
                stereotype=st.name if st is not None else None,
                matched=match.name if match is not None else None,
                threats=effective_threats(model, adv, ch),
            )
        )
    return rows


def analyze(model: Model, adversary: str) -> AnalysisReport:
    try:
        adv = model.adversary(adversary)
    except KeyError:
        raise UnknownAdversaryError(adversary, model.adversary_names) from None

    violations = [v for d in model.dependencies for v in check_dependency(model, adv, d)]
    violations.sort(key=lambda v: (v.dependency, v.requirement.value))

    exposed = []
    for node in sorted(model.nodes, key=lambda n: n.name):
        if node_compromised(model, adv, node):
            dev = model.device_stereotype(node)
            match = matching_entry(adv, dev)
            exposed.append(ExposedNode(node.name, dev.name, match.name))

    return AnalysisReport(
        model=model.name,
        adversary=adv.name,
        violations=tuple(violations),
        exposed_nodes=tuple(exposed),
        channels=tuple(channel_table(model, adv)),
    )
