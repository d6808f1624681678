"""Core data model, the stereotype taxonomy and threat resolution.

Everything here is immutable once built. Element references (path endpoints,
dependency endpoints, trusted actors, tuple actors) are kept as plain names;
resolving them is the validator's job.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional, Union


class TaxonomyError(Exception):
    """Raised for unknown stereotypes or illegal taxonomy extensions."""


class StereotypeKind(str, Enum):
    CONNECTION = "connection"
    DEVICE = "device"
    NODE_MARKER = "node-marker"
    REQUIREMENT = "requirement"
    ACTOR_MARKER = "actor-marker"
    TRACEABILITY_MARKER = "traceability-marker"


#: Kinds that may appear as keys in an adversary model.
THREAT_BEARING_KINDS = frozenset(
    {StereotypeKind.CONNECTION, StereotypeKind.DEVICE, StereotypeKind.NODE_MARKER}
)


class Threat(str, Enum):
    READ = "read"
    INSERT = "insert"
    DELETE = "delete"
    ACCESS = "access"


class Requirement(str, Enum):
    SECRECY = "secrecy"
    INTEGRITY = "integrity"
    AVAILABILITY = "availability"

    @property
    def threat(self) -> Threat:
        return REQUIREMENT_THREAT[self]


REQUIREMENT_THREAT: Mapping[Requirement, Threat] = {
    Requirement.SECRECY: Threat.READ,
    Requirement.INTEGRITY: Threat.INSERT,
    Requirement.AVAILABILITY: Threat.DELETE,
}

#: What physical control over a node grants on every channel touching it.
PHYSICAL_ACCESS_THREATS = frozenset({Threat.READ, Threat.INSERT, Threat.DELETE})


class RoleType(str, Enum):
    DATA_SUBJECT = "DataSubject"
    DATA_CONTROLLER = "DataController"
    DATA_PROCESSOR = "DataProcessor"
    THIRD_PARTY = "ThirdParty"


ROLE_ORDER = {role: i for i, role in enumerate(RoleType)}
THREAT_ORDER = {threat: i for i, threat in enumerate(Threat)}


def sorted_threats(threats: Iterable[Threat]) -> list[Threat]:
    return sorted(threats, key=THREAT_ORDER.__getitem__)


def sorted_roles(roles: Iterable[RoleType]) -> list[RoleType]:
    return sorted(roles, key=ROLE_ORDER.__getitem__)


# --------------------------------------------------------------------------
# Spans


@dataclass(frozen=True)
class SourceSpan:
    """1-based, inclusive start / exclusive end column range in a file."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self) -> None:
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError(f"span start after end: {self}")

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"


def _span() -> Optional[SourceSpan]:
    return field(default=None, compare=False, repr=False)


# --------------------------------------------------------------------------
# Stereotypes


@dataclass(frozen=True)
class StereotypeRef:
    name: str
    kind: StereotypeKind
    parent: Optional[StereotypeRef] = None

    def lineage(self) -> Iterator[StereotypeRef]:
        """Yield self, then each ancestor up to the root."""
        st: Optional[StereotypeRef] = self
        while st is not None:
            yield st
            st = st.parent


WIRELESS = StereotypeRef("Wireless", StereotypeKind.CONNECTION)
COMPUTING_CONTINUUM_DEVICE = StereotypeRef("ComputingContinuumDevice", StereotypeKind.DEVICE)
INTERNAL = StereotypeRef("internal", StereotypeKind.NODE_MARKER)
ACTOR = StereotypeRef("Actor", StereotypeKind.ACTOR_MARKER)
DATA_TRACEABILITY = StereotypeRef("DataTraceability", StereotypeKind.TRACEABILITY_MARKER)


def _builtins() -> dict[str, StereotypeRef]:
    refs = [
        StereotypeRef("wire", StereotypeKind.CONNECTION),
        StereotypeRef("LAN", StereotypeKind.CONNECTION),
        StereotypeRef("Internet", StereotypeKind.CONNECTION),
        WIRELESS,
        *(
            StereotypeRef(name, StereotypeKind.CONNECTION, WIRELESS)
            for name in ("3G", "4G", "5G", "RFID", "NFC", "Bluetooth", "WLAN")
        ),
        COMPUTING_CONTINUUM_DEVICE,
        *(
            StereotypeRef(name, StereotypeKind.DEVICE, COMPUTING_CONTINUUM_DEVICE)
            for name in ("EndDevice", "EdgeNode", "Cloud")
        ),
        INTERNAL,
        *(StereotypeRef(r.value, StereotypeKind.REQUIREMENT) for r in Requirement),
        ACTOR,
        DATA_TRACEABILITY,
    ]
    return {ref.name: ref for ref in refs}


BUILTIN_STEREOTYPES: Mapping[str, StereotypeRef] = _builtins()

# parent name -> kind of the extension
EXTENSIBLE_PARENTS = {
    WIRELESS.name: StereotypeKind.CONNECTION,
    COMPUTING_CONTINUUM_DEVICE.name: StereotypeKind.DEVICE,
}


class Taxonomy:
    """Built-in stereotypes plus user extensions.

    A taxonomy obtained from :attr:`Model.taxonomy` is frozen; build a fresh
    one with :meth:`Taxonomy.builtin` to register extensions by hand.
    """

    def __init__(self) -> None:
        self._refs: dict[str, StereotypeRef] = dict(BUILTIN_STEREOTYPES)
        self._frozen = False

    @classmethod
    def builtin(cls) -> Taxonomy:
        return cls()

    def freeze(self) -> Taxonomy:
        self._frozen = True
        return self

    def register(self, name: str, parent: Union[str, StereotypeRef]) -> StereotypeRef:
        if self._frozen:
            raise TaxonomyError("taxonomy is frozen")
        parent_name = parent if isinstance(parent, str) else parent.name
        if name in self._refs:
            raise TaxonomyError(f"stereotype '{name}' is already defined")
        if parent_name not in EXTENSIBLE_PARENTS:
            allowed = " or ".join(sorted(EXTENSIBLE_PARENTS))
            raise TaxonomyError(
                f"stereotype '{name}' cannot extend '{parent_name}'; parent must be {allowed}"
            )
        ref = StereotypeRef(name, EXTENSIBLE_PARENTS[parent_name], self._refs[parent_name])
        self._refs[name] = ref
        return ref

    def lookup(self, name: str) -> StereotypeRef:
        try:
            return self._refs[name]
        except KeyError:
            raise TaxonomyError(f"unknown stereotype '{name}'") from None

    def get(self, name: str) -> Optional[StereotypeRef]:
        return self._refs.get(name)

    def __contains__(self, name: object) -> bool:
        return name in self._refs

    def __iter__(self) -> Iterator[StereotypeRef]:
        return iter(self._refs.values())

    def __len__(self) -> int:
        return len(self._refs)

    def of_kind(self, *kinds: StereotypeKind) -> list[StereotypeRef]:
        return [ref for ref in self._refs.values() if ref.kind in kinds]


def register_custom_stereotype(
    taxonomy: Taxonomy, name: str, parent: Union[str, StereotypeRef]
) -> StereotypeRef:
    return taxonomy.register(name, parent)


# --------------------------------------------------------------------------
# Model elements


@dataclass(frozen=True)
class CustomStereotype:
    name: str
    parent: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Component:
    name: str
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class Node:
    name: str
    stereotypes: tuple[str, ...] = ()
    components: tuple[Component, ...] = ()
    span: Optional[SourceSpan] = _span()

    @property
    def internal_marked(self) -> bool:
        return INTERNAL.name in self.stereotypes

    @property
    def component_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.components)


@dataclass(frozen=True)
class CommunicationPath:
    """Link between two nodes. Endpoints form an unordered pair."""

    first: str
    second: str
    stereotypes: tuple[str, ...] = ()
    span: Optional[SourceSpan] = _span()

    def __post_init__(self) -> None:
        if self.second < self.first:
            a, b = self.first, self.second
            object.__setattr__(self, "first", b)
            object.__setattr__(self, "second", a)

    @property
    def endpoints(self) -> tuple[str, str]:
        return (self.first, self.second)

    def connects(self, a: str, b: str) -> bool:
        return {a, b} == {self.first, self.second} and a != b

    @property
    def label(self) -> str:
        stereos = " ".join(f"<<{s}>>" for s in self.stereotypes)
        return f"{self.first} -- {self.second} {stereos}".rstrip()


@dataclass(frozen=True)
class Dependency:
    source: str
    target: str
    stereotypes: tuple[str, ...] = ()
    span: Optional[SourceSpan] = _span()

    @property
    def name(self) -> str:
        return f"{self.source}->{self.target}"

    @property
    def requirements(self) -> frozenset[Requirement]:
        values = {r.value: r for r in Requirement}
        return frozenset(values[s] for s in self.stereotypes if s in values)


@dataclass(frozen=True)
class TraceTuple:
    attribute: str
    actors: tuple[str, ...]
    span: Optional[SourceSpan] = _span()

    def __post_init__(self) -> None:
        if not self.actors:
            raise ValueError("a trace tuple needs at least one actor")


@dataclass(frozen=True)
class ClassDecl:
    """A class in the class view.

    ``actor`` is true when the class was declared with the ``actor`` keyword;
    :attr:`is_actor` also honours an explicit ``<<Actor>>`` annotation.
    Tags are stored whether or not the matching stereotype is present so the
    validator can report misuse.
    """

    name: str
    actor: bool = False
    stereotypes: tuple[str, ...] = ()
    attributes: tuple[str, ...] = ()
    roles: Optional[tuple[RoleType, ...]] = None
    trusts: Optional[tuple[str, ...]] = None
    rights: Optional[tuple[TraceTuple, ...]] = None
    obligations: Optional[tuple[TraceTuple, ...]] = None
    span: Optional[SourceSpan] = _span()

    @property
    def is_actor(self) -> bool:
        return self.actor or ACTOR.name in self.stereotypes

    @property
    def is_traceable(self) -> bool:
        return DATA_TRACEABILITY.name in self.stereotypes


@dataclass(frozen=True)
class ActorSpec:
    class_name: str
    roles: frozenset[RoleType]
    trusts: tuple[str, ...]


@dataclass(frozen=True)
class TraceabilitySpec:
    class_name: str
    rights: tuple[TraceTuple, ...]
    obligations: tuple[TraceTuple, ...]


@dataclass(frozen=True)
class AdversaryEntry:
    stereotype: str
    threats: frozenset[Threat]
    span: Optional[SourceSpan] = _span()


@dataclass(frozen=True)
class AdversaryModel:
    name: str
    entries: tuple[AdversaryEntry, ...] = ()
    span: Optional[SourceSpan] = _span()

    @cached_property
    def mapping(self) -> Mapping[str, frozenset[Threat]]:
        return {e.stereotype: e.threats for e in self.entries}

    @classmethod
    def from_mapping(
        cls, name: str, mapping: Mapping[str, Iterable[Union[Threat, str]]]
    ) -> AdversaryModel:
        entries = tuple(
            AdversaryEntry(st, frozenset(Threat(t) for t in threats))
            for st, threats in mapping.items()
        )
        return cls(name, entries)


@dataclass(frozen=True)
class Model:
    name: str
    stereotypes: tuple[CustomStereotype, ...] = ()
    nodes: tuple[Node, ...] = ()
    paths: tuple[CommunicationPath, ...] = ()
    dependencies: tuple[Dependency, ...] = ()
    classes: tuple[ClassDecl, ...] = ()
    adversaries: tuple[AdversaryModel, ...] = ()
    span: Optional[SourceSpan] = _span()

    @cached_property
    def taxonomy(self) -> Taxonomy:
        """Built-ins plus this model's declared extensions (frozen).

        Raises TaxonomyError if a declaration is illegal; the parser never
        builds such a model.
        """
        tax = Taxonomy.builtin()
        for decl in self.stereotypes:
            tax.register(decl.name, decl.parent)
        return tax.freeze()

    @cached_property
    def hosts(self) -> Mapping[str, Node]:
        """Component name -> hosting node."""
        return {c.name: n for n in self.nodes for c in n.components}

    def node(self, name: str) -> Node:
        for n in self.nodes:
            if n.name == name:
                return n
        raise KeyError(name)

    def adversary(self, name: str) -> AdversaryModel:
        for adv in self.adversaries:
            if adv.name == name:
                return adv
        raise KeyError(name)

    @property
    def adversary_names(self) -> list[str]:
        return [a.name for a in self.adversaries]

    @property
    def components(self) -> list[Component]:
        return [c for n in self.nodes for c in n.components]

    def device_stereotype(self, node: Node) -> Optional[StereotypeRef]:
        """The node's device stereotype, if exactly one is applied."""
        devices = [
            ref
            for ref in (self.taxonomy.get(s) for s in node.stereotypes)
            if ref is not None and ref.kind is StereotypeKind.DEVICE
        ]
        return devices[0] if len(devices) == 1 else None

    def connection_stereotype(self, path: CommunicationPath) -> Optional[StereotypeRef]:
        conns = [
            ref
            for ref in (self.taxonomy.get(s) for s in path.stereotypes)
            if ref is not None and ref.kind is StereotypeKind.CONNECTION
        ]
        return conns[0] if len(conns) == 1 else None

    @property
    def actor_specs(self) -> list[ActorSpec]:
        return [
            ActorSpec(c.name, frozenset(c.roles or ()), tuple(c.trusts or ()))
            for c in self.classes
            if c.is_actor
        ]

    @property
    def traceability_specs(self) -> list[TraceabilitySpec]:
        return [
            TraceabilitySpec(c.name, tuple(c.rights or ()), tuple(c.obligations or ()))
            for c in self.classes
            if c.is_traceable
        ]


# --------------------------------------------------------------------------
# Name matching

_NAME_NOISE = re.compile(r"[\s_\-]+")


def normalize_name(name: str) -> str:
    """Spelling-insensitive key for actor and attribute references.

    Case, whitespace, hyphens and underscores are ignored, so
    ``FiaB-Container Owner`` refers to the actor ``FiaB Container Owner``.
    """
    return _NAME_NOISE.sub("", name).casefold()


# --------------------------------------------------------------------------
# Threat resolution and channels


def resolve_threats(
    adv: AdversaryModel,
    stereotype: Union[StereotypeRef, str],
    taxonomy: Optional[Taxonomy] = None,
) -> frozenset[Threat]:
    """Threats ``adv`` holds against elements bearing ``stereotype``.

    The nearest entry along the parent chain wins, including an explicit
    empty set. No entry at all resolves to the empty set.
    """
    if isinstance(stereotype, str):
        stereotype = (taxonomy or Taxonomy.builtin()).lookup(stereotype)
    if stereotype.kind not in THREAT_BEARING_KINDS:
        raise TaxonomyError(
            f"stereotype '{stereotype.name}' ({stereotype.kind.value}) cannot carry threats"
        )
    match = matching_entry(adv, stereotype)
    return adv.mapping[match.name] if match is not None else frozenset()


def matching_entry(adv: AdversaryModel, stereotype: StereotypeRef) -> Optional[StereotypeRef]:
    """The stereotype in ``stereotype``'s lineage whose adversary entry applies."""
    for st in stereotype.lineage():
        if st.name in adv.mapping:
            return st
    return None


@dataclass(frozen=True)
class Channel:
    """Either a communication path or the interior of one node."""

    path: Optional[CommunicationPath] = None
    node: Optional[Node] = None

    def __post_init__(self) -> None:
        if (self.path is None) == (self.node is None):
            raise ValueError("a channel is either inter-node or intra-node")

    @property
    def kind(self) -> str:
        return "inter-node" if self.path is not None else "intra-node"

    @property
    def label(self) -> str:
        if self.path is not None:
            return self.path.label
        assert self.node is not None
        return f"{self.node.name} (intra-node)"

    @property
    def nodes(self) -> tuple[str, ...]:
        if self.path is not None:
            return self.path.endpoints
        assert self.node is not None
        return (self.node.name,)


def channel_sort_key(ch: Channel) -> tuple:
    if ch.path is not None:
        return (0, ch.path.first, ch.path.second, ch.path.stereotypes)
    assert ch.node is not None
    return (1, ch.node.name, ())


def connecting_channels(model: Model, source: str, target: str) -> list[Channel]:
    """Channels a dependency between two deployed components travels over.

    Co-deployed components share one intra-node channel. Otherwise every
    path joining exactly the two hosting nodes is a channel, in a stable
    order. An empty list means the dependency is unconnected.
    """
    src_node = model.hosts[source]
    tgt_node = model.hosts[target]
    if src_node.name == tgt_node.name:
        return [Channel(node=src_node)]
    channels = [
        Channel(path=p) for p in model.paths if p.connects(src_node.name, tgt_node.name)
    ]
    return sorted(channels, key=channel_sort_key)
