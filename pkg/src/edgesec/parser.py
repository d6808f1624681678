"""Lexer, recursive-descent parser and serializer for ``.edgesec`` files.

The grammar is documented in ``docs/grammar.md``. Parsing is two-phase:
a syntax pass builds model elements and collects positioned diagnostics,
recovering at statement boundaries; a resolution pass then checks
stereotype names, duplicate declarations and tag values. Cross references
between elements (path endpoints, trusted actors, ...) are left to the
validator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from edgesec.model import (
    AdversaryEntry,
    AdversaryModel,
    ClassDecl,
    CommunicationPath,
    Component,
    CustomStereotype,
    Dependency,
    Model,
    Node,
    RoleType,
    SourceSpan,
    Taxonomy,
    TaxonomyError,
    Threat,
    TraceTuple,
    sorted_threats,
)
from edgesec.tuples import TupleSyntaxError, format_tuple_list, parse_tuple_list

__all__ = [
    "ParseDiagnostic",
    "ParseError",
    "parse_model",
    "parse_tuple_list",
    "serialize_model",
    "TupleSyntaxError",
]


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str
    message: str
    span: SourceSpan

    def __str__(self) -> str:
        return f"{self.span}: {self.severity}: {self.message}"


class ParseError(Exception):
    def __init__(self, diagnostics: list[ParseDiagnostic]) -> None:
        self.diagnostics = diagnostics
        first = diagnostics[0] if diagnostics else "parse failed"
        super().__init__(str(first))


# --------------------------------------------------------------------------
# Lexer

WORD = "WORD"
STRING = "STRING"
EOF = "EOF"
PUNCT = ("<<", ">>", "--", "->", "{", "}", "[", "]", "=", ",")

_WORD_RE = re.compile(r"[A-Za-z0-9_]+")
_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


@dataclass
class Token:
    kind: str
    value: str
    line: int
    col: int
    end_line: int
    end_col: int
    # for STRING: (line, col) of each decoded character, plus the closing quote
    char_pos: list[tuple[int, int]] = field(default_factory=list, repr=False)

    def describe(self) -> str:
        if self.kind == EOF:
            return "end of input"
        if self.kind == STRING:
            return "string"
        return f"'{self.value}'"


class _Lexer:
    def __init__(self, text: str, file: str) -> None:
        self.text = text
        self.file = file
        self.pos = 0
        self.line = 1
        self.col = 1
        self.diagnostics: list[ParseDiagnostic] = []

    def _advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def _error(self, message: str, line: int, col: int, end_line: int, end_col: int) -> None:
        self.diagnostics.append(
            ParseDiagnostic("error", message, SourceSpan(self.file, line, col, end_line, end_col))
        )

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        text = self.text
        n = len(text)
        while True:
            while self.pos < n:
                ch = text[self.pos]
                if ch == "#":
                    while self.pos < n and text[self.pos] != "\n":
                        self._advance()
                elif ch.isspace():
                    self._advance()
                else:
                    break
            line, col = self.line, self.col
            if self.pos >= n:
                out.append(Token(EOF, "", line, col, line, col))
                return out
            ch = text[self.pos]
            if ch == '"':
                out.append(self._string())
                continue
            two = text[self.pos : self.pos + 2]
            if len(two) == 2 and two in PUNCT:
                self._advance()
                self._advance()
                out.append(Token(two, two, line, col, self.line, self.col))
                continue
            if ch in PUNCT:
                self._advance()
                out.append(Token(ch, ch, line, col, self.line, self.col))
                continue
            m = _WORD_RE.match(text, self.pos)
            if m:
                for _ in range(m.end() - m.start()):
                    self._advance()
                out.append(Token(WORD, m.group(), line, col, self.line, self.col))
                continue
            self._advance()
            self._error(f"unexpected character {ch!r}", line, col, self.line, self.col)

    def _string(self) -> Token:
        line, col = self.line, self.col
        self._advance()
        chars: list[str] = []
        char_pos: list[tuple[int, int]] = []
        text = self.text
        while True:
            if self.pos >= len(text) or text[self.pos] == "\n":
                self._error("unterminated string", line, col, self.line, self.col)
                char_pos.append((self.line, self.col))
                return Token(STRING, "".join(chars), line, col, self.line, self.col, char_pos)
            here = (self.line, self.col)
            ch = self._advance()
            if ch == '"':
                char_pos.append(here)
                return Token(STRING, "".join(chars), line, col, self.line, self.col, char_pos)
            if ch == "\\":
                if self.pos < len(text) and text[self.pos] in _ESCAPES:
                    chars.append(_ESCAPES[self._advance()])
                else:
                    self._error("invalid escape sequence", here[0], here[1], self.line, self.col)
                    continue
            else:
                chars.append(ch)
            char_pos.append(here)


# --------------------------------------------------------------------------
# Parser


class _Fail(Exception):
    """Abandon the current statement; the enclosing block resynchronises."""


@dataclass
class _Named:
    name: str
    span: SourceSpan


@dataclass
class _Stereo:
    name: str
    span: SourceSpan


class _Parser:
    def __init__(self, text: str, file: str) -> None:
        lexer = _Lexer(text, file)
        self.toks = lexer.tokens()
        self.file = file
        self.i = 0
        self.diagnostics: list[ParseDiagnostic] = list(lexer.diagnostics)
        # checked against the taxonomy after the syntax pass
        self.stereo_uses: list[_Stereo] = []
        self.stereo_decls: list[CustomStereotype] = []
        self.nodes: list[Node] = []
        self.paths: list[CommunicationPath] = []
        self.deps: list[Dependency] = []
        self.classes: list[ClassDecl] = []
        self.adversaries: list[AdversaryModel] = []

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def span_of(self, start: Token, end: Optional[Token] = None) -> SourceSpan:
        end = end or start
        return SourceSpan(self.file, start.line, start.col, end.end_line, end.end_col)

    def prev(self) -> Token:
        return self.toks[max(self.i - 1, 0)]

    def error(self, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(ParseDiagnostic("error", message, span))

    def fail(self, message: str, tok: Optional[Token] = None) -> _Fail:
        self.error(message, self.span_of(tok or self.tok))
        return _Fail()

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != EOF:
            self.i += 1
        return tok

    def at(self, kind: str, value: Optional[str] = None) -> bool:
        return self.tok.kind == kind and (value is None or self.tok.value == value)

    def at_word(self, value: str) -> bool:
        return self.at(WORD, value)

    def expect(self, kind: str, what: Optional[str] = None) -> Token:
        if self.tok.kind != kind:
            raise self.fail(f"expected {what or repr(kind)}, found {self.tok.describe()}")
        return self.advance()

    def expect_word(self, value: str) -> Token:
        if not self.at_word(value):
            raise self.fail(f"expected '{value}', found {self.tok.describe()}")
        return self.advance()

    def name(self, what: str) -> _Named:
        tok = self.tok
        if tok.kind in (WORD, STRING):
            self.advance()
            if not tok.value:
                raise self.fail(f"{what} must not be empty", tok)
            return _Named(tok.value, self.span_of(tok))
        raise self.fail(f"expected {what}, found {tok.describe()}")

    def stereos(self) -> list[_Stereo]:
        out = []
        while self.at("<<"):
            start = self.advance()
            name = self.expect(WORD, "stereotype name")
            end = self.expect(">>", "'>>'")
            st = _Stereo(name.value, self.span_of(start, end))
            self.stereo_uses.append(st)
            out.append(st)
        return out

    def stereo_names(self, stereos: list[_Stereo]) -> tuple[str, ...]:
        seen: set[str] = set()
        for st in stereos:
            if st.name in seen:
                self.error(f"stereotype <<{st.name}>> applied twice", st.span)
            seen.add(st.name)
        return tuple(dict.fromkeys(st.name for st in stereos))

    def name_list(self, what: str) -> list[_Named]:
        self.expect("[", "'['")
        items: list[_Named] = []
        if not self.at("]"):
            items.append(self.name(what))
            while self.at(","):
                self.advance()
                items.append(self.name(what))
        self.expect("]", "']'")
        return items

    # -- blocks and recovery

    def block(self, statements: dict[str, Callable[[], None]], what: str) -> Token:
        """Parse ``{ statement* }`` and return the closing brace token."""
        self.expect("{", "'{'")
        while True:
            tok = self.tok
            if tok.kind == "}":
                return self.advance()
            if tok.kind == EOF:
                raise self.fail(f"expected '}}' to close {what}, found end of input")
            try:
                if tok.kind == WORD and tok.value in statements:
                    statements[tok.value]()
                elif tok.kind == "<<" and "<<" in statements:
                    statements["<<"]()
                else:
                    allowed = ", ".join(f"'{k}'" for k in statements if k != "<<")
                    if "<<" in statements:
                        allowed = (allowed + ", " if allowed else "") + "'<<'"
                    raise self.fail(
                        f"unexpected {tok.describe()} in {what}; expected {allowed} or '}}'"
                    )
            except _Fail:
                self.sync(statements)

    def sync(self, statements: dict[str, Callable[[], None]]) -> None:
        start = self.i
        depth = 0
        while True:
            tok = self.tok
            if tok.kind == EOF:
                return
            if depth == 0 and self.i > start:
                if tok.kind == "}":
                    return
                if tok.kind == WORD and tok.value in statements:
                    return
                if tok.kind == "<<" and "<<" in statements:
                    return
            if tok.kind == "{":
                depth += 1
            elif tok.kind == "}":
                if depth == 0:
                    return
                depth -= 1
            self.advance()

    # -- grammar

    def parse(self) -> Optional[str]:
        if self.tok.kind == EOF:
            self.error("expected 'model' header, found end of input", self.span_of(self.tok))
            return None
        try:
            self.expect_word("model")
            name = self.name("model name").name
        except _Fail:
            return None
        try:
            self.block(
                {
                    "deployment": self.deployment,
                    "classes": self.classes_section,
                    "adversary": self.adversary,
                    "stereotype": self.stereotype_decl,
                },
                "model",
            )
        except _Fail:
            return name
        if self.tok.kind != EOF:
            self.error(
                f"unexpected {self.tok.describe()} after end of model", self.span_of(self.tok)
            )
        return name

    def stereotype_decl(self) -> None:
        start = self.advance()
        name = self.expect(WORD, "stereotype name")
        self.expect_word("extends")
        parent = self.expect(WORD, "parent stereotype name")
        self.stereo_decls.append(
            CustomStereotype(name.value, parent.value, self.span_of(start, parent))
        )

    def deployment(self) -> None:
        self.advance()
        self.block(
            {"node": self.node, "path": self.path, "dependency": self.dependency},
            "deployment section",
        )

    def node(self) -> None:
        start = self.advance()
        name = self.name("node name")
        stereos = self.stereos()
        components: list[Component] = []

        def component() -> None:
            kw = self.advance()
            c = self.name("component name")
            components.append(Component(c.name, self.span_of(kw, self.prev())))

        end = self.block({"component": component}, f"node '{name.name}'")
        self.nodes.append(
            Node(name.name, self.stereo_names(stereos), tuple(components), self.span_of(start, end))
        )

    def path(self) -> None:
        start = self.advance()
        a = self.name("node name")
        self.expect("--", "'--'")
        b = self.name("node name")
        stereos = self.stereos()
        span = self.span_of(start, self.prev())
        if a.name == b.name:
            self.error("path endpoints must be distinct", span)
            return
        self.paths.append(CommunicationPath(a.name, b.name, self.stereo_names(stereos), span))

    def dependency(self) -> None:
        start = self.advance()
        a = self.name("component name")
        self.expect("->", "'->'")
        b = self.name("component name")
        stereos = self.stereos()
        span = self.span_of(start, self.prev())
        if a.name == b.name:
            self.error("dependency endpoints must be distinct", span)
            return
        self.deps.append(Dependency(a.name, b.name, self.stereo_names(stereos), span))

    def classes_section(self) -> None:
        self.advance()
        self.block({"actor": self.class_decl, "class": self.class_decl}, "classes section")

    def class_decl(self) -> None:
        start = self.advance()
        is_actor = start.value == "actor"
        name = self.name("class name")
        stereos = self.stereos()
        attrs: list[str] = []
        tags: dict[str, object] = {}
        attr_seen: set[str] = set()

        def attr() -> None:
            self.advance()
            a = self.name("attribute name")
            if a.name in attr_seen:
                self.error(f"duplicate attribute '{a.name}' in class '{name.name}'", a.span)
                return
            attr_seen.add(a.name)
            attrs.append(a.name)

        def tag() -> None:
            key = self.advance()
            self.expect("=", "'='")
            if key.value in ("roles", "trusts"):
                what = "role" if key.value == "roles" else "actor name"
                value: object = self.name_list(what)
            else:
                value = self.expect(STRING, "tuple string")
            if key.value in tags:
                self.error(f"tag '{key.value}' given twice", self.span_of(key, self.prev()))
                return
            tags[key.value] = value

        end = self.block(
            {"attr": attr, "roles": tag, "trusts": tag, "rights": tag, "obligations": tag},
            f"class '{name.name}'",
        )
        self.classes.append(
            ClassDecl(
                name.name,
                actor=is_actor,
                stereotypes=self.stereo_names(stereos),
                attributes=tuple(attrs),
                roles=self._roles(tags.get("roles")),
                trusts=self._names(tags.get("trusts")),
                rights=self._tuples(tags.get("rights")),
                obligations=self._tuples(tags.get("obligations")),
                span=self.span_of(start, end),
            )
        )

    def _roles(self, items) -> Optional[tuple[RoleType, ...]]:
        if items is None:
            return None
        roles = []
        for item in items:
            try:
                roles.append(RoleType(item.name))
            except ValueError:
                allowed = ", ".join(r.value for r in RoleType)
                self.error(f"unknown role '{item.name}'; expected one of {allowed}", item.span)
        return tuple(roles)

    @staticmethod
    def _names(items) -> Optional[tuple[str, ...]]:
        return None if items is None else tuple(i.name for i in items)

    def _tuples(self, tok: Optional[Token]) -> Optional[tuple[TraceTuple, ...]]:
        if tok is None:
            return None
        try:
            tuples = parse_tuple_list(tok.value)
        except TupleSyntaxError as exc:
            self.error(exc.message, self._string_span(tok, exc.start, exc.end))
            return ()
        return tuple(tuples)

    def _string_span(self, tok: Token, start: int, end: int) -> SourceSpan:
        pos = tok.char_pos
        last = len(pos) - 1
        sl, sc = pos[min(start, last)]
        el, ec = pos[min(max(end, start), last)]
        return SourceSpan(self.file, sl, sc, el, ec)

    def adversary(self) -> None:
        start = self.advance()
        name = self.name("adversary name")
        entries: list[AdversaryEntry] = []
        keys: set[str] = set()

        def entry() -> None:
            lt = self.advance()
            st_tok = self.expect(WORD, "stereotype name")
            st = _Stereo(st_tok.value, self.span_of(lt, self.expect(">>", "'>>'")))
            self.stereo_uses.append(st)
            self.expect("=", "'='")
            self.expect("{", "'{'")
            threats: set[Threat] = set()
            if not self.at("}"):
                threats.update(self.threat())
                while self.at(","):
                    self.advance()
                    threats.update(self.threat())
            end = self.expect("}", "'}'")
            if st.name in keys:
                self.error(f"duplicate adversary entry for <<{st.name}>>", st.span)
                return
            keys.add(st.name)
            entries.append(
                AdversaryEntry(st.name, frozenset(threats), SourceSpan(
                    self.file, st.span.start_line, st.span.start_col, end.end_line, end.end_col
                ))
            )

        end = self.block({"<<": entry}, f"adversary '{name.name}'")
        self.adversaries.append(AdversaryModel(name.name, tuple(entries), self.span_of(start, end)))

    def threat(self) -> list[Threat]:
        tok = self.expect(WORD, "threat")
        try:
            return [Threat(tok.value)]
        except ValueError:
            allowed = ", ".join(t.value for t in Threat)
            self.error(f"unknown threat '{tok.value}'; expected one of {allowed}", self.span_of(tok))
            return []

    # -- resolution pass

    def resolve(self) -> Taxonomy:
        tax = Taxonomy.builtin()
        for decl in self.stereo_decls:
            assert decl.span is not None
            try:
                tax.register(decl.name, decl.parent)
            except TaxonomyError as exc:
                self.error(str(exc), decl.span)
        for use in self.stereo_uses:
            if use.name not in tax:
                self.error(f"unknown stereotype <<{use.name}>>", use.span)

        def unique(items: Iterable, what: str, key=lambda x: x.name) -> None:
            seen: set = set()
            for item in items:
                k = key(item)
                if k in seen:
                    self.error(f"duplicate {what} '{k}'", item.span)
                seen.add(k)

        unique(self.nodes, "node")
        unique((c for n in self.nodes for c in n.components), "component")
        unique(self.classes, "class")
        unique(self.adversaries, "adversary")
        unique(self.deps, "dependency", key=lambda d: d.name)
        unique(self.paths, "communication path", key=lambda p: p.label)
        return tax


def parse_model(text: str, file: str = "<input>") -> Model:
    """Parse ``.edgesec`` source into a :class:`Model`.

    Raises :class:`ParseError` carrying every diagnostic found.
    """
    parser = _Parser(text, file)
    name = parser.parse()
    if name is not None:
        parser.resolve()
    errors = [d for d in parser.diagnostics if d.severity == "error"]
    if errors or name is None:
        raise ParseError(sorted(parser.diagnostics, key=_diag_key))
    last = parser.toks[-1]
    return Model(
        name=name,
        stereotypes=tuple(parser.stereo_decls),
        nodes=tuple(parser.nodes),
        paths=tuple(parser.paths),
        dependencies=tuple(parser.deps),
        classes=tuple(parser.classes),
        adversaries=tuple(parser.adversaries),
        span=SourceSpan(file, 1, 1, last.end_line, last.end_col),
    )


def _diag_key(d: ParseDiagnostic) -> tuple:
    s = d.span
    return (s.start_line, s.start_col, s.end_line, s.end_col, d.message)


# --------------------------------------------------------------------------
# Serializer


def quote(text: str) -> str:
    out = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


def fmt_name(name: str) -> str:
    return name if _WORD_RE.fullmatch(name) else quote(name)


def _stereos(names: Iterable[str]) -> str:
    return "".join(f" <<{n}>>" for n in names)


def serialize_model(model: Model) -> str:
    """Render ``model`` as ``.edgesec`` source that parses back to an equal model."""
    out = [f"model {quote(model.name)} {{"]
    blocks: list[list[str]] = []

    if model.stereotypes:
        blocks.append([f"  stereotype {s.name} extends {s.parent}" for s in model.stereotypes])

    if model.nodes or model.paths or model.dependencies:
        lines = ["  deployment {"]
        for node in model.nodes:
            head = f"    node {fmt_name(node.name)}{_stereos(node.stereotypes)}"
            if node.components:
                lines.append(head + " {")
                lines += [f"      component {fmt_name(c.name)}" for c in node.components]
                lines.append("    }")
            else:
                lines.append(head + " {}")
        for p in model.paths:
            lines.append(f"    path {fmt_name(p.first)} -- {fmt_name(p.second)}{_stereos(p.stereotypes)}")
        for d in model.dependencies:
            lines.append(
                f"    dependency {fmt_name(d.source)} -> {fmt_name(d.target)}{_stereos(d.stereotypes)}"
            )
        lines.append("  }")
        blocks.append(lines)

    if model.classes:
        lines = ["  classes {"]
        for c in model.classes:
            body = [f"      attr {fmt_name(a)}" for a in c.attributes]
            if c.roles is not None:
                body.append(f"      roles = [{', '.join(r.value for r in c.roles)}]")
            if c.trusts is not None:
                body.append(f"      trusts = [{', '.join(fmt_name(t) for t in c.trusts)}]")
            if c.rights is not None:
                body.append(f"      rights = {quote(format_tuple_list(c.rights))}")
            if c.obligations is not None:
                body.append(f"      obligations = {quote(format_tuple_list(c.obligations))}")
            kw = "actor" if c.actor else "class"
            head = f"    {kw} {fmt_name(c.name)}{_stereos(c.stereotypes)}"
            if body:
                lines += [head + " {", *body, "    }"]
            else:
                lines.append(head + " {}")
        lines.append("  }")
        blocks.append(lines)

    for adv in model.adversaries:
        lines = [f"  adversary {fmt_name(adv.name)} {{"]
        for e in adv.entries:
            threats = ", ".join(t.value for t in sorted_threats(e.threats))
            lines.append(f"    <<{e.stereotype}>> = {{{threats}}}")
        lines.append("  }")
        blocks.append(lines)

    for i, block in enumerate(blocks):
        if i:
            out.append("")
        out += block
    out.append("}")
    return "\n".join(out) + "\n"
