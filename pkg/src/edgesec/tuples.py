"""Grammar for ``rights`` / ``obligations`` tag values.

::

    list  := tuple ("," tuple)*        (or empty / blank)
    tuple := "(" item ("," item)+ ")"
    item  := any run of characters other than "(", ")", ","; trimmed

The first item names an attribute, the rest name actors.
"""

from __future__ import annotations

from dataclasses import dataclass

from edgesec.model import TraceTuple

_DELIMS = "(),"


class TupleSyntaxError(ValueError):
    """A malformed tuple string. ``start``/``end`` are character offsets."""

    def __init__(self, message: str, start: int, end: int) -> None:
        super().__init__(message)
        self.message = message
        self.start = start
        self.end = end


@dataclass(frozen=True)
class _Item:
    text: str
    start: int
    end: int


def parse_tuple_list(text: str) -> list[TraceTuple]:
    """Parse ``"(a, x, y), (b, z)"`` into trace tuples.

    >>> [(t.attribute, t.actors) for t in parse_tuple_list("(Customer Data, Customer)")]
    [('Customer Data', ('Customer',))]

    Raises :class:`TupleSyntaxError` on the first problem found.
    """
    n = len(text)
    pos = _skip_ws(text, 0)
    result: list[TraceTuple] = []
    if pos == n:
        return result
    while True:
        if text[pos] != "(":
            if text[pos] == ")":
                raise TupleSyntaxError("unbalanced parentheses: unexpected ')'", pos, pos + 1)
            raise TupleSyntaxError("expected '(' to start a tuple", pos, pos + 1)
        open_pos = pos
        items, pos = _parse_items(text, pos + 1, open_pos)
        if len(items) < 2:
            raise TupleSyntaxError(
                "tuple requires attribute plus at least one actor", open_pos, pos
            )
        result.append(TraceTuple(items[0].text, tuple(i.text for i in items[1:])))
        pos = _skip_ws(text, pos)
        if pos == n:
            return result
        ch = text[pos]
        if ch == ",":
            comma = pos
            pos = _skip_ws(text, pos + 1)
            if pos == n:
                raise TupleSyntaxError("trailing separator after last tuple", comma, comma + 1)
            continue
        if ch == ")":
            raise TupleSyntaxError("unbalanced parentheses: unexpected ')'", pos, pos + 1)
        raise TupleSyntaxError("expected ',' between tuples", pos, pos + 1)


def _parse_items(text: str, pos: int, open_pos: int) -> tuple[list[_Item], int]:
    """Read items after an opening paren; return them and the offset past ')'."""
    items: list[_Item] = []
    n = len(text)
    start = pos
    while True:
        while pos < n and text[pos] not in _DELIMS:
            pos += 1
        raw = text[start:pos]
        stripped = raw.strip()
        if pos == n:
            raise TupleSyntaxError("unbalanced parentheses: missing ')'", open_pos, n)
        ch = text[pos]
        if ch == "(":
            raise TupleSyntaxError("unbalanced parentheses: nested '('", pos, pos + 1)
        if not stripped:
            if ch == ")" and not items:
                raise TupleSyntaxError(
                    "tuple requires attribute plus at least one actor", open_pos, pos + 1
                )
            raise TupleSyntaxError("empty element in tuple", start, pos + 1)
        lead = len(raw) - len(raw.lstrip())
        items.append(_Item(stripped, start + lead, start + lead + len(stripped)))
        pos += 1
        if ch == ")":
            return items, pos
        start = pos


def _skip_ws(text: str, pos: int) -> int:
    n = len(text)
    while pos < n and text[pos].isspace():
        pos += 1
    return pos


def format_tuple_list(tuples) -> str:
    """Inverse of :func:`parse_tuple_list` for well-formed tuples."""
    return ", ".join("(" + ", ".join((t.attribute, *t.actors)) + ")" for t in tuples)


def is_tuple_item(name: str) -> bool:
    """True if ``name`` survives a format/parse round trip unchanged."""
    return bool(name) and name == name.strip() and not any(c in _DELIMS for c in name)
