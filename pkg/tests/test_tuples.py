import pytest
from hypothesis import given
from hypothesis import strategies as st

from edgesec.model import TraceTuple
from edgesec.tuples import TupleSyntaxError, format_tuple_list, is_tuple_item, parse_tuple_list


def pairs(tuples):
    return [(t.attribute, list(t.actors)) for t in tuples]


def test_rights_example():
    got = parse_tuple_list("(Recorded Video, Authorized Personnel), (Customer Data, Customer)")
    assert pairs(got) == [
        ("Recorded Video", ["Authorized Personnel"]),
        ("Customer Data", ["Customer"]),
    ]


def test_obligations_example():
    got = parse_tuple_list("(Customer Data, FiaB-Container Owner, Operator)")
    assert pairs(got) == [("Customer Data", ["FiaB-Container Owner", "Operator"])]


@pytest.mark.parametrize("text", ["", "   ", "\t\n"])
def test_empty(text):
    assert parse_tuple_list(text) == []


def test_whitespace_is_trimmed():
    got = parse_tuple_list("  (  a b ,c  )  ,(d,   e f)  ")
    assert pairs(got) == [("a b", ["c"]), ("d", ["e f"])]


@pytest.mark.parametrize(
    "text, message, start, end",
    [
        ("(X)", "tuple requires attribute plus at least one actor", 0, 3),
        ("()", "tuple requires attribute plus at least one actor", 0, 2),
        ("(a, b", "unbalanced parentheses: missing ')'", 0, 5),
        ("(a, b))", "unbalanced parentheses: unexpected ')'", 6, 7),
        (")", "unbalanced parentheses: unexpected ')'", 0, 1),
        ("(a, (b))", "unbalanced parentheses: nested '('", 4, 5),
        ("(a, b),", "trailing separator after last tuple", 6, 7),
        ("(a, b),  ", "trailing separator after last tuple", 6, 7),
        ("(a, b) (c, d)", "expected ',' between tuples", 7, 8),
        ("a, b", "expected '(' to start a tuple", 0, 1),
        ("(a, , b)", "empty element in tuple", 3, 5),
        ("(a, b,)", "empty element in tuple", 6, 7),
    ],
)
def test_errors(text, message, start, end):
    with pytest.raises(TupleSyntaxError) as info:
        parse_tuple_list(text)
    assert info.value.message == message
    assert (info.value.start, info.value.end) == (start, end)


items = st.text(
    alphabet=st.characters(blacklist_characters="(),", blacklist_categories=("Cs",)), min_size=1
).map(str.strip).filter(bool)


@given(st.lists(st.tuples(items, st.lists(items, min_size=1, max_size=4)), max_size=5))
def test_format_parse_round_trip(raw):
    tuples = [TraceTuple(a, tuple(actors)) for a, actors in raw]
    assert all(is_tuple_item(t.attribute) for t in tuples)
    assert parse_tuple_list(format_tuple_list(tuples)) == tuples


@given(st.text(alphabet="(), ab\t-", max_size=30) | st.text(max_size=30))
def test_total(text):
    try:
        result = parse_tuple_list(text)
    except TupleSyntaxError as exc:
        assert 0 <= exc.start <= exc.end <= len(text)
    else:
        assert all(len(t.actors) >= 1 for t in result)
