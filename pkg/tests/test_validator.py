import pytest
from hypothesis import given, settings

from edgesec.parser import parse_model
from edgesec.validator import RULES, has_errors, resolve_actor, trust_closure_report, validate

from conftest import load
from fixtures import ERROR_FIXTURES, WARNING_FIXTURES, wrap
from modelgen import models


def codes(text: str) -> list[str]:
    return [d.code for d in validate(parse_model(text))]


def error_codes(text: str) -> set[str]:
    return {d.code for d in validate(parse_model(text)) if d.severity == "error"}


def test_every_rule_has_a_fixture():
    assert set(ERROR_FIXTURES) | set(WARNING_FIXTURES) == set(RULES)


@pytest.mark.parametrize("code", sorted(ERROR_FIXTURES))
def test_error_fixture_trips_only_its_code(code):
    assert error_codes(ERROR_FIXTURES[code]) == {code}


@pytest.mark.parametrize("code", sorted(WARNING_FIXTURES))
def test_warning_fixture(code):
    diags = validate(parse_model(WARNING_FIXTURES[code]))
    assert not has_errors(diags)
    assert code in {d.code for d in diags}


def test_base_fixture_is_clean():
    assert codes(wrap()) == []


def test_corpus_has_no_errors(corpus_files):
    for path in corpus_files:
        diags = validate(parse_model(path.read_text(), str(path)))
        assert not has_errors(diags), [str(d) for d in diags]


def test_sm_spelling_warning(sm_model):
    (d,) = validate(sm_model)
    assert d.code == "W105"
    assert "'FiaB-Container Owner'" in d.message and "'FiaB Container Owner'" in d.message


def test_ghost_attribute():
    text = wrap(classes='actor U {} class C <<DataTraceability>> { attr x rights = "(Ghost, U)" }')
    (d,) = [d for d in validate(parse_model(text)) if d.code == "V009"]
    assert d.message == "unknown attribute in rights tuple: 'Ghost'"
    assert d.subject == "class C"


def test_requirement_entry_in_adversary():
    (d,) = validate(parse_model(ERROR_FIXTURES["V015"]))
    assert d.message.endswith("cannot carry threats: <<secrecy>>")


def test_access_on_channel_is_inapplicable():
    text = wrap(extra="adversary X { <<WLAN>> = {read, access} }")
    (d,) = validate(parse_model(text))
    assert d.code == "V016" and "'access'" in d.message


def test_custom_stereotypes_follow_parent_kind():
    text = wrap(
        "node A <<Gateway>> {} node B {} path A -- B <<LoRa>>",
        extra="stereotype LoRa extends Wireless stereotype Gateway extends ComputingContinuumDevice "
        "adversary X { <<LoRa>> = {read} <<Gateway>> = {access} }",
    )
    assert codes(text) == []


def test_unlinked_dependency_message():
    (d,) = validate(parse_model(ERROR_FIXTURES["V014"]))
    assert d.subject == "dependency a->b"


def test_diagnostics_are_sorted_and_deterministic():
    text = wrap("node A <<5G>> <<secrecy>> {} node B {} path A -- B", classes='actor U { trusts = ["Z"] }')
    first = validate(parse_model(text))
    assert first == validate(parse_model(text))
    assert len({d.code for d in first}) >= 4


def test_resolve_actor_is_spelling_insensitive(sm_model):
    assert resolve_actor(sm_model, "fiab_container-owner").name == "FiaB Container Owner"
    assert resolve_actor(sm_model, "Nobody") is None


class TestTrust:
    def test_sm(self, sm_model):
        assert trust_closure_report(sm_model) == [
            ("Operator", "Authorized Personnel"),
            ("Operator", "FiaB Container Owner"),
        ]

    def test_empty_trusts(self):
        m = parse_model(wrap(classes="actor U { trusts = [] } actor V {}"))
        assert trust_closure_report(m) == []

    def test_mutual_trust_is_not_transitive(self):
        m = parse_model(
            wrap(classes='actor A { trusts = ["B"] } actor B { trusts = ["A", "C"] } actor C {}')
        )
        pairs = trust_closure_report(m)
        assert pairs == [("A", "B"), ("B", "A"), ("B", "C")]
        assert ("A", "C") not in pairs

    def test_idempotent(self, sm_model):
        assert trust_closure_report(sm_model) == trust_closure_report(sm_model)


@settings(max_examples=100, deadline=None)
@given(models())
def test_generated_models_are_valid(m):
    assert not has_errors(validate(m))


def test_corpus_media_uses_customs():
    m = load("smart_media.edgesec")
    assert {s.name for s in m.stereotypes} == {"LoRa", "Gateway"}
