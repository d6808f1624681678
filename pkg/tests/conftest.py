from pathlib import Path

import pytest

from edgesec.parser import parse_model

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"

_acceptance: dict[str, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): acceptance criterion n")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = getattr(report, "acceptance", None)
    if marker is None:
        return
    key = f"criterion {marker[0]}: {marker[1]}"
    _acceptance.setdefault(key, []).append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        outcome.get_result().acceptance = marker.args


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_acceptance, key=lambda k: int(k.split()[1].rstrip(":"))):
        outcomes = _acceptance[key]
        verdict = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"{verdict}  {key} ({len(outcomes)} check(s))")


def load(name: str):
    path = CORPUS / name
    return parse_model(path.read_text("utf-8"), str(path))


@pytest.fixture(scope="session")
def sm_model():
    return load("smart_manufacturing.edgesec")


@pytest.fixture(scope="session")
def corpus_files():
    return sorted(CORPUS.glob("*.edgesec"))
