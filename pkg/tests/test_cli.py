import io
import json
import subprocess
import sys

import pytest

from edgesec.cli import main

from conftest import CORPUS, GOLDEN
from fixtures import ERROR_FIXTURES, WARNING_FIXTURES

SM = str(CORPUS / "smart_manufacturing.edgesec")


def run(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def write(tmp_path):
    def _write(text: str, name: str = "m.edgesec") -> str:
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return _write


class TestCheck:
    def test_clean(self, write):
        code, out, err = run("check", write('model "x" {}'))
        assert code == 0
        assert out.endswith(": 0 error(s), 0 warning(s)\n")

    def test_warnings_do_not_fail(self):
        code, out, err = run("check", SM)
        assert code == 0
        assert "W105" in err
        assert "1 warning(s)" in out

    @pytest.mark.parametrize("code_", sorted(ERROR_FIXTURES))
    def test_validation_errors(self, write, code_):
        code, out, err = run("check", write(ERROR_FIXTURES[code_]))
        assert code == 2
        assert code_ in err

    @pytest.mark.parametrize("code_", sorted(WARNING_FIXTURES))
    def test_warning_fixtures_pass(self, write, code_):
        assert run("check", write(WARNING_FIXTURES[code_]))[0] == 0

    def test_tuple_syntax_is_a_parse_error(self, write):
        text = 'model "x" { classes { actor X {} class C <<DataTraceability>> { attr X rights = "(X)" } } }'
        code, out, err = run("check", write(text))
        assert code == 3
        assert "tuple requires attribute plus at least one actor" in err

    def test_json(self, write):
        code, out, _ = run("check", write(ERROR_FIXTURES["V005"]), "--format", "json")
        doc = json.loads(out)
        assert code == 2 and doc["kind"] == "diagnostics" and doc["errors"] == 1

    def test_json_on_parse_error(self, write):
        code, out, _ = run("check", write("model"), "--format", "json")
        assert code == 3
        assert json.loads(out)["errors"] >= 1

    def test_quiet(self):
        code, out, err = run("check", SM, "--quiet")
        assert code == 0 and err == ""


class TestAnalyze:
    def test_violations(self):
        code, out, _ = run("analyze", SM, "--adversary", "Default", "--no-banner")
        assert code == 1
        assert out == (GOLDEN / "smart_manufacturing.Default.txt").read_text()

    def test_clean(self):
        code, out, _ = run("analyze", SM, "--adversary", "Empty")
        assert code == 0
        assert out.startswith("edgesec 0.1.0\n")
        assert "no violations" in out

    def test_json(self):
        code, out, _ = run("analyze", SM, "--adversary", "Default", "--format", "json")
        assert code == 1
        assert out == (GOLDEN / "smart_manufacturing.Default.json").read_text()

    def test_unknown_adversary(self):
        code, out, err = run("analyze", SM, "--adversary", "NoSuchAdv")
        assert code == 4
        assert "available: Default, Empty" in err

    def test_missing_adversary_flag(self):
        assert run("analyze", SM)[0] == 4

    def test_invalid_model(self, write):
        assert run("analyze", write(ERROR_FIXTURES["V014"]), "--adversary", "X")[0] == 2

    def test_parse_error(self, write):
        code, _, err = run("analyze", write('model "x" { deployment { node A <<Foo>> {} } }'), "--adversary", "X")
        assert code == 3
        assert ":1:" in err and "unknown stereotype <<Foo>>" in err


class TestReport:
    @pytest.mark.parametrize("kind", ["traceability", "trust", "roles"])
    def test_kinds(self, kind):
        code, out, _ = run("report", SM, "--kind", kind)
        assert code == 0 and out

    @pytest.mark.parametrize("kind", ["traceability", "trust", "roles"])
    def test_kinds_json(self, kind):
        code, out, _ = run("report", SM, "--kind", kind, "--format", "json")
        assert code == 0 and json.loads(out)["kind"] == kind

    def test_bad_kind(self):
        assert run("report", SM, "--kind", "bad")[0] == 4


class TestUsage:
    def test_missing_file(self, tmp_path):
        code, _, err = run("check", str(tmp_path / "nope.edgesec"))
        assert code == 4
        assert "nope.edgesec" in err

    def test_no_command(self):
        assert run()[0] == 4

    def test_bad_format(self):
        assert run("check", SM, "--format", "xml")[0] == 4

    def test_not_utf8(self, tmp_path):
        p = tmp_path / "bin.edgesec"
        p.write_bytes(b"model \xff\xfe")
        assert run("check", str(p))[0] == 3

    def test_help(self):
        with pytest.raises(SystemExit) as info:
            run("--help")
        assert info.value.code == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "edgesec", "analyze", SM, "--adversary", "Default", "--no-banner"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1
    assert proc.stdout == (GOLDEN / "smart_manufacturing.Default.txt").read_text()
