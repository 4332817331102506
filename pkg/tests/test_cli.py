import io
import subprocess
import sys

import pytest
from conftest import FIXTURES

from zcheck.cli import main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("expr,expected", [
    ("red car", "red(car) : M_1\n"),
    ("car", "car : M_0\n"),
    ("work -s", "-s(work) : M_1\n"),
    ("(red (heavy car))", "red(heavy(car)) : M_2\n"),
])
def test_parse(seed_path, expr, expected):
    assert run("parse", "-l", str(seed_path), expr) == (0, expected, "")


def test_parse_with_option_flag(seed_path):
    assert run("parse", "-l", str(seed_path), "-e", "john sleeps")[1] == "sleeps(john) : M_1\n"


def test_parse_failure(seed_path):
    code, out, err = run("parse", "-l", str(seed_path), "car rain")
    assert code == 2 and out == ""
    assert "no applicable head rule" in err


def test_parse_records(seed_path):
    code, out, _ = run("parse", "-l", str(seed_path), "--format", "records", "red car")
    assert out == "term\tformula=red(car)\torder=1\n"


def test_check_success(seed_path):
    code, out, _ = run("check", "-l", str(seed_path), "red car")
    assert code == 0
    lines = out.splitlines()
    assert lines[-1] == "n-Form  red(car) : M_1"
    assert "  CU-Elim  red(car) : M  [car : Phy]" in lines


def test_check_violation():
    code, out, err = run("check", "-l", str(FIXTURES / "idea.zlex"), "red idea")
    assert code == 1 and out == ""
    assert err == "restriction violation: red requires Phy at position 1; idea satisfies {Inf}\n"


def test_check_other_failure(seed_path):
    assert run("check", "-l", str(seed_path), "red blork")[0] == 2


def test_check_records(seed_path):
    _, out, _ = run("check", "-l", str(seed_path), "--format", "records", "red car")
    rows = [dict(f.split("=", 1) for f in line.split("\t")[1:]) for line in out.splitlines()]
    assert rows[-1] == {"depth": "0", "rule": "n-Form", "conclusion": "red(car) : M_1"}
    assert any(r.get("cited") == "car : Phy" for r in rows)


def test_verify_seed(seed_path):
    code, out, _ = run("verify", "-l", str(seed_path))
    assert code == 0
    assert out.splitlines()[-1] == "theorem: HOLDS (0 counterexamples, depth 2)"
    assert out.startswith("# position bound is 1 <= y <= ar(x)")


def test_verify_failure():
    code, out, _ = run("verify", "-l", str(FIXTURES / "unrestricted_verb.zlex"), "--depth", "1")
    assert code == 1
    assert "counterexample: verb position 1 (->" in out
    assert out.splitlines()[-1] == "theorem: FAILS (2 counterexamples, depth 1)"


def test_verify_empty():
    code, out, _ = run("verify", "-l", str(FIXTURES / "empty.zlex"), "--depth", "3")
    assert (code, out.splitlines()[-1]) == (0, "theorem: HOLDS (0 counterexamples, depth 3)")


def test_verify_records():
    _, out, _ = run("verify", "-l", str(FIXTURES / "partial_verb.zlex"), "--format", "records")
    assert "counterexample\tformula=verb\tposition=2\tdirection=forward" in out.splitlines()
    assert out.splitlines()[-1] == "summary\ttheorem=FAILS\tcounterexamples=1\tdepth=2"


@pytest.mark.parametrize("fixture,expected", [
    (None, "Q1: yes\nQ2: yes\n"),
    ("unrestricted_verb.zlex", "Q1: no (verb)\nQ2: yes\n"),
    ("partial_verb.zlex", "Q1: yes\nQ2: no (verb: position 2)\n"),
])
def test_audit(seed_path, fixture, expected):
    path = seed_path if fixture is None else FIXTURES / fixture
    assert run("audit", "-l", str(path)) == (0, expected, "")


def test_validate(seed_path, tmp_path):
    assert run("validate", "-l", str(seed_path))[:2] == (0, "valid\n")
    bad = tmp_path / "bad.zlex"
    bad.write_text('restriction Phy : "p"\nuniverse A : "a"\nentry "red" : A / arity 1 / restricts 1 -> Qux\n')
    code, out, _ = run("validate", "-l", str(bad))
    assert code == 3
    assert f"{bad}:3:" in out


def test_lexicon_error_exit(tmp_path):
    bad = tmp_path / "bad.zlex"
    bad.write_text("nonsense\n")
    code, out, err = run("parse", "-l", str(bad), "car")
    assert (code, out) == (3, "")
    assert ":1:1: syntax error" in err
    assert run("audit", "-l", str(tmp_path / "missing.zlex"))[0] == 3


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate", "-l", "x"],
    ["parse"],
    ["parse", "-l", "seed.zlex"],
    ["verify", "-l", "seed.zlex", "--depth", "7"],
    ["verify", "-l", "seed.zlex", "--format", "xml"],
])
def test_usage_errors(argv):
    assert run(*argv)[0] == 64


def test_color_only_paints_keywords(seed_path):
    _, out, _ = run("audit", "-l", str(seed_path), "--color")
    assert out == "Q1: \x1b[32myes\x1b[0m\nQ2: \x1b[32myes\x1b[0m\n"


def test_console_entry_point(seed_path):
    proc = subprocess.run([sys.executable, "-m", "zcheck", "parse", "-l", str(seed_path), "heavy rain"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "heavy(rain) : M_1\n"


def test_subprocess_output_is_reproducible(seed_path):
    cmd = [sys.executable, "-m", "zcheck", "verify", "-l", str(seed_path), "--format", "records"]
    first = subprocess.run(cmd, capture_output=True)
    second = subprocess.run(cmd, capture_output=True)
    assert first.returncode == 0
    assert first.stdout == second.stdout
