import json

import pytest

from fpplab.cli import main


@pytest.fixture
def c4_file(tmp_path):
    path = tmp_path / "c4.json"
    path.write_text('{"name":"c4","elements":["x0","x1","y0","y1"],'
                    '"covers":[["x0","y0"],["x1","y0"],["x1","y1"],["x0","y1"]]}')
    return str(path)


def _gen(tmp_path, *args):
    out = tmp_path / "g.json"
    assert main(["gen", *args, "--out", str(out)]) == 0
    return str(out)


def test_check_fpp_c4(c4_file, capsys):
    assert main(["check", "fpp", c4_file]) == 1
    assert "witness" in capsys.readouterr().out


def test_check_json_output(c4_file, capsys):
    assert main(["check", "automorphic", c4_file, "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["holds"] is True and out["property"] == "automorphic"


@pytest.mark.parametrize("n", [1, 2, 3])
def test_gen_six_stack_is_nice(tmp_path, n):
    path = _gen(tmp_path, "six-stack", str(n))
    assert main(["check", "nice", path]) == 0


def test_stdin_input(monkeypatch, c4_file, capsys):
    import io
    import sys

    with open(c4_file) as fh:
        monkeypatch.setattr(sys, "stdin", io.StringIO(fh.read()))
    assert main(["check", "fpp", "-"]) == 1


def test_retract_enumerate(tmp_path, capsys):
    path = _gen(tmp_path, "six-stack", "3")
    capsys.readouterr()
    code = main(["retract", path, "--subset", "x0,z0,y1,y2,x3,z3", "--where", "x1=x0", "--json"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0 and out["count"] == 1
    assert out["retractions"][0]["y0"] == "x0"


def test_retract_not_a_retract(c4_file):
    assert main(["retract", c4_file, "--subset", "x0,x1"]) == 1


def test_classify(tmp_path, capsys):
    path = _gen(tmp_path, "six-stack", "2")
    capsys.readouterr()
    assert main(["classify", path, "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["width"] == 3 and out["ranked"] and out["tower"]["family"] == "6-tower"
    assert out["section"] is True


def test_gen_layers_and_dot(tmp_path):
    dot = tmp_path / "l.dot"
    out = tmp_path / "l.jsonl"
    assert main(["gen", "layers", "(2)(2)", "(2)(2)", "--out", str(out), "--dot", str(dot)]) == 0
    assert len(out.read_text().splitlines()) == 9
    assert dot.read_text().count("digraph") == 9


def test_gen_tower_spec(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text('{"summands": ["antichain2", {"eight_stack": ["C_8"]}]}')
    path = _gen(tmp_path, "tower", str(spec))
    assert main(["check", "automorphic", path]) == 0


def test_gen_corpus(tmp_path):
    path = _gen(tmp_path, "corpus", "--max-size", "4", "--max-width", "2")
    assert len(open(path).read().splitlines()) == 13


def test_verify_exit_codes(tmp_path, capsys):
    report = tmp_path / "r.json"
    assert main(["verify", "prop41", "--param", "max_rank=3", "--report", str(report)]) == 0
    assert json.loads(report.read_text())["status"] == "verified"
    assert main(["verify", "prop41", "--param", "max_rank=99"]) == 2


def test_budget_exit_code(tmp_path):
    path = _gen(tmp_path, "six-stack", "4")
    assert main(["check", "automorphic", path, "--budget-nodes", "2"]) == 2


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["check", "fpp"],
    ["check", "fpp", "/nonexistent/file.json"],
    ["verify", "prop41", "--param", "oops"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 3


def test_parse_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"elements":["a"],"covers":[["a","b"]]}')
    assert main(["check", "fpp", str(bad)]) == 3
    assert "unknown element 'b'" in capsys.readouterr().err


def test_empty_poset_rejected(tmp_path):
    e = tmp_path / "e.json"
    e.write_text('{"name":"e","elements":[],"covers":[]}')
    assert main(["check", "fpp", str(e)]) == 3
