import json
import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

import pytest

from cli.main import run

INVERTIBLE = """\
algebra 2
space M 1 1
chart A
chart B
overlap A B
map Phi[A, B]: x1' = 2*x1; t1' = t1 + g1
map Phi[B, A]: x1' = 1/2*x1; t1' = t1 - g1
"""

NILPOTENT = """\
algebra 2
space M 1 1
chart A
chart B
overlap A B
map Phi[A, B]: x1' = x1; t1' = 0
map Phi[B, A]: x1' = x1; t1' = t1
"""

HOMOTOPY = """\
algebra 2
space X 1 0
space Z 1 1
map f[X, X]: x1' = x1
map g[X, X]: x1' = x1 + g1*g2
map G[Z, X]: x1' = x1 - g1*t1
task homotopy check odd G f g endpoints g1, g2
task homotopy average f g endpoints g1, g2 degree 1
"""


@pytest.fixture
def write(tmp_path):
    def _write(text, name="doc.ssm"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


def test_solve(write, capsys):
    path = write("algebra 3\ntask solve g1 * X = 2 g1*g2*g3\n")
    assert run(["solve", path]) == 0
    out = capsys.readouterr().out
    assert "particular: 2*g2*g3" in out
    assert "kernel dimension: 4" in out


def test_solve_without_solution(write, capsys):
    path = write("algebra 2\ntask solve g1 * X = 1\n")
    assert run(["solve", path]) == 1
    assert "fail" in capsys.readouterr().out


def test_check_invertible_atlas(write, capsys):
    assert run(["check", write(INVERTIBLE)]) == 0
    out = capsys.readouterr().out
    assert "obstructedness: 0" in out
    assert "summary: hold=" in out


def test_check_reports_reflexive_failure(write, capsys):
    assert run(["check", write(NILPOTENT), "--reflexive", "--machine"]) == 1
    out = capsys.readouterr().out
    assert "relation=reflexive cycle=B,A verdict=fail" in out
    assert "section=atlas obstructedness=2" in out


def test_input_errors(write, capsys, tmp_path):
    assert run(["check", write("algebra 2\nfoo\n")]) == 2
    assert "2:1" in capsys.readouterr().err
    assert run(["check", str(tmp_path / "missing.ssm")]) == 2


def test_berezinian_of_named_map(write, capsys):
    path = write("algebra 2\nspace M 1 1\nmap f[M, M]: x1' = g1*g2*x1; t1' = t1\n")
    assert run(["berezinian", path, "--map", "f"]) == 0
    out = capsys.readouterr().out
    assert "value: g1*g2" in out
    assert "orientation: Nilpotent(2)" in out


def test_semigroup(write, capsys):
    assert run(["semigroup", write(INVERTIBLE), "--chart", "A", "--n-max", "2"]) == 0
    out = capsys.readouterr().out
    assert "chart: A" in out
    assert "exponents: 1,2" in out


def test_homotopy(write, capsys):
    assert run(["homotopy", write(HOMOTOPY)]) == 0
    out = capsys.readouterr().out
    assert "odd-semihomotopy" in out
    assert "parameter: odd" in out


def test_json_is_deterministic(write, capsys):
    path = write(INVERTIBLE)
    assert run(["check", path, "--json"]) == 0
    first = capsys.readouterr().out
    assert run(["check", path, "--json"]) == 0
    second = capsys.readouterr().out
    assert first == second
    report = json.loads(first)
    assert report["summary"]["fail"] == 0
    assert len(report["input_digest"]) == 64


def test_sweep(capsys):
    assert run(["sweep", "--kind", "invertible", "--count", "3", "--seed", "1"]) == 0
    assert "instance 3" in capsys.readouterr().out
    assert run(["sweep", "--kind", "idempotent", "--count", "2", "--seed", "1"]) == 1


if __name__ == "__main__":
    pytest.main([__file__])
