from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from hqft.cli import main
from hqft.groups import symmetric
from hqft.tft import surface_invariant

SPECS = Path(__file__).resolve().parents[1] / "specs"


def run(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


@pytest.mark.parametrize("name", ["kz2.json", "klein.json", "model.json"])
def test_check_oriented_passes(name):
    res = run("check", "--input", SPECS / name)
    assert res.exit_code == 0, res.output
    rep = json.loads(res.output)
    assert rep["pass"] and rep["mode"] == "oriented"
    assert set(rep["sections"]) == {"quasi_biangular", "relations", "crossed"}


@pytest.mark.parametrize("name", ["kz2.json", "model.json"])
def test_check_unoriented_passes(name):
    res = run("check", "--input", SPECS / name, "--mode", "unoriented")
    assert res.exit_code == 0, res.output
    assert json.loads(res.output)["sections"]["unoriented"]["pass"]


def test_check_corrupt_trace_reports_r7():
    res = run("check", "--input", SPECS / "kz2_corrupt.json")
    assert res.exit_code == 1
    fails = json.loads(res.output)["sections"]["relations"]["failures"]
    r7 = [f for f in fails if f["family"] == "R7"]
    assert r7 and r7[0]["witness"] == {"entry": [0, 0], "lhs": "1/2", "rhs": "1"}
    text = run("check", "--input", SPECS / "kz2_corrupt.json", "--report", "text")
    assert text.exit_code == 1 and "R7" in text.output


def test_check_deterministic():
    a = run("check", "--input", SPECS / "model.json", "--mode", "unoriented").output
    b = run("check", "--input", SPECS / "model.json", "--mode", "unoriented").output
    assert a == b


def test_check_input_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    assert run("check", "--input", bad).exit_code == 2
    assert run("check", "--input", tmp_path / "missing.json").exit_code == 2
    odd = tmp_path / "odd.json"
    odd.write_text(json.dumps({"group": {"builtin": "cyclic", "n": 2}, "algebra": {"kind": "nonsense"}}))
    assert run("check", "--input", odd).exit_code == 2


def test_invariant_sphere(packages):
    res = run("invariant", "--input", SPECS / "model.json", "--genus", 0)
    assert res.exit_code == 0
    assert res.output.strip() == "37"
    assert run("invariant", "--input", SPECS / "kz2.json", "--genus", 0).output.strip() == "1"


def test_invariant_torus_block_count():
    res = run("invariant", "--input", SPECS / "model.json", "--genus", 1, "--monodromy", "e,e", "--audit", 4)
    assert res.exit_code == 0
    assert res.output.splitlines() == ["2", "audit: pass (4 alternatives)"]


def test_invariant_genus2_matches_library(packages):
    res = run("invariant", "--input", SPECS / "model.json", "--genus", 2, "--monodromy", "e,s;s,e")
    assert res.exit_code == 0
    assert res.output.strip() == str(surface_invariant(packages["model"], 2, ((0, 1), (1, 0))))


def test_invariant_bad_monodromy(tmp_path):
    G = symmetric(3)
    a, b = next((a, b) for a in G.elements for b in G.elements if G.commutator(a, b) != G.e)
    spec = tmp_path / "s3.json"
    spec.write_text(json.dumps({"group": {"builtin": "symmetric", "n": 3},
                                "algebra": {"kind": "group_algebra"}, "trace": ["1"]}))
    res = run("invariant", "--input", spec, "--genus", 1, "--monodromy", f"{G.name(a)},{G.name(b)}")
    assert res.exit_code == 2, res.output
    assert run("invariant", "--input", SPECS / "kz2.json", "--genus", 1).exit_code == 2
    assert run("invariant", "--input", SPECS / "kz2.json", "--genus", 1, "--monodromy", "e,q").exit_code == 2


def test_classify_count():
    res = run("classify", "--group", SPECS / "z2.json", "--n", 1, "--value-group", 2)
    assert res.exit_code == 0
    out = json.loads(res.output)
    assert out["count"] == 2 and len(out["classes"]) == 2


def test_classify_compare_equivalent():
    res = run("classify", "--group", SPECS / "z2.json", "--compare",
              SPECS / "model_trivial.json", SPECS / "model_twisted.json")
    assert res.exit_code == 0
    out = json.loads(res.output)
    assert out["verdict"] == "equivalent"
    assert out["witness"] == {"pi": [0], "phi": {"e": [0], "s": [1]}}


def test_classify_compare_mismatch():
    res = run("classify", "--group", SPECS / "z2.json", "--compare",
              SPECS / "model_trivial.json", SPECS / "model_n2.json")
    assert res.exit_code == 2


def test_classify_budget():
    res = run("classify", "--group", SPECS / "z2.json", "--n", 3, "--value-group", 4, "--budget", 10)
    assert res.exit_code == 2
