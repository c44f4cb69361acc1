import csv
import io
import json
import os
import subprocess
import sys

import pytest

from stackstop.cli import _round, run, write_atomic


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_json(capsys):
    code, out, _ = call(capsys, "solve", "--n", "50", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["schema_version"] == 1
    assert abs(d["game"]["u2"] - 0.203157) < 1e-5
    assert d["game"]["n_star"] == 19 and d["game"]["n0"] == 11
    assert len(d["game"]["strategy_summary"]) == 5


def test_thresholds_table_csv(capsys):
    code, out, _ = call(capsys, "tables", "--which", "thresholds-asymptotic", "--format", "csv")
    assert code == 0
    rows = {int(r["m"]): float(r["t"]) for r in csv.DictReader(io.StringIO(out))}
    assert round(rows[1], 4) == 0.5671
    assert round(rows[10], 4) == 0.3910
    assert round(rows[1_000_000], 4) == 0.3679


def test_bounds(capsys):
    code, out, _ = call(capsys, "asymptotic", "--bounds")
    d = json.loads(out)
    assert code == 0
    assert d["lower_bounds"]["3"] == pytest.approx(0.199217, abs=1e-6)
    assert d["upper_bound"] == pytest.approx(0.199548, abs=1e-6)
    assert d["truncation_bounds"]["3"] == pytest.approx(1.17435e-06, rel=1e-5)


def test_asymptotic_k(capsys):
    code, out, _ = call(capsys, "asymptotic", "--k", "1")
    assert code == 0
    assert json.loads(out)["lower_bound"]["pre_constant"] == pytest.approx(-0.614019, abs=1e-6)
    assert call(capsys, "asymptotic", "--k", "99")[0] == 2


def test_oracle_table1(capsys):
    code, out, _ = call(capsys, "oracle", "--n", "4", "--p2", "pi1", "--p2", "pi2", "--p2", "pi3")
    assert code == 0
    got = {r["strategy"]: r["u2"] for r in json.loads(out)["results"]}
    assert got == {"pi1": "1/4", "pi2": "5/24", "pi3": "1/6"}


def test_tables(capsys):
    for which in ("table1", "equilibria", "q", "posterior", "bounds"):
        code, out, _ = call(capsys, "tables", "--which", which)
        assert code == 0, which
        assert json.loads(out)["table"] == which
    _, out, _ = call(capsys, "tables", "--which", "equilibria", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["n"]) for r in rows] == [3, 4, 5, 6, 7, 8, 9, 10, 20]
    assert abs(float(rows[-1]["u2"]) - 0.2095) < 5e-5


def test_simulate_deterministic(capsys):
    a = call(capsys, "simulate", "--n", "20", "--trials", "5000", "--seed", "3")
    b = call(capsys, "simulate", "--n", "20", "--trials", "5000", "--seed", "3", "--shards", "3")
    assert a[0] == 0
    assert json.loads(a[1])["simulation"]["successes"] == json.loads(b[1])["simulation"]["successes"]


def test_near_opt(capsys):
    code, out, _ = call(capsys, "near-opt", "--n", "50", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["m,n", "1,29", "2,25", "3,23", "4,22"]


def test_byte_identical_output(capsys):
    outs = {call(capsys, "solve", "--n", "30", "--precision", "8")[1] for _ in range(3)}
    assert len(outs) == 1


@pytest.mark.parametrize("argv", [
    ["solve"],
    ["solve", "--n", "2"],
    ["solve", "--n", "50", "--precision", "40"],
    ["oracle", "--n", "13"],
    ["simulate", "--n", "10", "--trials", "0"],
    ["tables", "--which", "nope"],
    ["frobnicate"],
    ["solve", "--n", "10", "--bogus"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(argv) == 2


def test_out_file(tmp_path, capsys):
    path = tmp_path / "q.csv"
    assert run(["tables", "--which", "q", "--n", "20", "--format", "csv", "--out", str(path)]) == 0
    assert capsys.readouterr().out == ""
    assert path.read_text().startswith("n,q\n9,")
    assert [p.name for p in tmp_path.iterdir()] == ["q.csv"]


def test_write_atomic_keeps_old_file_on_failure(tmp_path, monkeypatch):
    path = tmp_path / "out.txt"
    path.write_text("old")

    def boom(*a, **k):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        write_atomic(str(path), "new")
    assert path.read_text() == "old"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]


def test_rounding():
    assert _round(0.1234565, 6) == 0.123456
    assert _round(0.1234575, 6) == 0.123458
    assert _round(2.5e-7, 6) == 2.5e-7
    assert _round(1.174354e-6, 3) == 1.17e-6
    assert _round(0.0125, 2) == 0.01  # half-even
    with pytest.raises(ValueError):
        _round(float("nan"), 3)


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "stackstop", "near-opt", "--n", "20"], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["near_optimal"]["m0"] >= 1
    r = subprocess.run([sys.executable, "-m", "stackstop", "solve", "--n", "1"], capture_output=True, text=True)
    assert r.returncode == 2 and "error" in r.stderr
