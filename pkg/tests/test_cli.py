"""Command-line interface: round trips, exit codes, reproducibility."""

import json
import os

import pytest

from plandsf.cli import main
from tests.conftest import PATH3_JSON, TRIANGLE_JSON


@pytest.fixture
def tri_file(tmp_path):
    p = tmp_path / "triangle.json"
    p.write_text(TRIANGLE_JSON)
    return str(p)


@pytest.fixture
def path3_file(tmp_path):
    p = tmp_path / "path3.json"
    p.write_text(PATH3_JSON)
    return str(p)


def test_gen_grid_round_trip(tmp_path, capsys):
    out = str(tmp_path / "inst.json")
    rc = main(["gen", "--gen", "grid", "--rows", "3", "--cols", "3",
               "--orientation-seed", "4", "--pair-seed", "9", "--k", "2",
               "--out", out])
    assert rc == 0
    doc = json.loads(open(out).read())
    assert len(doc["vertices"]) == 9
    assert len(doc["pairs"]) == 2


def test_gen_is_reproducible(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        out = str(tmp_path / name)
        rc = main(["gen", "--gen", "layered", "--width", "3", "--layers",
                   "3", "--graph-seed", "5", "--pair-seed", "6", "--k", "2",
                   "--out", out])
        assert rc == 0
        outs.append(open(out, "rb").read())
    assert outs[0] == outs[1]


def test_gen_missing_seed_is_usage_error():
    assert main(["gen", "--gen", "grid", "--pair-seed", "1"]) == 2
    assert main(["gen", "--gen", "layered", "--pair-seed", "1"]) == 2


def test_unknown_subcommand_is_usage_error():
    assert main(["frobnicate"]) == 2
    assert main([]) == 2


def test_solve_verify_round_trip(tmp_path, tri_file):
    sol = str(tmp_path / "sol.json")
    assert main(["solve", "--in", tri_file, "--out", sol]) == 0
    assert main(["verify", "--in", tri_file, "--solution", sol]) == 0


def test_solve_trace_and_oracle_report(tmp_path, tri_file):
    sol = str(tmp_path / "sol.json")
    trace = str(tmp_path / "trace.json")
    report = str(tmp_path / "report.json")
    rc = main(["solve", "--in", tri_file, "--out", sol, "--trace", trace,
               "--oracle", "--report", report])
    assert rc == 0
    tdoc = json.loads(open(trace).read())
    assert tdoc["total_cost"] == "4"
    assert len(tdoc["iterations"]) == 2
    rdoc = json.loads(open(report).read())
    assert rdoc["ratio"] == "1"
    assert rdoc["accounting_ok"] is True


def test_solve_reruns_byte_identical(tmp_path, tri_file):
    sols = []
    for name in ("s1.json", "s2.json"):
        out = str(tmp_path / name)
        assert main(["solve", "--in", tri_file, "--out", out]) == 0
        sols.append(open(out, "rb").read())
    assert sols[0] == sols[1]


def test_verify_rejects_corrupted_solution(tmp_path, tri_file):
    sol = str(tmp_path / "sol.json")
    assert main(["solve", "--in", tri_file, "--out", sol]) == 0
    doc = json.loads(open(sol).read())
    doc["edges"] = doc["edges"][:1]
    bad = str(tmp_path / "bad.json")
    open(bad, "w").write(json.dumps(doc))
    assert main(["verify", "--in", tri_file, "--solution", bad]) == 1


def test_junction_outputs_tree_and_ledger(tmp_path, tri_file):
    out = str(tmp_path / "junction.json")
    assert main(["junction", "--in", tri_file, "--out", out]) == 0
    doc = json.loads(open(out).read())
    assert doc["tree"]["root"] == "a"
    assert doc["tree"]["density"] == "1"
    assert doc["ledger"]["density_ok"] is True


def test_oracle_modes(tmp_path, tri_file, path3_file):
    out = str(tmp_path / "o.json")
    assert main(["oracle", "--in", tri_file, "--mode", "dsf",
                 "--out", out]) == 0
    assert json.loads(open(out).read())["opt_cost"] == "4"
    assert main(["oracle", "--in", tri_file, "--mode", "density",
                 "--out", out]) == 0
    doc = json.loads(open(out).read())
    assert doc["root"] == "a" and doc["density"] == "1"
    assert main(["oracle", "--in", path3_file, "--mode", "dst",
                 "--root", "u", "--terminals", "w", "--out", out]) == 0
    assert json.loads(open(out).read())["opt_cost"] == "2"


def test_oracle_dst_requires_root_and_terminals(tri_file):
    assert main(["oracle", "--in", tri_file, "--mode", "dst"]) == 1


def test_replay_proof_round_trip(tmp_path, tri_file):
    sol = str(tmp_path / "sol.json")
    out = str(tmp_path / "replay.json")
    assert main(["solve", "--in", tri_file, "--out", sol]) == 0
    assert main(["replay-proof", "--in", tri_file, "--solution", sol,
                 "--out", out]) == 0
    doc = json.loads(open(out).read())
    assert doc["ledger"]["ok"] is True
    assert doc["tree"]["density"] is not None


def test_missing_file_is_domain_error(tmp_path):
    assert main(["solve", "--in", str(tmp_path / "absent.json")]) == 1


def test_bench_writes_csv_and_figures(tmp_path):
    csv_path = str(tmp_path / "bench.csv")
    figs = str(tmp_path / "figs")
    rc = main(["bench", "--gen", "grid", "--rows", "3", "--cols", "3",
               "--k", "2", "--seeds", "1..3", "--oracle",
               "--dst-strategy", "shortest-path-union",
               "--out-csv", csv_path, "--fig-dir", figs])
    assert rc == 0
    lines = open(csv_path).read().strip().splitlines()
    assert lines[0].startswith("seed,")
    assert len(lines) == 4
    assert {f for f in os.listdir(figs)} >= {"costs.png"}


def test_bench_is_reproducible(tmp_path):
    outs = []
    for name in ("b1.csv", "b2.csv"):
        csv_path = str(tmp_path / name)
        rc = main(["bench", "--gen", "grid", "--rows", "3", "--cols", "3",
                   "--k", "2", "--seeds", "2,5",
                   "--dst-strategy", "shortest-path-union",
                   "--out-csv", csv_path,
                   "--fig-dir", str(tmp_path / ("f" + name))])
        assert rc == 0
        outs.append(open(csv_path, "rb").read())
    assert outs[0] == outs[1]
