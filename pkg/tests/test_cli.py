import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from trireduce.cli import analyze_report, default_torus_generator, main
from trireduce.states import save_state

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def run(*args):
    return main([str(a) for a in args])


def load(path):
    with open(path) as fh:
        return json.load(fh)


def test_analyze_ghz(tmp_path):
    assert run("analyze", "--catalog", "GHZ", "--out", tmp_path) == 2
    r = load(tmp_path / "analyze.json")
    assert np.abs(np.array([b["re"] for b in r["moment"]])).max() < 1e-15
    assert r["orbit_type"] == "CONTINUOUS_STABILIZER(2)"
    assert r["error"]["code"] == "ON_WALL"
    assert r["chamber_position"] == "WALL" and r["polytope_position"] == "BOUNDARY"
    assert r["local_model"] is None
    assert r["tolerances"]["rank"] == 1e-9


def test_analyze_haar(tmp_path):
    assert run("analyze", "--catalog", "HAAR_RANDOM", "--seed", 3, "--out", tmp_path) == 0
    r = load(tmp_path / "analyze.json")
    dims = r["local_model"]["dimensions"]
    assert (dims["orbit"], dims["level_set"], dims["torus"], dims["normal"]) == (9, 5, 3, 2)
    assert r["orbit_type"] == "PRINCIPAL" and r["error"] is None
    assert r["input"] == {"catalog": "HAAR_RANDOM", "seed": 3}
    assert max(r["local_model"]["residuals"].values()) < 1e-10
    assert r["local_model"]["vprime_diagnostic"]["discrepancy"] == 3


def test_analyze_state_file(tmp_path):
    path = tmp_path / "prod.json"
    save_state(np.eye(8)[0], path)
    assert run("analyze", "--state", path, "--out", tmp_path) == 2
    r = load(tmp_path / "analyze.json")
    assert r["error"]["code"] == "NOT_PRINCIPAL"
    assert r["polytope_position"] == "BOUNDARY"
    assert r["stabilizer_dim"] == 3


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"amplitudes": [[1, 0]]}')
    assert run("analyze", "--state", bad, "--out", tmp_path) == 1
    assert run("analyze", "--state", tmp_path / "missing.json", "--out", tmp_path) == 1
    assert run("analyze", "--catalog", "NOPE", "--out", tmp_path) == 1
    assert run("analyze", "--catalog", "GHZ", "--state", bad, "--out", tmp_path) == 1
    assert run("frobnicate") == 1
    assert run("flow", "--dt", "-1", "--out", tmp_path) == 1
    assert run("sample", "--samples", 0, "--out", tmp_path) == 1
    bad.write_text("[{}]")
    assert run("sample", "--samples", 3, "--facets", bad, "--out", tmp_path) == 1
    assert "error" in capsys.readouterr().err


def test_flow_fixed_torus(tmp_path):
    assert run("flow", "--catalog", "HAAR_RANDOM", "--seed", 5, "--policy", "fixed",
               "--dt", 1e-3, "--duration", 1.0, "--stride", 10, "--out", tmp_path) == 0
    s = load(tmp_path / "summary.json")
    assert s["max_moment_drift"] < 1e-12 and s["hamiltonian_drift"] < 1e-12
    rows = list(csv.reader(open(tmp_path / "trajectory.csv")))
    assert len(rows) == 102 and rows[0][0] == "t"
    assert np.allclose(default_torus_generator(), np.diag(np.diag(default_torus_generator())))


def test_flow_generator_file(tmp_path, rng):
    M = rng.standard_normal((8, 8))
    gen = tmp_path / "F.json"
    gen.write_text(json.dumps({"re": (M + M.T).tolist(), "im": np.zeros((8, 8)).tolist()}))
    assert run("flow", "--policy", "fixed", "--generator", gen, "--dt", 0.1,
               "--duration", 1.0, "--out", tmp_path) == 0
    assert load(tmp_path / "summary.json")["hamiltonian_drift"] < 1e-12
    gen.write_text(json.dumps({"re": M.tolist(), "im": np.zeros((8, 8)).tolist()}))
    assert run("flow", "--policy", "fixed", "--generator", gen, "--out", tmp_path) == 1


@pytest.mark.parametrize("seed, policy", [(11, "normal1"), (3, "normal2")])
def test_flow_matches_golden(tmp_path, seed, policy):
    golden = os.path.join(GOLDEN, f"flow_seed{seed}_{policy}.json")
    code = run("flow", "--catalog", "HAAR_RANDOM", "--seed", seed, "--policy", policy,
               "--dt", 5e-3, "--duration", 0.5, "--out", tmp_path, "--golden", golden)
    assert code == 0


def test_flow_golden_mismatch_and_bless(tmp_path):
    ref = load(os.path.join(GOLDEN, "flow_seed11_normal1.json"))
    ref["max_spectra_drift"] *= 1.001
    path = tmp_path / "g.json"
    path.write_text(json.dumps(ref))
    args = ["flow", "--catalog", "HAAR_RANDOM", "--seed", 11, "--dt", 5e-3,
            "--duration", 0.5, "--out", tmp_path, "--golden", path]
    assert run(*args) == 1
    assert run(*args, "--bless") == 0
    assert run(*args) == 0


def test_flow_halvings(tmp_path):
    assert run("flow", "--catalog", "HAAR_RANDOM", "--seed", 11, "--dt", 2e-2,
               "--duration", 0.2, "--halvings", 2, "--out", tmp_path) == 0
    conv = load(tmp_path / "summary.json")["convergence"]
    steps = [p["steps"] for p in conv["points"]]
    assert steps == [10, 20, 40]
    assert len(conv["ratios"]) == 2 and min(conv["ratios"]) >= 1.8


def test_flow_precondition(tmp_path):
    assert run("flow", "--catalog", "GHZ", "--policy", "normal1", "--out", tmp_path) == 2
    assert run("flow", "--catalog", "W", "--policy", "normal2", "--out", tmp_path) == 2


def test_sample(tmp_path):
    assert run("sample", "--samples", 300, "--seed", 40, "--out", tmp_path) == 0
    rows = list(csv.DictReader(open(tmp_path / "samples.csv")))
    assert [int(r["seed"]) for r in rows] == list(range(40, 340))
    lam = np.array([[float(r[f"lam{k}"]) for k in (1, 2, 3)] for r in rows])
    assert lam.min() >= 0.5 and lam.max() <= 1
    assert all(r["position"] in ("INTERIOR", "BOUNDARY") for r in rows)
    s = load(tmp_path / "sample_summary.json")
    assert s["facet_violations"] == 0 and s["positions"]["OUTSIDE"] == 0
    assert s["stabilizer_dims"] == {"0": 300}


def test_outputs_are_byte_identical(tmp_path):
    for sub in ("a", "b"):
        out = tmp_path / sub
        run("analyze", "--catalog", "HAAR_RANDOM", "--seed", 9, "--out", out)
        run("sample", "--samples", 50, "--seed", 9, "--out", out)
        run("flow", "--catalog", "HAAR_RANDOM", "--seed", 9, "--dt", 1e-2,
            "--duration", 0.1, "--out", out)
    for name in ("analyze.json", "samples.csv", "sample_summary.json", "summary.json",
                 "trajectory.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_analyze_report_function():
    r = analyze_report(np.eye(8)[0])
    assert r["spectra"] == [1.0, 1.0, 1.0]
    assert r["three_tangle"] == 0


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "trireduce", "analyze", "--catalog", "W",
                          "--out", str(tmp_path)], capture_output=True, text=True)
    assert out.returncode == 2
    assert "NOT_PRINCIPAL" in out.stderr
