import json
import math

import numpy as np
import pytest

from tfwave.cli import main
from tfwave.fileio import read_observation_csv


def run(argv):
    return main(argv)


def read_csv_columns(path):
    rows = []
    header = None
    for line in path.read_text().splitlines():
        if line.startswith("#") or not line.strip():
            continue
        if header is None:
            header = line.split(",")
            continue
        rows.append([float(x) if x else math.nan for x in line.split(",")])
    return header, np.asarray(rows)


SIM_CONFIG = {
    "alpha": 1.5,
    "provider": {"kind": "dirichlet_laplacian_1d", "n_modes": 4,
                 "length": math.pi},
    "grid": {"T": 6.0, "nodes": 64},
    "u0": [math.sqrt(math.pi / 2.0)],
    "x0": math.pi / 2.0,
}


def test_ml_eval_table(tmp_path):
    out = tmp_path / "ml"
    assert run(["ml-eval", "--alpha", "2.0", "--t-max", str(2 * math.pi),
                "--num", "9", "--out", str(out)]) == 0
    header, rows = read_csv_columns(out / "ml_curves_alpha2.csv")
    assert header == ["t", "ml_alpha_1", "t_ml_alpha_2"]
    assert rows[0][1] == pytest.approx(1.0, abs=1e-12)       # t = 0 row: (1, 0)
    assert rows[0][2] == 0.0
    assert rows[4][0] == pytest.approx(math.pi, rel=1e-12)   # t = pi row
    assert rows[4][1] == pytest.approx(-1.0, abs=1e-12)
    assert abs(rows[4][2]) <= 1e-12


def test_ml_eval_zero_crossing_scan(tmp_path):
    out = tmp_path / "mlz"
    assert run(["ml-eval", "--alpha", "1.5", "--t-max", "20", "--num", "2001",
                "--out", str(out)]) == 0
    _, rows = read_csv_columns(out / "ml_curves_alpha1.5.csv")
    e1 = rows[:, 1]
    assert np.any(e1[:-1] * e1[1:] < 0.0)   # crosses zero on (0, 20)


def test_ml_eval_explicit_z(tmp_path):
    out = tmp_path / "mlv"
    assert run(["ml-eval", "--alpha", "1.0", "--beta", "1.0",
                "--z", "-2.0", "--z", "0.0", "--out", str(out)]) == 0
    _, rows = read_csv_columns(out / "ml_values_alpha1.csv")
    assert rows[0][1] == pytest.approx(math.exp(-2.0), rel=1e-13)
    assert rows[1][1] == pytest.approx(1.0, abs=1e-14)


def test_simulate_outputs_and_determinism(tmp_path):
    cfg = tmp_path / "sim.json"
    cfg.write_text(json.dumps(SIM_CONFIG))
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run(["simulate", "--config", str(cfg), "--out", str(out1)]) == 0
    assert run(["simulate", "--config", str(cfg), "--out", str(out2)]) == 0
    for name in ("history.csv", "trajectory.csv", "meta.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    header, rows = read_csv_columns(out1 / "history.csv")
    assert header[0] == "t" and len(header) == 5
    assert rows.shape == (65, 5)
    # u0 = sin x: single-mode cosine-like start u(x0, 0) = 1
    _, traj = read_csv_columns(out1 / "trajectory.csv")
    assert traj[0][1] == pytest.approx(1.0, rel=1e-12)


def test_simulate_schema_rejection(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({**SIM_CONFIG, "surprise": 1}))
    assert run(["simulate", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 2
    cfg.write_text(json.dumps({"alpha": 1.5}))
    assert run(["simulate", "--config", str(cfg), "--out", str(tmp_path / "y")]) == 2


def test_simulate_source_mode(tmp_path):
    cfg = dict(SIM_CONFIG)
    del cfg["u0"]
    cfg["source"] = {"rho": {"kind": "sin"}, "f": [1.0]}
    p = tmp_path / "src.json"
    p.write_text(json.dumps(cfg))
    out = tmp_path / "srcout"
    assert run(["simulate", "--config", str(p), "--out", str(out)]) == 0
    assert (out / "history.csv").exists()


def test_asymptotics_report(tmp_path):
    cfg = {
        "alpha": 1.5,
        "provider": {"kind": "dirichlet_laplacian_1d", "n_modes": 4,
                     "length": math.pi},
        "u0": [1.0],
        "x0": math.pi / 2.0,
        "window": [1e2, 1e4],
        "points": 40,
    }
    p = tmp_path / "asym.json"
    p.write_text(json.dumps(cfg))
    out = tmp_path / "asym"
    assert run(["asymptotics", "--config", str(p), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["stabilized_sign"] == -1
    assert report["sign_agrees"] is True
    assert report["fitted_norm_slope"] == pytest.approx(-1.5, abs=0.05)
    assert report["fitted_remainder_slope"] == pytest.approx(-4.5, abs=0.2)
    assert "config_sha256" in report["meta"]


def test_invert_synthetic_noise_free(tmp_path):
    cfg = {
        "alpha": 1.5,
        "provider": {"kind": "dirichlet_laplacian_1d", "n_modes": 8,
                     "length": math.pi},
        "grid": {"T": math.pi, "nodes": 512},
        "f": [1.0, 0.0, 0.5],
        "x0": math.pi / 2.0,
        "synthetic": {"rho": {"kind": "sin"}},
    }
    p = tmp_path / "inv.json"
    p.write_text(json.dumps(cfg))
    out = tmp_path / "inv"
    assert run(["invert", "--config", str(p), "--out", str(out)]) == 0
    result = json.loads((out / "result.json").read_text())
    assert result["relative_l2_error"] <= 1e-2
    assert result["kinv_nonzero_check"] is True
    ts, rho = read_observation_csv(out / "rho.csv")
    assert len(ts) == 512
    assert np.max(np.abs(rho - np.sin(ts))) <= 0.05


def test_invert_observation_csv_roundtrip(tmp_path):
    # generate an observation, then invert it from the file interface
    gen = {
        "alpha": 1.5,
        "provider": {"kind": "dirichlet_laplacian_1d", "n_modes": 8,
                     "length": math.pi},
        "grid": {"T": math.pi, "nodes": 256},
        "f": [1.0],
        "x0": math.pi / 2.0,
        "synthetic": {"rho": {"kind": "const", "value": 1.0}},
    }
    p = tmp_path / "gen.json"
    p.write_text(json.dumps(gen))
    out1 = tmp_path / "gen_out"
    assert run(["invert", "--config", str(p), "--out", str(out1)]) == 0

    inv = {k: gen[k] for k in ("alpha", "provider", "f", "x0")}
    inv["observation_csv"] = str(out1 / "observation.csv")
    p2 = tmp_path / "from_csv.json"
    p2.write_text(json.dumps(inv))
    out2 = tmp_path / "csv_out"
    assert run(["invert", "--config", str(p2), "--out", str(out2)]) == 0
    ts, rho = read_observation_csv(out2 / "rho.csv")
    assert np.max(np.abs(rho - 1.0)) <= 0.05


def test_census_table(tmp_path):
    cfg = {
        "alphas": [1.2, 1.4, 1.6, 1.8, 2.0],
        "provider": {"kind": "dirichlet_laplacian_1d", "n_modes": 4,
                     "length": math.pi},
        "u0": [1.0],
        "x0": math.pi / 2.0,
        "T": 30.0,
        "nodes": 2048,
    }
    p = tmp_path / "census.json"
    p.write_text(json.dumps(cfg))
    out = tmp_path / "census"
    assert run(["census", "--config", str(p), "--out", str(out)]) == 0
    header, rows = read_csv_columns(out / "census.csv")
    assert header == ["alpha", "sign_changes", "onset_estimate"]
    assert rows.shape[0] == 5
    assert np.all(rows[:, 1] >= 0)


def test_flag_overrides(tmp_path):
    cfg = tmp_path / "sim.json"
    cfg.write_text(json.dumps(SIM_CONFIG))
    out = tmp_path / "o"
    assert run(["simulate", "--config", str(cfg), "--alpha", "1.7",
                "--grid-nodes", "32", "--out", str(out)]) == 0
    meta = json.loads((out / "meta.json").read_text())
    assert meta["config"]["alpha"] == 1.7
    assert meta["config"]["grid"]["nodes"] == 32
