import csv
import json

import pytest

from paritytrack.cli import main, parse_grid, UsageError


def _read(p):
    with open(p, newline="") as fh:
        return list(csv.DictReader(fh))


def test_simulate_writes_outputs(tmp_path):
    rc = main(["simulate", "--filter", "halfbox", "--mutau", "1e-3", "--auto-params", "--trials", "600", "--seed", "7", "--out-dir", str(tmp_path)])
    assert rc == 0
    stem = "simulate_halfbox_mutau0.001_seed7"
    rows = _read(tmp_path / f"{stem}.csv")
    assert list(rows[0]) == ["t_over_tau", "f_mean", "stderr", "n_trials"]
    summary = json.loads((tmp_path / f"{stem}.json").read_text())
    for key in ("filter", "mutau", "params", "delta_f_in", "gamma_tau", "fit_window", "residual_rms"):
        assert key in summary
    man = json.loads((tmp_path / "simulate_halfbox_mutau0.001_seed7.manifest.json").read_text())
    assert man["seed"] == 7 and man["version"] and "simulate_halfbox_mutau0.001_seed7.csv" in man["outputs"]


def test_simulate_deterministic(tmp_path):
    args = ["simulate", "--filter", "boxcar", "--mutau", "2e-3", "--dt-box", "6", "--trials", "700", "--seed", "3"]
    assert main(args + ["--out-dir", str(tmp_path / "a"), "--workers", "1"]) == 0
    assert main(args + ["--out-dir", str(tmp_path / "b"), "--workers", "4"]) == 0
    name = "simulate_boxcar_mutau0.002_seed3.csv"
    assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--filter", "bayes", "--mutau", "1e-3", "--trials", "0"],
        ["simulate", "--filter", "boxcar", "--mutau", "1e-3"],
        ["simulate", "--filter", "bayes", "--mutau", "1e-3", "--dt-box", "5"],
        ["simulate", "--filter", "kalman", "--mutau", "1e-3"],
        ["simulate", "--filter", "bayes"],
        ["simulate", "--filter", "bayes", "--mutau", "1e-3", "--dt-substep", "7"],
        ["optimize", "--filter", "bayes", "--mutau", "1e-3"],
        ["optimize", "--filter", "double", "--mutau-grid", "1e-3"],
        ["figures", "--which", "fig9"],
    ],
)
def test_usage_errors(argv, tmp_path, capsys):
    assert main(argv + ["--out-dir", str(tmp_path)]) == 2


def test_infeasible_exit_code(tmp_path):
    assert main(["optimize", "--filter", "boxcar", "--mutau", "0.09", "--out-dir", str(tmp_path)]) == 3
    assert main(["simulate", "--filter", "boxcar", "--mutau", "0.09", "--auto-params", "--out-dir", str(tmp_path)]) == 3


def test_optimize_grid_csv(tmp_path):
    assert main(["optimize", "--filter", "double", "--mutau-grid", "1e-6:1e-3:4", "--out-dir", str(tmp_path)]) == 0
    rows = _read(tmp_path / "optimize_double.csv")
    assert len(rows) == 4
    for col in ("mutau", "dt_over_tau", "a", "t_max", "delta_f_in", "gamma_tau", "feasible"):
        assert col in rows[0]
    # threshold falls as the rate rises
    a = [float(r["a"]) for r in rows]
    assert a == sorted(a, reverse=True)


def test_formulas_csv(capsys):
    assert main(["formulas", "--mutau", "1e-3", "--format", "csv"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    half = [r for r in rows if r["source"] == "optimized" and r["filter"] == "halfbox"][0]
    assert float(half["gamma_tau"]) == pytest.approx(3.6e-5, rel=0.05)
    assert {r["source"] for r in rows} >= {"scaling_law", "ancilla_idealistic"}


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"filter": "double", "mutau": 1e-3, "auto-params": True, "trials": 10**6, "seed": 5}))
    assert main(["simulate", "--config", str(cfg), "--trials", "300", "--out-dir", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "simulate_double_mutau0.001_seed5.json").read_text())
    assert summary["n_trials"] == 300
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["simulate", "--config", str(cfg), "--filter", "bayes", "--mutau", "1e-3"]) == 2


def test_sweep_sources(tmp_path):
    assert main(["sweep", "--filters", "bayes,halfbox", "--mutau-grid", "5e-4:1e-3:2", "--trials", "200", "--out-dir", str(tmp_path)]) == 0
    rows = _read(tmp_path / "sweep.csv")
    assert {r["source"] for r in rows} == {"sim", "theory_full", "theory_crude"}
    assert len([r for r in rows if r["source"] == "sim"]) == 4


def test_figures(tmp_path):
    rc = main(["figures", "--which", "fig2,fig5b,fig5d", "--trials", "100", "--sim-grid", "1e-3:1e-3:1", "--mutau-grid", "1e-5:1e-3:3", "--svg", "--out-dir", str(tmp_path)])
    assert rc == 0
    for name in ("fig2_top.csv", "fig2_bottom.csv", "fig5b.csv", "fig5d.csv", "fig5d.svg", "figures.manifest.json"):
        assert (tmp_path / name).exists()
    rows = _read(tmp_path / "fig2_bottom.csv")
    assert {"t_over_tau", "true", "estimate", "p0", "p7"} <= set(rows[0])


def test_parse_grid():
    g = parse_grid("1e-6:1e-3:4")
    assert len(g) == 4 and g[0] == pytest.approx(1e-6) and g[-1] == pytest.approx(1e-3)
    with pytest.raises(UsageError):
        parse_grid("1:2")
