"""Experiment runners, result files and command-line behaviour on reduced configurations."""
import json
import subprocess
import sys

import numpy as np
import pytest
import yaml

from floquet_elm.cli import main
from floquet_elm.experiments import (REGISTRY, DataUnavailable, load_config, read_curve, rerun_manifest,
                                     run_experiment)

SMALL = {
    "domain": {"grid": {"cells_per_wavelength": 12, "n_steps": 4000}},
    "fig2": {"cells_per_wavelength": 12, "levels": 5, "surface_points": 11},
    "fig3": {"n_samples": 200, "n_seeds": 2, "max_harmonics": 3},
    "fig4": {"n_nodes": 10},
    "fig5": {"n_digits": 300, "n_nodes": 20, "epochs": 30},
    "mg": {"length": 900, "horizon": 60, "spread_seeds": 2, "reservoir": {"n_nodes": 30}},
}


@pytest.fixture
def small_yaml(tmp_path):
    p = tmp_path / "small.yaml"
    p.write_text(yaml.safe_dump(SMALL))
    return p


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert all(name in out for name in REGISTRY)


def test_validate_config(tmp_path, small_yaml, capsys):
    assert main(["validate-config", str(small_yaml)]) == 0
    bad = tmp_path / "bad.yaml"
    bad.write_text("domain:\n  grid:\n    courant: 0.8\n")
    assert main(["validate-config", str(bad)]) == 1
    assert "domain.grid.courant" in capsys.readouterr().out
    bad.write_text("fig5:\n  epochz: 3\n")
    assert main(["validate-config", str(bad)]) == 1
    assert "fig5.epochz" in capsys.readouterr().out


def test_exit_codes(tmp_path, small_yaml, monkeypatch):
    monkeypatch.delenv("FLOQUET_ELM_ABALONE", raising=False)
    assert main(["run", "fig9", "--out", str(tmp_path)]) == 1
    assert main(["run", "fig3-functions", "--config", str(tmp_path / "missing.yaml")]) == 1
    assert main(["run", "fig3-functions", "--jobs", "0"]) == 1
    assert main(["run", "fig4-abalone", "--config", str(small_yaml), "--out", str(tmp_path)]) == 2
    diverge = tmp_path / "div.yaml"
    diverge.write_text(yaml.safe_dump({**SMALL, "fig5": {**SMALL["fig5"], "lr": 1e308}}))
    assert main(["run", "fig5-parallel", "--config", str(diverge), "--out", str(tmp_path)]) == 2
    blow = tmp_path / "blow.yaml"
    blow.write_text(yaml.safe_dump({**SMALL, "domain": {**SMALL["domain"], "blowup_factor": 1e-6}}))
    assert main(["run", "fig2-entanglement", "--config", str(blow), "--out", str(tmp_path)]) == 2
    with pytest.raises(SystemExit):
        main(["run", "fig3-functions", "--backend", "analytic"])


def test_module_entry_point(small_yaml):
    r = subprocess.run([sys.executable, "-m", "floquet_elm", "validate-config", str(small_yaml)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "valid" in r.stdout


def test_run_writes_results_and_reruns(tmp_path, small_yaml, capsys):
    assert main(["run", "fig3-functions", "--config", str(small_yaml), "--out", str(tmp_path)]) == 0
    d = tmp_path / "fig3-functions"
    manifest = json.loads((d / "manifest.json").read_text())
    metrics = json.loads((d / "metrics.json").read_text())
    assert manifest["metrics"] == metrics
    assert manifest["backend"] == "surrogate" and manifest["config"]["fig3"]["n_samples"] == 200
    for name, digest in manifest["output_hashes"].items():
        assert len(digest) == 64 and (d / name).exists()
    header, rows = read_curve(next((d / "curves").glob("*.tsv")))
    assert rows.shape[1] == len(header)
    capsys.readouterr()
    assert main(["rerun", str(d / "manifest.json")]) == 0
    assert "identical" in capsys.readouterr().out


def test_rerun_reports_changed_metrics(tmp_path, small_yaml):
    cfg = load_config(small_yaml)
    _, path = run_experiment("fig6-mg-train", cfg, out_dir=tmp_path / "a")
    doc = json.loads(path.read_text())
    doc["metrics"]["one_step_nrmse"] = 123.0
    path.write_text(json.dumps(doc))
    recorded, reproduced = rerun_manifest(path)
    assert recorded["one_step_nrmse"] == 123.0 != reproduced["one_step_nrmse"]
    assert main(["rerun", str(path)]) == 2


def test_seed_override_changes_results(small_yaml):
    a, _ = run_experiment("fig3-functions", load_config(small_yaml, {"seed": 0}))
    b, _ = run_experiment("fig3-functions", load_config(small_yaml, {"seed": 1}))
    c, _ = run_experiment("fig3-functions", load_config(small_yaml, {"seed": 0}))
    assert a.metrics == c.metrics and a.metrics != b.metrics


def test_fig4_on_abalone_schema_fixture(abalone_csv, small_yaml, monkeypatch):
    monkeypatch.setenv("FLOQUET_ELM_ABALONE", str(abalone_csv))
    res, _ = run_experiment("fig4-abalone", load_config(small_yaml))
    spread = np.std(np.r_[res.curves["test_predictions"][1][:, 0]])
    assert res.metrics["n_train"] == 300 and res.metrics["n_test"] == 100
    assert res.metrics["test_rmse"] < spread
    monkeypatch.setenv("FLOQUET_ELM_ABALONE", str(abalone_csv) + ".missing")
    with pytest.raises(DataUnavailable):
        run_experiment("fig4-abalone", load_config(small_yaml))


def test_fig2_fdtd_parallel_matches_serial(small_yaml):
    cfg = load_config(small_yaml, {"fig2": {"levels": 3}})
    serial, _ = run_experiment("fig2-entanglement", cfg, jobs=1)
    parallel, _ = run_experiment("fig2-entanglement", cfg, jobs=2)
    assert serial.metrics == parallel.metrics


def test_fig5_isolation_and_outputs(small_yaml):
    res, _ = run_experiment("fig5-parallel", load_config(small_yaml))
    m = res.metrics
    assert m["isolation_relative_change"] < 1e-3
    for task in ("digits", "xray"):
        C = np.array(m[f"{task}_confusion"])
        assert C.sum() == 75
        assert np.trace(C) / 75 == pytest.approx(m[f"{task}_test_accuracy"])
