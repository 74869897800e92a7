"""Acceptance criteria, each run at its stated tolerance.

Every test records a one-line verdict that is printed in the terminal
summary.  Criteria that cannot be met are reported as FAIL and marked
expected-to-fail with the measured value, rather than relaxed.
"""
import json
import math
import os

import numpy as np
import pytest

from conftest import write_abalone_like
from floquet_elm.config import DomainConfig
from floquet_elm.experiments import ExperimentConfig, rerun_manifest, run_experiment
from floquet_elm.floquet import extract_harmonics_matrix
from floquet_elm.learners import softmax_grad, softmax_loss, train_linear
from floquet_elm.physics import SourceArray, build_domain, run
from test_physics_verification import (harmonic_magnitudes, measure_pml_reflection_db, measure_pulse_speed,
                                       sideband_floor_db)

ABALONE_ENV = "FLOQUET_ELM_ABALONE"


@pytest.fixture(scope="module")
def runs(tmp_path_factory):
    """Default-configuration runs, each written with its manifest; computed once."""
    root = tmp_path_factory.mktemp("acceptance")
    cache = {}

    def get(name, cfg=None):
        if name not in cache:
            cache[name] = run_experiment(name, cfg or ExperimentConfig(), out_dir=root / name)
        return cache[name]
    return get


def test_criterion_1_floquet_phase_law(criterion):
    cfg = DomainConfig()
    d = build_domain(cfg, scatterers=False)
    w1, _ = cfg.carriers(0)
    g = d.grid
    t = np.arange(g.n_steps) * g.dt
    src = SourceArray(np.outer(np.full(d.n_sources, 0.5), np.sin(w1 * t)))
    skip = int(cfg.harmonics.skip_fraction * g.n_steps)

    def amps(phi):
        rec = run(d, src, d.slab.with_phase(phi))
        return extract_harmonics_matrix(rec.data, g.dt, w1, cfg.omega_m, 2, skip, cfg.harmonics.window)

    a0 = amps(0.0)
    worst_deg, worst_mag = 0.0, 0.0
    for phi in (math.pi / 4, math.pi / 2, math.pi):
        a = amps(phi)
        for n in (-2, -1, 1, 2):
            r = a[:, n + 2] / a0[:, n + 2]
            worst_deg = max(worst_deg, float(np.degrees(np.abs(np.angle(r * np.exp(-1j * n * phi)))).max()))
            worst_mag = max(worst_mag, float(np.abs(np.abs(r) - 1).max()))
    ok = worst_deg < 2.0 and worst_mag < 0.01
    criterion(1, "Floquet phase law", ok, f"max phase error {worst_deg:.3g} deg, max magnitude change {worst_mag:.2e}")
    assert ok


def test_criterion_2_entanglement_dichotomy(criterion, runs):
    res, _ = runs("fig2-entanglement")
    m = res.metrics
    levels = ExperimentConfig().fig2.levels
    ok = (levels == 20 and m["r2_static"] > 0.999 and m["r2_entangled"] < 0.9
          and m["sign_changes_entangled"] >= 2)
    criterion(2, "static linear / entangled non-monotone", ok,
              f"R2 static {m['r2_static']:.6f}, R2 entangled {m['r2_entangled']:.3f}, "
              f"slope sign changes {m['sign_changes_entangled']}, levels {levels}")
    assert ok


def test_criterion_3_function_regression(criterion, runs):
    res, _ = runs("fig3-functions")
    m = res.metrics
    # non-increasing up to floating-point noise of the least-squares solve
    tol = {n: 1e-9 * max(m[f"rmse_mean_{n}"]) for n in ("y1", "y2", "y3")}
    monotone = all(m[f"max_rmse_increase_{n}"] <= tol[n] for n in tol)
    y3 = m["rmse_max_harmonics_y3"]
    ok = monotone and y3 <= 0.05
    criterion(3, "nonlinear function regression", ok,
              f"y3 RMSE at 5 harmonics {y3:.4f} (threshold 0.05); mean RMSE non-increasing: {monotone}; "
              + ", ".join(f"{n} {m[f'rmse_max_harmonics_{n}']:.4f}" for n in ("y1", "y2")))
    assert monotone
    if not ok:
        pytest.xfail(f"y3 RMSE {y3:.4f} exceeds 0.05: with a scalar input and a phase linear in it, "
                     "the intensity features span only four functions of the input")


def test_criterion_4_abalone(criterion, runs):
    path = os.environ.get(ABALONE_ENV)
    if not path or not os.path.isfile(path):
        criterion(4, "abalone regression", False, f"data not available; set {ABALONE_ENV} to the abalone file")
        pytest.xfail(f"abalone file not available offline (set {ABALONE_ENV})")
    res, _ = runs("fig4-abalone")
    m = res.metrics
    ok = m["test_rmse"] <= 0.10
    criterion(4, "abalone regression", ok,
              f"normalized test RMSE {m['test_rmse']:.4f} (threshold 0.10, reference {m['reference_rmse']})")
    assert ok


def test_criterion_5_parallel_classification(criterion, runs):
    res, _ = runs("fig5-parallel")
    m = res.metrics
    ok = (m["n_samples"] == 2000 and m["digits_test_accuracy"] >= 0.80
          and m["isolation_relative_change"] < 1e-3)
    criterion(5, "two-band parallel classification", ok,
              f"digit accuracy {m['digits_test_accuracy']:.3f}, second task ({m['xray_source']}) "
              f"{m['xray_test_accuracy']:.3f}, isolation {m['isolation_relative_change']:.2e}")
    assert ok


def test_criterion_6_mackey_glass(criterion, runs):
    cfg = ExperimentConfig()
    assert cfg.mg.reservoir.n_nodes == 75 and cfg.mg.T_train == 400
    r6, _ = runs("fig6-mg-train")
    r7, _ = runs("fig7-mg-forecast")
    one = r6.metrics["one_step_nrmse"]
    steps = r7.metrics["valid_steps"]
    portrait = r6.curves["phase_portrait_prediction"][1]
    ok = one <= 0.02 and steps >= 50 and portrait.shape[1] == 2 and len(portrait) > 0
    criterion(6, "Mackey-Glass reservoir", ok,
              f"one-step NRMSE {one:.4f}, valid forecast {steps} steps (divergence onset {r7.metrics['divergence_onset']}), "
              f"median over seeds {r7.metrics['median_valid_steps']}")
    assert ok


def test_criterion_7_numerical_properties(criterion):
    rng = np.random.default_rng(7)
    checks = {}

    X, y, lam = rng.normal(size=(200, 12)), rng.normal(size=200), 1e-3
    W = train_linear(X, y, lam).W
    checks["ridge residual"] = (np.linalg.norm(X.T @ (X @ W - y) + lam * W)
                                / np.linalg.norm(X.T @ y), 1e-8)

    Xs, labels, Ws = rng.normal(size=(50, 6)), rng.integers(0, 4, 50), rng.normal(size=(6, 4))
    G = softmax_grad(Ws, Xs, labels)
    num = np.zeros_like(Ws)
    for idx in np.ndindex(Ws.shape):
        e = np.zeros_like(Ws)
        e[idx] = 1e-6
        num[idx] = (softmax_loss(Ws + e, Xs, labels) - softmax_loss(Ws - e, Xs, labels)) / 2e-6
    checks["softmax gradient"] = (np.abs(num - G).max() / np.abs(G).max(), 1e-5)

    a, b = rng.normal(size=(2, 9000))
    A = extract_harmonics_matrix(np.c_[a, b, 3 * a - 2 * b], 1 / 60, 2 * math.pi, 2 * math.pi / 65, 5, 2000)
    checks["extraction linearity"] = (np.abs(A[2] - 3 * A[0] + 2 * A[1]).max() / np.abs(A).max(), 1e-12)

    checks["pulse speed |v/c - 1|"] = (abs(measure_pulse_speed() - 1.0), 0.01)
    checks["PML reflection dB"] = (measure_pml_reflection_db(), -40.0)
    checks["sideband floor dB"] = (sideband_floor_db(*harmonic_magnitudes(0.0)), -40.0)

    ok = all(v < lim for v, lim in checks.values())
    criterion(7, "numerical property suite", ok, "; ".join(f"{k} {v:.3g} < {lim:g}" for k, (v, lim) in checks.items()))
    assert ok


def test_criterion_8_manifest_determinism(criterion, runs, tmp_path, monkeypatch):
    monkeypatch.setenv(ABALONE_ENV, os.environ.get(ABALONE_ENV) or str(write_abalone_like(tmp_path / "a.data")))
    names = ("fig2-entanglement", "fig3-functions", "fig4-abalone", "fig5-parallel", "fig6-mg-train",
             "fig7-mg-forecast")
    differing = []
    for name in names:
        _, manifest = runs(name)
        recorded, reproduced = rerun_manifest(manifest)
        if recorded != reproduced or recorded != json.loads(manifest.read_text())["metrics"]:
            differing.append(name)
    ok = not differing
    criterion(8, "manifest reruns reproduce metrics", ok,
              f"{len(names) - len(differing)}/{len(names)} experiments identical"
              + (f"; differing: {', '.join(differing)}" if differing else ""))
    assert ok
