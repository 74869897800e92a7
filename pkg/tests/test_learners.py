"""Readouts, metrics, the delay-equation generator and the reservoir loop."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from floquet_elm.backends import SurrogateBackend
from floquet_elm.learners import (MackeyGlassParams, ReservoirConfig, ReservoirState, Standardizer,
                                  TrainingDivergence, accuracy, collect_states, confusion_matrix, feature_matrix,
                                  harmonic_selection, load_model, mackey_glass, nrmse, phase_portrait, predict,
                                  predict_proba, r_squared, rc_forecast, rc_predict_one_step, rc_step, rc_train,
                                  rmse, save_model, slope_sign_changes, softmax_grad, softmax_loss, train_linear,
                                  train_softmax, valid_horizon)
from floquet_elm.surrogate import SurrogateConfig

# --- metrics ---------------------------------------------------------------

def test_metric_values():
    assert rmse([1, 2, 3], [1, 2, 5]) == pytest.approx(math.sqrt(4 / 3))
    t = np.array([0.0, 1.0, 2.0, 3.0])
    assert nrmse(t + 0.1, t) == pytest.approx(0.1 / t.std())
    assert nrmse(t + 0.3, t, norm="range") == pytest.approx(0.1)
    with pytest.raises(ValueError):
        rmse([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        nrmse(t, t, norm="iqr")
    assert slope_sign_changes([0, 1, 2, 1, 0, 1]) == 2
    assert slope_sign_changes([0, 1, 1, 2]) == 0
    assert accuracy([1, 0, 2], [1, 1, 2]) == pytest.approx(2 / 3)
    assert np.array_equal(phase_portrait([1, 2, 3, 4], 2), [[3, 1], [4, 2]])


@given(arrays(np.float64, 20, elements=st.floats(-5, 5)), st.floats(-3, 3), st.floats(-3, 3))
def test_r_squared_matches_correlation(x, a, b):
    y = a * x + b + np.sin(7 * x)
    if np.ptp(x) < 1e-3 or np.std(y) < 1e-6:
        return
    assert r_squared(x, y) == pytest.approx(np.corrcoef(x, y)[0, 1] ** 2, abs=1e-8)


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=50))
def test_confusion_matrix_counts(pairs):
    labels, pred = map(np.array, zip(*pairs))
    C = confusion_matrix(pred, labels, 4)
    assert C.sum() == len(pairs)
    assert np.trace(C) == np.sum(pred == labels)
    assert np.array_equal(C.sum(axis=1), np.bincount(labels, minlength=4))


# --- features and linear readout ---------------------------------------------

def test_harmonic_selection_order():
    assert list(harmonic_selection(3, 1) - 3) == [0]
    assert list(harmonic_selection(3, 3) - 3) == [-1, 0, 1]
    assert list(harmonic_selection(3, 4) - 3) == [-1, 0, 1, 2]
    with pytest.raises(ValueError):
        harmonic_selection(2, 6)


def test_feature_matrix_layout(rng):
    A = rng.normal(size=(4, 3, 5)) + 1j * rng.normal(size=(4, 3, 5))
    X = feature_matrix(A, 3)
    assert X.shape == (4, 10)
    assert X[1, 3] == pytest.approx(abs(A[1, 1, 1]) ** 2)   # node 1, order -1
    assert np.all(X[:, -1] == 1)


@given(arrays(np.float64, (30, 4), elements=st.floats(-100, 100)))
def test_standardizer(X):
    s = Standardizer.fit(X)
    Z = s(X)
    assert np.all(np.isfinite(Z))
    varying = X.std(axis=0) > 1e-6 * (1 + np.abs(X).max())
    assert np.allclose(Z[:, varying].mean(axis=0), 0, atol=1e-8)
    assert np.allclose(Z[:, varying].std(axis=0), 1, atol=1e-6)


@given(st.floats(1e-6, 10.0), st.integers(0, 1000))
def test_ridge_normal_equations(lam, seed):
    rng = np.random.default_rng(seed)
    X, y = rng.normal(size=(40, 6)), rng.normal(size=40)
    W = train_linear(X, y, lam).W
    resid = X.T @ (X @ W - y) + lam * W
    assert np.linalg.norm(resid) < 1e-8 * (1 + np.linalg.norm(X.T @ y))


def test_ridge_recovers_planted_weights(rng):
    X = rng.normal(size=(200, 5))
    W = rng.normal(size=(5, 2))
    assert np.allclose(train_linear(X, X @ W, 0.0).W, W)
    assert np.allclose(train_linear(X, X @ W, 1e-10).W, W, atol=1e-8)
    with pytest.raises(ValueError):
        train_linear(X, np.ones(3))
    with pytest.raises(ValueError):
        train_linear(X, X @ W, -1.0)


# --- softmax -----------------------------------------------------------------

def test_softmax_gradient_matches_finite_differences(rng):
    X = rng.normal(size=(25, 4))
    labels = rng.integers(0, 3, 25)
    W = rng.normal(size=(4, 3))
    G = softmax_grad(W, X, labels)
    eps = 1e-6
    num = np.zeros_like(W)
    for idx in np.ndindex(W.shape):
        Wp, Wm = W.copy(), W.copy()
        Wp[idx] += eps
        Wm[idx] -= eps
        num[idx] = (softmax_loss(Wp, X, labels) - softmax_loss(Wm, X, labels)) / (2 * eps)
    assert np.max(np.abs(num - G)) / np.max(np.abs(G)) < 1e-5


def test_softmax_separates_blobs(rng):
    centers = np.array([[3, 0], [-3, 0], [0, 3]])
    labels = rng.integers(0, 3, 300)
    X = np.hstack([centers[labels] + rng.normal(size=(300, 2)), np.ones((300, 1))])
    m = train_softmax(X, labels, epochs=300, lr=0.1)
    assert len(m.history) == 301
    assert np.all(np.diff(m.history) <= 1e-12)
    assert accuracy(predict(m, X), labels) > 0.95
    P = predict_proba(m, X)
    assert np.allclose(P.sum(axis=1), 1)


def test_softmax_divergence_reported():
    X = np.array([[1e200, 1.0], [-1e200, 1.0]])
    with pytest.raises(TrainingDivergence) as exc:
        train_softmax(X, [0, 1], epochs=5, lr=1e200)
    assert exc.value.epoch >= 0
    with pytest.raises(ValueError):
        train_softmax(np.ones((2, 2)), [0, 3], n_classes=2)


def test_model_round_trip(tmp_path, rng):
    m = train_softmax(rng.normal(size=(10, 3)), rng.integers(0, 2, 10), epochs=3)
    save_model(m, tmp_path / "m.json", seeds={"mask": 1})
    back = load_model(tmp_path / "m.json")
    assert back.kind == "softmax" and np.array_equal(back.W, m.W) and back.history == m.history
    (tmp_path / "bad.json").write_text('{"format": "other"}')
    with pytest.raises(ValueError):
        load_model(tmp_path / "bad.json")


# --- Mackey-Glass --------------------------------------------------------------

def test_mackey_glass_first_delay_interval_exact():
    """For t <= tau the delayed term is the constant history, leaving a linear ODE."""
    p = MackeyGlassParams()
    y = mackey_glass(19, p, sample_every=10)   # t = 0..18
    c = p.beta * p.history / (1 + p.history ** p.n)
    t = np.arange(19.0)
    exact = c / p.gamma + (p.history - c / p.gamma) * np.exp(-p.gamma * t)
    assert np.allclose(y, exact, atol=1e-10)


def test_mackey_glass_converges_with_step():
    """Reference run at h/10; the interpolated delay makes the scheme at least second order."""
    ref = mackey_glass(101, MackeyGlassParams(h=0.01), sample_every=100)
    e1 = np.max(np.abs(mackey_glass(101, MackeyGlassParams(h=0.1), sample_every=10) - ref))
    e2 = np.max(np.abs(mackey_glass(101, MackeyGlassParams(h=0.05), sample_every=20) - ref))
    assert e1 < 1e-4
    assert e1 / e2 > 3.0


def test_mackey_glass_properties():
    y = mackey_glass(2000, sample_every=5)
    assert y[0] == 1.2 and np.all(np.isfinite(y))
    assert 0.2 < y.min() and y.max() < 1.5
    assert slope_sign_changes(y) > 20   # sustained oscillation
    decay = mackey_glass(50, MackeyGlassParams(beta=0.0), sample_every=10)
    assert np.allclose(decay, 1.2 * np.exp(-0.1 * np.arange(50)), rtol=1e-10)
    with pytest.raises(ValueError):
        MackeyGlassParams(tau=17.05)


# --- reservoir -------------------------------------------------------------------

@pytest.fixture(scope="module")
def reservoir():
    cfg = ReservoirConfig(n_nodes=30, seed=2)
    return cfg, SurrogateBackend(SurrogateConfig(30, 30, K=5, seed=3))


def test_reservoir_weights(reservoir):
    cfg, _ = reservoir
    assert np.max(np.abs(np.linalg.eigvals(cfg.w_res))) == pytest.approx(cfg.spectral_radius)
    with pytest.raises(ValueError):
        ReservoirConfig(feedback="none")
    with pytest.raises(ValueError):
        ReservoirConfig(leak=0.0)


def test_echo_state_forgets_initial_state(reservoir):
    cfg, be = reservoir
    u = mackey_glass(400, sample_every=5)
    a = ReservoirState.zeros(cfg.n_nodes, cfg.harmonics)
    b = ReservoirState(np.full(cfg.n_nodes, 0.5), np.zeros(cfg.n_nodes * cfg.harmonics))
    gap0 = np.linalg.norm(a.s - b.s)
    for v in u:
        a, b = rc_step(a, v, cfg, be), rc_step(b, v, cfg, be)
    assert np.linalg.norm(a.s - b.s) < 1e-3 * gap0


def test_reservoir_deterministic(reservoir):
    cfg, be = reservoir
    u = np.sin(np.arange(50) * 0.3)
    r1, _ = collect_states(u, cfg, be)
    r2, _ = collect_states(u, cfg, be)
    assert np.array_equal(r1, r2)
    assert r1.shape == (50, cfg.n_nodes * cfg.harmonics + 2)


def test_sine_forecast(reservoir):
    cfg, be = reservoir
    y = 0.5 + 0.3 * np.sin(2 * np.pi * np.arange(900) / 25)
    tr = rc_train(y, cfg, be, washout=200, T_train=400)
    assert nrmse(tr.train_pred, tr.train_target) < 0.01
    one = rc_predict_one_step(tr, y[600:700], cfg, be)
    assert nrmse(one[:-1], y[601:700]) < 0.02
    fc = rc_forecast(tr, cfg, be, 100)
    assert valid_horizon(fc, y[600:700], 0.1) >= 50
    with pytest.raises(ValueError):
        rc_train(y[:300], cfg, be)


def test_valid_horizon():
    t = np.zeros(10)
    f = np.zeros(10)
    f[6] = 1.0
    assert valid_horizon(f, t, 0.1, scale=1.0) == 6
    f[6] = 0.0
    f[3] = np.nan
    assert valid_horizon(f, t, 0.1, scale=1.0) == 3
    assert valid_horizon(t, t, 0.1, scale=1.0) == 10
