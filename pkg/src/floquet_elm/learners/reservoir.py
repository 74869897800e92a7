"""Reservoir computing with the time-modulated scatterer as the nonlinear node.

One discrete step drives the physical system with

    u(t) = w_in * i(t) + w_res @ s(t),      s(t) = T(t) @ v_h

where ``T(t)`` holds the harmonic intensities at every readout node and
``v_h`` weights the harmonic orders that are fed back.  Depending on
``feedback``, ``u`` sets the source amplitudes, the modulation phase (through
a seeded projection), or both.  Only the linear readout is trained.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .readout import ReadoutModel, Standardizer, harmonic_selection, train_linear

FEEDBACK_MODES = ("amplitude", "phase", "both")


@dataclass
class ReservoirConfig:
    n_nodes: int = 75
    seed: int = 0
    harmonics: int = 5
    input_scale: float = 1.0
    input_offset: float = 0.0
    spectral_radius: float = 0.99
    v_h: float = 0.5
    phase_scale: float = 0.5
    phi0: float = 0.0
    leak: float = 0.1
    feedback: str = "both"
    w_in: np.ndarray = field(init=False, repr=False)
    w_res: np.ndarray = field(init=False, repr=False)
    w_phase: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.feedback not in FEEDBACK_MODES:
            raise ValueError(f"feedback must be one of {FEEDBACK_MODES}, got {self.feedback!r}")
        if not 0.0 < self.leak <= 1.0:
            raise ValueError("leak must lie in (0, 1]")
        rng = np.random.default_rng(self.seed)
        n = self.n_nodes
        self.w_in = rng.uniform(-1.0, 1.0, n)
        w = rng.standard_normal((n, n)) / math.sqrt(n)
        rho = np.max(np.abs(np.linalg.eigvals(w)))
        self.w_res = w * (self.spectral_radius / rho)
        self.w_phase = rng.normal(0.0, 1.0 / math.sqrt(n), n)
        for a in (self.w_in, self.w_res, self.w_phase):
            a.setflags(write=False)

    def harmonic_gains(self, K: int) -> np.ndarray:
        """``v_h`` spread uniformly over the selected orders."""
        return np.full(self.harmonics, self.v_h / self.harmonics)

    def manifest(self) -> dict:
        return {k: getattr(self, k) for k in ("n_nodes", "seed", "harmonics", "input_scale", "input_offset",
                                               "spectral_radius", "v_h", "phase_scale", "phi0", "leak",
                                               "feedback")}


@dataclass
class ReservoirState:
    s: np.ndarray           # fed-back signal, one value per node
    features: np.ndarray    # selected harmonic intensities, flattened node-major

    @classmethod
    def zeros(cls, n_nodes: int, n_harmonics: int) -> "ReservoirState":
        return cls(np.zeros(n_nodes), np.zeros(n_nodes * n_harmonics))


def rc_step(state: ReservoirState, i: float, cfg: ReservoirConfig, backend) -> ReservoirState:
    """Advance one discrete step; ``backend.amplitudes`` is the physics ``F``."""
    drive = cfg.input_scale * (i - cfg.input_offset) * cfg.w_in
    fb = cfg.w_res @ state.s
    zeta = drive + fb if cfg.feedback in ("amplitude", "both") else drive
    if cfg.feedback in ("phase", "both"):
        phi = cfg.phi0 + 2.0 * math.pi * cfg.phase_scale * float(cfg.w_phase @ (drive + fb))
    else:
        phi = cfg.phi0
    amps = backend.amplitudes(zeta[None, :], [phi % (2.0 * math.pi)])[0]
    cols = harmonic_selection(backend.K, cfg.harmonics)
    T = np.abs(amps[:, cols]) ** 2
    s_new = T @ cfg.harmonic_gains(backend.K)
    s = (1.0 - cfg.leak) * state.s + cfg.leak * s_new
    return ReservoirState(s, T.ravel())


def _readout_row(state: ReservoirState, i: float) -> np.ndarray:
    return np.concatenate([state.features, [i, 1.0]])


def collect_states(series, cfg: ReservoirConfig, backend, state: ReservoirState | None = None):
    """Teacher-forced drive; returns ``(rows, final_state)`` with one readout row per input."""
    state = state or ReservoirState.zeros(cfg.n_nodes, cfg.harmonics)
    rows = []
    for v in np.asarray(series, dtype=float):
        state = rc_step(state, v, cfg, backend)
        rows.append(_readout_row(state, v))
    return np.array(rows), state


@dataclass
class TrainedReservoir:
    model: ReadoutModel
    scaler: Standardizer | None
    state: ReservoirState
    last_input: float
    train_pred: np.ndarray
    train_target: np.ndarray

    def design(self, rows) -> np.ndarray:
        rows = np.atleast_2d(rows)
        if self.scaler is None:
            return rows
        return np.hstack([self.scaler(rows[:, :-1]), rows[:, -1:]])

    def predict_rows(self, rows) -> np.ndarray:
        return self.design(rows) @ self.model.W


def rc_train(series, cfg: ReservoirConfig, backend, washout: int = 200, T_train: int = 400,
             lam: float = 1e-6, noise: float = 0.0, standardize: bool = True) -> TrainedReservoir:
    """Fit the readout to next-step targets over ``T_train`` steps after ``washout``.

    With ``standardize`` the readout columns are z-scored on the training rows
    so that ``lam`` penalizes every feature alike.  ``noise`` adds seeded
    Gaussian jitter to the teacher-forced inputs (not the targets).
    """
    y = np.asarray(series, dtype=float)
    if y.size <= washout + T_train:
        raise ValueError(f"series of {y.size} samples is too short for washout {washout} + {T_train} training steps")
    drive = y[: washout + T_train]
    if noise > 0:
        drive = drive + np.random.default_rng(cfg.seed + 1).normal(0.0, noise, drive.size)
    rows, state = collect_states(drive, cfg, backend)
    X = rows[washout:]
    target = y[washout + 1: washout + T_train + 1]
    scaler = Standardizer.fit(X[:, :-1]) if standardize else None
    trained = TrainedReservoir(None, scaler, state, float(drive[-1]), None, target)
    D = trained.design(X)
    trained.model = train_linear(D, target, lam)
    trained.model.hyper.update(washout=washout, T_train=T_train, noise=noise, standardize=standardize)
    trained.train_pred = D @ trained.model.W
    return trained


def rc_predict_one_step(trained: TrainedReservoir, series, cfg: ReservoirConfig, backend) -> np.ndarray:
    """Teacher-forced one-step predictions continuing from the end of training:
    element ``k`` predicts ``series[k + 1]``."""
    rows, _ = collect_states(series, cfg, backend, trained.state)
    return trained.predict_rows(rows)


def rc_forecast(trained: TrainedReservoir, cfg: ReservoirConfig, backend, horizon: int) -> np.ndarray:
    """Closed loop: each prediction becomes the next input.  Once the loop
    leaves the finite range the remaining entries are NaN."""
    out = np.full(horizon, np.nan)
    state = trained.state
    x = _readout_row(state, trained.last_input)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(horizon):
            pred = float(trained.predict_rows(x)[0])
            if not np.isfinite(pred):
                break
            out[k] = pred
            state = rc_step(state, pred, cfg, backend)
            x = _readout_row(state, pred)
    return out


def valid_horizon(forecast, truth, tol: float = 0.1, scale: float | None = None) -> int:
    """Steps before ``|forecast - truth| / scale`` first exceeds ``tol``; ``scale``
    defaults to the standard deviation of ``truth``."""
    f, t = np.asarray(forecast, dtype=float), np.asarray(truth, dtype=float)
    sc = scale if scale is not None else t.std()
    bad = np.flatnonzero(~(np.abs(f - t) / sc <= tol))   # NaN counts as failed
    return int(bad[0]) if bad.size else int(f.size)
