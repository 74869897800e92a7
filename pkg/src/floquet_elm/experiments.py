"""Named experiments, their configuration and result bookkeeping.

Every run writes ``metrics.json``, a set of tab-separated curve files and a
``manifest.json`` holding the full configuration snapshot, seeds, backend and
input content hashes.  ``rerun_manifest`` repeats a run from the manifest
alone.
"""
from __future__ import annotations

import copy
import hashlib
import json
import math
import os
import platform
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .backends import BACKENDS, FdtdBackend, SurrogateBackend
from .config import ConfigError, DomainConfig, _build, check_domain, deep_merge, load_yaml, to_dict
from .datasets import (DatasetError, load_abalone, load_digits, load_image_dir, split_indices,
                       synth_functions, synthetic_xray)
from .encoding import PhaseMap, entangle_phase_batch, make_mask, make_phase_map, mask_project, wrap_phase
from .floquet import FIG2_PANELS, sweep_phase_surface
from .learners import (MackeyGlassParams, ReservoirConfig, Standardizer, accuracy, confusion_matrix,
                       feature_matrix, mackey_glass, nrmse, phase_portrait, predict, r_squared,
                       rc_forecast, rc_predict_one_step, rc_train, rmse, slope_sign_changes,
                       train_linear, train_softmax, valid_horizon)
from .physics import KERNEL
from .surrogate import SurrogateConfig

MANIFEST_VERSION = 1
OUTPUT_ENV = "FLOQUET_ELM_OUT"


class DataUnavailable(RuntimeError):
    """A dataset the experiment needs is not present."""


# --- configuration ----------------------------------------------------------

@dataclass
class SurrogateParams:
    K: int = 5
    decay: float = 0.5


@dataclass
class Fig2Params:
    cells_per_wavelength: int = 20
    n_steps: int = 4000
    skip_fraction: float = 0.35
    levels: int = 20
    zeta_max: float = 1.0
    static_phase: float = 0.0
    probe: int = -1                 # -1: central probe
    scatterers: bool = True
    surface_points: int = 61


@dataclass
class Fig3Params:
    n_samples: int = 1000
    n_nodes: int = 10
    n_seeds: int = 10
    max_harmonics: int = 5
    ridge: float = 1e-6
    train_fraction: float = 0.75
    alpha: float = 1.0
    rect_half_width: float = math.pi / 2


@dataclass
class Fig4Params:
    data: str | None = None
    n_sources: int = 10
    n_nodes: int = 50
    harmonics: int = 5
    ridge: float = 1e-6
    train_fraction: float = 0.75
    reference_rmse: float = 0.064


@dataclass
class Fig5Params:
    digits: str | None = None
    xray: str | None = None
    n_digits: int = 2000
    n_nodes: int = 100
    harmonics: int = 5
    epochs: int = 200
    lr: float = 0.05
    train_fraction: float = 0.75
    phase_source: str = "a"         # a | b | both | static
    reference_accuracy: float = 0.853


@dataclass
class MGParams:
    sample_every: int = 5
    length: int = 1500
    washout: int = 200
    T_train: int = 400
    horizon: int = 300
    tolerance: float = 0.1
    ridge: float = 1e-6
    noise: float = 0.0
    spread_seeds: int = 8
    reference_horizon: int = 70
    reservoir: ReservoirConfig = field(default_factory=ReservoirConfig)


@dataclass
class ExperimentConfig:
    seed: int = 0
    domain: DomainConfig = field(default_factory=DomainConfig)
    surrogate: SurrogateParams = field(default_factory=SurrogateParams)
    fig2: Fig2Params = field(default_factory=Fig2Params)
    fig3: Fig3Params = field(default_factory=Fig3Params)
    fig4: Fig4Params = field(default_factory=Fig4Params)
    fig5: Fig5Params = field(default_factory=Fig5Params)
    mg: MGParams = field(default_factory=MGParams)


def config_from_dict(data: dict | None) -> ExperimentConfig:
    cfg = _build(ExperimentConfig, data or {}, "")
    problems = check_config(cfg)
    if problems:
        path, _, msg = problems[0].partition(": ")
        raise ConfigError(path, msg)
    return cfg


def check_config(cfg: ExperimentConfig) -> list[str]:
    problems = check_domain(cfg.domain)
    n_orders = 2 * cfg.surrogate.K + 1
    if cfg.surrogate.K < 1:
        problems.append("surrogate.K: must be at least 1")
    if not 0 < cfg.surrogate.decay < 1:
        problems.append("surrogate.decay: must lie in (0, 1)")
    if cfg.fig3.max_harmonics > n_orders:
        problems.append(f"fig3.max_harmonics: at most {n_orders} orders are available")
    for name in ("fig4", "fig5"):
        h = getattr(cfg, name).harmonics
        if not 1 <= h <= n_orders:
            problems.append(f"{name}.harmonics: must lie in 1..{n_orders}")
    if cfg.fig5.phase_source not in ("a", "b", "both", "static"):
        problems.append("fig5.phase_source: expected one of a, b, both, static")
    if cfg.fig5.lr <= 0 or cfg.fig5.epochs < 1:
        problems.append("fig5: lr must be positive and epochs at least 1")
    if cfg.fig2.levels < 3:
        problems.append("fig2.levels: need at least 3 input levels")
    mg = cfg.mg
    if mg.length <= mg.washout + mg.T_train:
        problems.append("mg.length: must exceed washout + T_train")
    if mg.reservoir.harmonics > n_orders:
        problems.append(f"mg.reservoir.harmonics: at most {n_orders} orders are available")
    for name in ("fig3", "fig4", "fig5"):
        tf = getattr(cfg, name).train_fraction
        if not 0 < tf < 1:
            problems.append(f"{name}.train_fraction: must lie in (0, 1)")
    return problems


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> ExperimentConfig:
    data = load_yaml(path) if path else {}
    return config_from_dict(deep_merge(data, overrides or {}))


def default_config_path() -> Path:
    return Path(__file__).with_name("default_config.yaml")


# --- results ------------------------------------------------------------------

@dataclass
class ExperimentResult:
    name: str
    metrics: dict
    curves: dict = field(default_factory=dict)     # name -> (header, rows)
    hashes: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    backend: dict = field(default_factory=dict)


def _clean(obj):
    """JSON-ready copy; numpy scalars become Python numbers."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def write_curve(path: Path, header, rows) -> None:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    with open(path, "w") as fh:
        fh.write("\t".join(header) + "\n")
        for r in rows:
            fh.write("\t".join(repr(float(v)) for v in r) + "\n")


def read_curve(path: str | Path) -> tuple[list[str], np.ndarray]:
    with open(path) as fh:
        header = fh.readline().rstrip("\n").split("\t")
    return header, np.loadtxt(path, delimiter="\t", skiprows=1, ndmin=2)


def _sha(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_result(result: ExperimentResult, cfg: ExperimentConfig, out_dir: str | Path,
                 backend_name: str, jobs: int) -> Path:
    out = Path(out_dir)
    (out / "curves").mkdir(parents=True, exist_ok=True)
    metrics = _clean(result.metrics)
    (out / "metrics.json").write_text(json.dumps(metrics, indent=1, sort_keys=True))
    outputs = {}
    for name, (header, rows) in sorted(result.curves.items()):
        p = out / "curves" / f"{name}.tsv"
        write_curve(p, header, rows)
        outputs[f"curves/{name}.tsv"] = _sha(p)
    manifest = {
        "manifest_version": MANIFEST_VERSION,
        "experiment": result.name,
        "package_version": __version__,
        "backend": backend_name,
        "backend_detail": _clean(result.backend),
        "kernel": KERNEL,
        "jobs": jobs,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "seeds": _clean(result.seeds),
        "input_hashes": _clean(result.hashes),
        "output_hashes": outputs,
        "config": to_dict(cfg),
        "metrics": metrics,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True))
    return out / "manifest.json"


# --- backend construction ---------------------------------------------------

def _backend(kind: str, cfg: ExperimentConfig, n_inputs: int, n_nodes: int, seed: int,
             n_bands: int = 1, jobs: int = 1, domain: DomainConfig | None = None,
             scatterers: bool = True):
    if kind == "surrogate":
        d = domain or cfg.domain
        wcs = tuple(0.5 * sum(d.carriers(b)) for b in range(min(n_bands, len(d.bands))))
        return SurrogateBackend(SurrogateConfig(n_inputs, n_nodes, K=cfg.surrogate.K, seed=seed,
                                                decay=cfg.surrogate.decay, n_bands=n_bands,
                                                omega_centers=wcs, omega_m=d.omega_m))
    if kind == "fdtd":
        d = copy.deepcopy(domain or cfg.domain)
        d.nodes.n_sources = n_inputs
        d.nodes.n_probes = n_nodes
        return FdtdBackend(d, seed=seed, scatterers=scatterers, jobs=jobs)
    raise ConfigError("backend", f"unknown backend {kind!r}; expected one of {BACKENDS}")


# --- experiments ----------------------------------------------------------------

def _fig2(cfg: ExperimentConfig, backend: str, jobs: int) -> ExperimentResult:
    p = cfg.fig2
    seed = cfg.seed
    dom = copy.deepcopy(cfg.domain)
    dom.grid.cells_per_wavelength = p.cells_per_wavelength
    dom.grid.n_steps = p.n_steps
    dom.harmonics.skip_fraction = p.skip_fraction
    n_src, n_prb = dom.nodes.n_sources, dom.nodes.n_probes
    be = _backend(backend, cfg, n_src, n_prb, seed, jobs=jobs, domain=dom, scatterers=p.scatterers)
    K = be.K
    mask = make_mask(1, n_src, seed)
    zeta = p.zeta_max * np.arange(1, p.levels + 1) / p.levels
    Z = mask_project(zeta, mask)
    probe = n_prb // 2 if p.probe < 0 else p.probe
    x = zeta ** 2
    metrics, curves = {}, {}
    modes = {"static": np.full(zeta.size, p.static_phase),
             "entangled": entangle_phase_batch(zeta, PhaseMap("linear"))}
    for mode, phis in modes.items():
        amps = be.amplitudes(Z, phis)
        I = np.abs(amps[:, :, K]) ** 2                      # central harmonic, every probe
        metrics[f"r2_{mode}"] = r_squared(x, I[:, probe])
        metrics[f"sign_changes_{mode}"] = slope_sign_changes(I[:, probe])
        metrics[f"r2_{mode}_all_probes"] = [r_squared(x, I[:, j]) for j in range(n_prb)]
        curves[f"intensity_{mode}"] = (["zeta", "input_intensity"] + [f"probe_{j}" for j in range(n_prb)],
                                       np.column_stack([zeta, x, I]))
    metrics["probe"] = probe
    phis = np.linspace(0.0, 2 * np.pi, p.surface_points)
    sweep = np.linspace(-0.5, 0.5, p.surface_points)
    for panel, spec in FIG2_PANELS.items():
        surf = sweep_phase_surface(sweep=sweep, phis=phis, **spec)
        ss, pp = np.meshgrid(sweep, phis, indexing="ij")
        curves[f"surface_{panel}"] = (["sweep", "phi", "magnitude"],
                                      np.column_stack([ss.ravel(), pp.ravel(), surf.ravel()]))
    return ExperimentResult("fig2-entanglement", metrics, curves, {}, {"mask": seed, "geometry": seed},
                            be.manifest())


def _fig3(cfg: ExperimentConfig, backend: str, jobs: int) -> ExperimentResult:
    p = cfg.fig3
    names = ("y1", "y2", "y3")
    H = p.max_harmonics
    res = np.zeros((p.n_seeds, H, len(names)))
    seeds = [cfg.seed + s for s in range(p.n_seeds)]
    pred_curve = None
    for si, s in enumerate(seeds):
        ds = synth_functions(p.n_samples, s, p.alpha, p.rect_half_width)
        mask = make_mask(1, cfg.domain.nodes.n_sources, s)
        be = _backend(backend, cfg, cfg.domain.nodes.n_sources, p.n_nodes, s, jobs=jobs)
        amps = be.amplitudes(mask_project(ds.zeta, mask), entangle_phase_batch(ds.zeta, PhaseMap("linear")))
        tr, te = split_indices(p.n_samples, p.train_fraction, s)
        for h in range(1, H + 1):
            F = feature_matrix(amps, h)
            preds = []
            for j, n in enumerate(names):
                y = ds.targets[n]
                model = train_linear(F[tr], y[tr], p.ridge)
                yp = predict(model, F[te])
                res[si, h - 1, j] = rmse(yp, y[te])
                preds.append(yp)
            if si == 0 and h == H:
                order = np.argsort(ds.zeta[te])
                truth = [ds.targets[n][te][order] for n in names]
                pred_curve = np.column_stack([ds.zeta[te][order]] + [v for pair in zip(truth, [q[order] for q in preds])
                                                                      for v in pair])
    mean, std = res.mean(axis=0), res.std(axis=0)
    harmonics = np.arange(1, H + 1)
    metrics = {"harmonics": harmonics.tolist(), "seeds": seeds}
    for j, n in enumerate(names):
        metrics[f"rmse_mean_{n}"] = mean[:, j].tolist()
        metrics[f"rmse_std_{n}"] = std[:, j].tolist()
        metrics[f"rmse_max_harmonics_{n}"] = float(mean[-1, j])
        steps = np.diff(mean[:, j])
        metrics[f"max_rmse_increase_{n}"] = float(steps.max()) if steps.size else 0.0
    header = ["harmonics"] + [f"{n}_{s}" for n in names for s in ("mean", "std")]
    rows = np.column_stack([harmonics] + [c for j in range(len(names)) for c in (mean[:, j], std[:, j])])
    curves = {"rmse_vs_harmonics": (header, rows),
              "predictions": (["zeta"] + [f"{n}_{k}" for n in names for k in ("true", "pred")], pred_curve)}
    return ExperimentResult("fig3-functions", metrics, curves, {}, {"per_run": seeds},
                            {"backend": backend, "K": cfg.surrogate.K})


def _abalone_path(p: Fig4Params) -> Path:
    path = p.data or os.environ.get("FLOQUET_ELM_ABALONE")
    if not path:
        raise DataUnavailable("abalone data not configured: set fig4.data or FLOQUET_ELM_ABALONE "
                              "to the 4177-row comma-separated abalone file")
    if not Path(path).is_file():
        raise DataUnavailable(f"abalone file {path} does not exist")
    return Path(path)


def _fig4(cfg: ExperimentConfig, backend: str, jobs: int) -> ExperimentResult:
    p = cfg.fig4
    s = cfg.seed
    ds = load_abalone(_abalone_path(p), s, p.train_fraction)
    d_in = ds.X_train.shape[1]
    mask = make_mask(d_in, p.n_sources, s)
    pmap = make_phase_map("projected", d_in, seed=s + 1)
    be = _backend(backend, cfg, p.n_sources, p.n_nodes, s, jobs=jobs)

    def features(X):
        return feature_matrix(be.amplitudes(mask_project(X, mask), entangle_phase_batch(X, pmap)), p.harmonics)

    Ftr, Fte = features(ds.X_train), features(ds.X_test)
    model = train_linear(Ftr, ds.y_train, p.ridge)
    yp = predict(model, Fte)
    metrics = {
        "test_rmse": rmse(yp, ds.y_test),
        "train_rmse": rmse(predict(model, Ftr), ds.y_train),
        "reference_rmse": p.reference_rmse,
        "n_train": len(ds.y_train), "n_test": len(ds.y_test),
        "rings_range": list(ds.target_range),
    }
    curves = {"test_predictions": (["truth", "prediction"], np.column_stack([ds.y_test, yp]))}
    return ExperimentResult("fig4-abalone", metrics, curves, {"abalone": ds.source_hash},
                            {"split": s, "mask": s, "phase_map": s + 1, "scattering": s}, be.manifest())


def _fig5_phases(p: Fig5Params, XA, XB, pa, pb) -> np.ndarray:
    phA, phB = entangle_phase_batch(XA, pa), entangle_phase_batch(XB, pb)
    if p.phase_source == "a":
        return phA
    if p.phase_source == "b":
        return phB
    if p.phase_source == "both":
        return wrap_phase(phA + phB)
    return np.zeros(len(XA))


def _fig5(cfg: ExperimentConfig, backend: str, jobs: int) -> ExperimentResult:
    p = cfg.fig5
    s = cfg.seed
    digits = load_digits(p.digits, p.n_digits, s)
    n = len(digits.labels)
    xray = load_image_dir(p.xray) if p.xray else synthetic_xray(n, s + 3)
    if len(xray.labels) < n:
        raise DataUnavailable(f"second task has {len(xray.labels)} images, need {n} to pair with the digits")
    xray = xray.subset(np.sort(np.random.default_rng(s + 4).permutation(len(xray.labels))[:n]))
    d = digits.X.shape[1]
    be = _backend(backend, cfg, d, p.n_nodes, s, n_bands=2, jobs=jobs)
    pa = make_phase_map("projected", d, seed=s + 1)
    pb = make_phase_map("projected", d, seed=s + 2)
    phis = _fig5_phases(p, digits.X, xray.X, pa, pb)
    A, B = be.multiplexed(digits.X, xray.X, phis)
    tr, te = split_indices(n, p.train_fraction, s)
    metrics, curves = {}, {}
    for task, amps, ds in (("digits", A, digits), ("xray", B, xray)):
        F = feature_matrix(amps, p.harmonics, bias=False)
        scaler = Standardizer.fit(F[tr])
        Xtr = np.hstack([scaler(F[tr]), np.ones((len(tr), 1))])
        Xte = np.hstack([scaler(F[te]), np.ones((len(te), 1))])
        C = len(ds.class_names)
        model = train_softmax(Xtr, ds.labels[tr], p.epochs, p.lr, n_classes=C)
        pred = predict(model, Xte)
        metrics[f"{task}_test_accuracy"] = accuracy(pred, ds.labels[te])
        metrics[f"{task}_train_accuracy"] = accuracy(predict(model, Xtr), ds.labels[tr])
        metrics[f"{task}_final_loss"] = model.history[-1]
        cm = confusion_matrix(pred, ds.labels[te], C)
        metrics[f"{task}_confusion"] = cm.tolist()
        curves[f"{task}_loss"] = (["epoch", "loss"], np.column_stack([np.arange(len(model.history)), model.history]))
        curves[f"{task}_confusion"] = (["true"] + [f"pred_{c}" for c in range(C)],
                                       np.column_stack([np.arange(C), cm]))
    # band isolation: replace the second task's inputs, keep the first task's
    k = min(64, len(te))
    sel = te[:k]
    XB_alt = xray.X[np.random.default_rng(s + 5).permutation(n)[:k]]
    phis_alt = _fig5_phases(p, digits.X[sel], XB_alt, pa, pb)
    A0, _ = be.multiplexed(digits.X[sel], xray.X[sel], phis[sel])
    A1, _ = be.multiplexed(digits.X[sel], XB_alt, phis_alt)
    F0, F1 = feature_matrix(A0, p.harmonics, False), feature_matrix(A1, p.harmonics, False)
    metrics["isolation_relative_change"] = float(np.linalg.norm(F1 - F0) / np.linalg.norm(F0))
    metrics["reference_accuracy"] = p.reference_accuracy
    metrics["n_samples"] = n
    metrics["xray_source"] = "directory" if p.xray else "synthetic"
    hashes = {"digits": digits.source_hash, "xray": xray.source_hash}
    seeds = {"subset": s, "split": s, "phase_a": s + 1, "phase_b": s + 2, "xray": s + 3, "pairing": s + 4,
             "isolation": s + 5, "scattering": s}
    return ExperimentResult("fig5-parallel", metrics, curves, hashes, seeds, be.manifest())


def _mg_setup(cfg: ExperimentConfig, backend: str, jobs: int, seed: int):
    mg = cfg.mg
    rc = copy.deepcopy(mg.reservoir)
    rc.seed = seed
    rc = ReservoirConfig(**to_dict(rc))
    be = _backend(backend, cfg, rc.n_nodes, rc.n_nodes, seed, jobs=jobs)
    return rc, be


def _mg_series(cfg: ExperimentConfig) -> np.ndarray:
    return mackey_glass(cfg.mg.length, MackeyGlassParams(), sample_every=cfg.mg.sample_every)


def _fig6(cfg: ExperimentConfig, backend: str, jobs: int) -> ExperimentResult:
    mg = cfg.mg
    y = _mg_series(cfg)
    rc, be = _mg_setup(cfg, backend, jobs, cfg.seed)
    trained = rc_train(y, rc, be, mg.washout, mg.T_train, mg.ridge, mg.noise)
    start = mg.washout + mg.T_train
    test = y[start: start + mg.horizon + 1]
    one = rc_predict_one_step(trained, test, rc, be)[:-1]
    metrics = {
        "train_nrmse": nrmse(trained.train_pred, trained.train_target),
        "one_step_nrmse": nrmse(one, test[1:]),
        "sample_interval": mg.sample_every * MackeyGlassParams().h,
    }
    t_train = np.arange(mg.washout + 1, start + 1)
    t_test = np.arange(start + 1, start + 1 + one.size)
    curves = {
        "training_fit": (["step", "truth", "prediction"],
                         np.column_stack([t_train, trained.train_target, trained.train_pred])),
        "one_step_test": (["step", "truth", "prediction"], np.column_stack([t_test, test[1:], one])),
        "phase_portrait_truth": (["y_t", "y_t_minus_1"], phase_portrait(trained.train_target)),
        "phase_portrait_prediction": (["y_t", "y_t_minus_1"], phase_portrait(trained.train_pred)),
    }
    return ExperimentResult("fig6-mg-train", metrics, curves, {}, {"reservoir": cfg.seed, "scattering": cfg.seed},
                            {**be.manifest(), "reservoir": rc.manifest()})


def _fig7(cfg: ExperimentConfig, backend: str, jobs: int) -> ExperimentResult:
    mg = cfg.mg
    y = _mg_series(cfg)
    start = mg.washout + mg.T_train
    truth = y[start: start + mg.horizon]
    scale = float(y[: start + 1].std())
    horizons = []
    forecast = None
    for k in range(max(1, mg.spread_seeds)):
        rc, be = _mg_setup(cfg, backend, jobs, cfg.seed + k)
        trained = rc_train(y, rc, be, mg.washout, mg.T_train, mg.ridge, mg.noise)
        fc = rc_forecast(trained, rc, be, mg.horizon)
        horizons.append(valid_horizon(fc, truth, mg.tolerance, scale))
        if k == 0:
            forecast, backend_info = fc, {**be.manifest(), "reservoir": rc.manifest()}
    err = np.abs(forecast - truth) / scale
    metrics = {
        "valid_steps": horizons[0],
        "divergence_onset": horizons[0],
        "tolerance": mg.tolerance,
        "error_scale": scale,
        "valid_steps_by_seed": horizons,
        "median_valid_steps": float(np.median(horizons)),
        "reference_steps": mg.reference_horizon,
        "sample_interval": mg.sample_every * MackeyGlassParams().h,
    }
    steps = np.arange(mg.horizon)
    curves = {"forecast": (["step", "truth", "forecast", "normalized_error"],
                           np.column_stack([steps, truth, forecast, err])),
              "phase_portrait_forecast": (["y_t", "y_t_minus_1"], phase_portrait(forecast[np.isfinite(forecast)]))}
    seeds = {"reservoir": [cfg.seed + k for k in range(max(1, mg.spread_seeds))]}
    return ExperimentResult("fig7-mg-forecast", metrics, curves, {}, seeds, backend_info)


@dataclass(frozen=True)
class Experiment:
    name: str
    default_backend: str
    fn: object
    summary: str


REGISTRY = {e.name: e for e in (
    Experiment("fig2-entanglement", "fdtd", _fig2, "central-harmonic intensity vs input, static and entangled phase"),
    Experiment("fig3-functions", "surrogate", _fig3, "regression of three nonlinear scalar functions"),
    Experiment("fig4-abalone", "surrogate", _fig4, "abalone age regression"),
    Experiment("fig5-parallel", "surrogate", _fig5, "two image classification tasks in two frequency bands"),
    Experiment("fig6-mg-train", "surrogate", _fig6, "Mackey-Glass reservoir, teacher-forced fit"),
    Experiment("fig7-mg-forecast", "surrogate", _fig7, "Mackey-Glass reservoir, autonomous forecast"),
)}


def run_experiment(name: str, cfg: ExperimentConfig | None = None, *, backend: str | None = None,
                   jobs: int = 1, out_dir: str | Path | None = None) -> tuple[ExperimentResult, Path | None]:
    """Run a registered experiment; writes results when ``out_dir`` is given."""
    if name not in REGISTRY:
        raise KeyError(f"unknown experiment {name!r}; known: {', '.join(REGISTRY)}")
    cfg = cfg or ExperimentConfig()
    exp = REGISTRY[name]
    kind = backend or exp.default_backend
    if kind not in BACKENDS:
        raise ConfigError("backend", f"unknown backend {kind!r}; expected one of {BACKENDS}")
    result = exp.fn(cfg, kind, jobs)
    manifest = write_result(result, cfg, out_dir, kind, jobs) if out_dir is not None else None
    return result, manifest


def rerun_manifest(path: str | Path, out_dir: str | Path | None = None) -> tuple[dict, dict]:
    """Repeat a run from its manifest; returns ``(recorded, reproduced)`` metrics."""
    doc = json.loads(Path(path).read_text())
    if doc.get("manifest_version") != MANIFEST_VERSION:
        raise ValueError(f"{path}: unsupported manifest version {doc.get('manifest_version')}")
    cfg = config_from_dict(doc["config"])
    result, _ = run_experiment(doc["experiment"], cfg, backend=doc["backend"], jobs=doc.get("jobs", 1),
                               out_dir=out_dir)
    return doc["metrics"], json.loads(json.dumps(_clean(result.metrics)))
