"""Input encoding: random mask, two-tone source waveforms, input-dependent
modulation phase and two-band frequency multiplexing."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .physics.engine import SourceArray

TWO_PI = 2.0 * math.pi


def wrap_phase(phi):
    """Map onto [0, 2pi); ``np.mod`` alone can round tiny negatives up to 2pi."""
    p = np.mod(phi, TWO_PI)
    return np.where(p >= TWO_PI, 0.0, p)


@dataclass(frozen=True)
class RandomMask:
    seed: int
    matrix: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def make_mask(d_in: int = 1, d_nodes: int = 10, seed: int = 0) -> RandomMask:
    rng = np.random.default_rng(seed)
    m = rng.uniform(-1.0, 1.0, size=(d_in, d_nodes))
    m.setflags(write=False)
    return RandomMask(seed, m)


def mask_project(zeta, mask: RandomMask) -> np.ndarray:
    """Scalar (or ``d_in`` vector) input times the mask: ``zeta @ mask``.

    Accepts a batch ``[n_samples, d_in]`` (or ``[n_samples]`` for ``d_in=1``).
    """
    z = np.asarray(zeta, dtype=float)
    if z.ndim == 0:
        z = z.reshape(1)
    if mask.matrix.shape[0] == 1 and (z.ndim == 1 and z.shape[0] != 1):
        z = z[:, None]
    if z.shape[-1] != mask.matrix.shape[0]:
        raise ValueError(f"input has {z.shape[-1]} components, mask expects {mask.matrix.shape[0]}")
    return z @ mask.matrix


def two_tone(omega1: float, omega2: float, n_steps: int, dt: float) -> np.ndarray:
    t = np.arange(n_steps) * dt
    return np.sin(omega1 * t) + np.sin(omega2 * t)


def make_waveforms(zeta, omega1: float, omega2: float, n_steps: int, dt: float) -> SourceArray:
    """``s_i(t) = zeta_i (sin(w1 t) + sin(w2 t))`` sampled at ``t = k dt``."""
    z = np.atleast_1d(np.asarray(zeta, dtype=float))
    return SourceArray(np.outer(z, two_tone(omega1, omega2, n_steps, dt)))


@dataclass(frozen=True)
class PhaseMap:
    """``static``: ``phi0``; ``linear``: ``2 pi zeta`` for scalar input;
    ``projected``: ``2 pi <w, zeta> + phi0``.  Results are wrapped to [0, 2pi)."""

    kind: str = "static"
    phi0: float = 0.0
    w: np.ndarray | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ("static", "linear", "projected"):
            raise ValueError(f"unknown phase map kind {self.kind!r}")
        if self.kind == "projected" and self.w is None:
            raise ValueError("projected phase map needs a weight vector")


def make_phase_map(kind: str, dim: int = 1, seed: int = 0, phi0: float = 0.0) -> PhaseMap:
    if kind != "projected":
        return PhaseMap(kind, phi0)
    rng = np.random.default_rng(seed)
    w = rng.normal(0.0, 1.0 / math.sqrt(dim), size=dim)
    w.setflags(write=False)
    return PhaseMap("projected", phi0, w, seed)


def entangle_phase(zeta, pmap: PhaseMap) -> float:
    """Modulation phase for a single input (scalar or vector)."""
    z = np.asarray(zeta, dtype=float)
    if pmap.kind == "static":
        phi = pmap.phi0
    elif pmap.kind == "linear":
        if z.size != 1:
            raise ValueError("linear phase map takes a scalar input; use 'projected' for vectors")
        phi = TWO_PI * float(z.reshape(())) + pmap.phi0
    else:
        z = np.atleast_1d(z)
        if z.shape != pmap.w.shape:
            raise ValueError(f"input has {z.size} components, phase map expects {pmap.w.size}")
        phi = TWO_PI * float(z @ pmap.w) + pmap.phi0
    return float(wrap_phase(phi))


def entangle_phase_batch(values, pmap: PhaseMap) -> np.ndarray:
    """Phases for a batch: ``values`` is ``[n]`` scalars (linear/static) or
    ``[n, dim]`` vectors (projected/static)."""
    v = np.asarray(values, dtype=float)
    if pmap.kind == "linear":
        if v.ndim != 1:
            raise ValueError("linear phase map takes scalar inputs")
        return wrap_phase(TWO_PI * v + pmap.phi0)
    if pmap.kind == "static":
        return np.full(v.shape[0], float(wrap_phase(pmap.phi0)))
    return wrap_phase(TWO_PI * (v @ pmap.w) + pmap.phi0)


def bands_overlap(band_a: tuple[float, float], band_b: tuple[float, float]) -> bool:
    (a0, a1), (b0, b1) = sorted(band_a), sorted(band_b)
    return not (a1 < b0 or b1 < a0)


def multiplex(task_a, band_a: tuple[float, float], task_b, band_b: tuple[float, float],
              n_steps: int, dt: float) -> SourceArray:
    """Sum of two tasks' two-tone waveforms on the same source nodes.

    Bands are ``(omega_low, omega_high)`` carrier pairs in simulation units.
    """
    if bands_overlap(band_a, band_b):
        raise ValueError(f"bands {band_a} and {band_b} overlap")
    a = np.atleast_1d(np.asarray(task_a, dtype=float))
    b = np.atleast_1d(np.asarray(task_b, dtype=float))
    if a.shape != b.shape:
        raise ValueError(f"task vectors differ in length ({a.size} vs {b.size})")
    return make_waveforms(a, *band_a, n_steps, dt) + make_waveforms(b, *band_b, n_steps, dt)
