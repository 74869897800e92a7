"""Analytic stand-in for the FDTD scattering.

Input amplitudes reach each readout node through a seeded random complex
matrix (one for each carrier of a band).  At the node, carrier ``w1`` feeds
harmonic ``k`` (frequency ``w_c + k w_m``) through order ``n = k + 1`` and
carrier ``w2`` through order ``m = k - 1``; each order carries its base
coefficient times ``exp(1j * order * phi)``.  Base coefficients are complex
Gaussian with magnitude decaying as ``decay**|order|``.

The map from input fields to harmonic amplitudes is linear for fixed
``phi``; all nonlinearity enters through an input-dependent ``phi``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .floquet import HarmonicSpectrum


def _cgauss(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


@dataclass
class SurrogateConfig:
    n_inputs: int
    n_nodes: int
    K: int = 5
    seed: int = 0
    decay: float = 0.5
    n_bands: int = 1
    omega_centers: tuple[float, ...] = ()
    omega_m: float = float("nan")
    s1: list = field(init=False, repr=False)
    s2: list = field(init=False, repr=False)
    c1: list = field(init=False, repr=False)
    c2: list = field(init=False, repr=False)

    def __post_init__(self):
        rng = np.random.default_rng(self.seed)
        orders = np.arange(-(self.K + 1), self.K + 2)
        envelope = self.decay ** np.abs(orders)
        self.s1, self.s2, self.c1, self.c2 = [], [], [], []
        for _ in range(self.n_bands):
            self.s1.append(_cgauss(rng, (self.n_nodes, self.n_inputs)) / np.sqrt(self.n_inputs))
            self.s2.append(_cgauss(rng, (self.n_nodes, self.n_inputs)) / np.sqrt(self.n_inputs))
            self.c1.append(_cgauss(rng, (self.n_nodes, orders.size)) * envelope)
            self.c2.append(_cgauss(rng, (self.n_nodes, orders.size)) * envelope)

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    def manifest(self) -> dict:
        return {"n_inputs": self.n_inputs, "n_nodes": self.n_nodes, "K": self.K,
                "seed": self.seed, "decay": self.decay, "n_bands": self.n_bands}


def surrogate_amplitudes(Z, phis, cfg: SurrogateConfig, band: int = 0) -> np.ndarray:
    """Complex harmonic amplitudes ``[n_samples, n_nodes, 2K+1]``.

    ``Z`` is ``[n_samples, n_inputs]`` and ``phis`` ``[n_samples]``.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    phis = np.broadcast_to(np.asarray(phis, dtype=float), (Z.shape[0],))
    if Z.shape[1] != cfg.n_inputs:
        raise ValueError(f"input has {Z.shape[1]} components, scattering matrix expects {cfg.n_inputs}")
    K = cfg.K
    k = np.arange(-K, K + 1)
    idx1 = k + 1 + (K + 1)   # order n = k + 1 in the -(K+1)..K+1 table
    idx2 = k - 1 + (K + 1)
    a1 = Z @ cfg.s1[band].T
    a2 = Z @ cfg.s2[band].T
    ph1 = np.exp(1j * np.outer(phis, k + 1))[:, None, :]
    ph2 = np.exp(1j * np.outer(phis, k - 1))[:, None, :]
    return (ph1 * cfg.c1[band][None, :, idx1] * a1[:, :, None]
            + ph2 * cfg.c2[band][None, :, idx2] * a2[:, :, None])


def surrogate_scatter(zeta, phi: float, cfg: SurrogateConfig, band: int = 0) -> list[HarmonicSpectrum]:
    """One spectrum per readout node for a single input vector."""
    amps = surrogate_amplitudes(np.asarray(zeta, dtype=float)[None, :], [phi], cfg, band)[0]
    wc = cfg.omega_centers[band] if len(cfg.omega_centers) > band else float("nan")
    return [HarmonicSpectrum(p, cfg.orders, amps[p], wc, cfg.omega_m) for p in range(cfg.n_nodes)]


def multiplexed_amplitudes(Za, Zb, phis, cfg: SurrogateConfig) -> tuple[np.ndarray, np.ndarray]:
    """Two tasks sharing one slab: band 0 carries ``Za``, band 1 ``Zb``; the
    single modulation phase ``phis`` acts on both."""
    if cfg.n_bands < 2:
        raise ValueError("multiplexing needs a two-band surrogate")
    return surrogate_amplitudes(Za, phis, cfg, 0), surrogate_amplitudes(Zb, phis, cfg, 1)
