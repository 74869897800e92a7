"""Physical feature backends.

Both backends map source amplitudes ``Z[n_samples, n_sources]`` and
modulation phases ``phis[n_samples]`` to complex harmonic amplitudes
``[n_samples, n_probes, 2K+1]``.  ``fdtd`` runs one full simulation per
sample; ``surrogate`` evaluates the analytic scattering model.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import DomainConfig
from .encoding import make_waveforms
from .floquet import extract_harmonics_matrix
from .physics import build_domain, run
from .surrogate import SurrogateConfig, surrogate_amplitudes

BACKENDS = ("fdtd", "surrogate")


class SurrogateBackend:
    name = "surrogate"

    def __init__(self, cfg: SurrogateConfig):
        self.cfg = cfg

    @property
    def K(self) -> int:
        return self.cfg.K

    def amplitudes(self, Z, phis, band: int = 0) -> np.ndarray:
        return surrogate_amplitudes(Z, phis, self.cfg, band)

    def multiplexed(self, Za, Zb, phis) -> tuple[np.ndarray, np.ndarray]:
        return self.amplitudes(Za, phis, 0), self.amplitudes(Zb, phis, 1)

    def manifest(self) -> dict:
        return {"backend": self.name, **self.cfg.manifest()}


def _fdtd_sample(args):
    backend, za, zb, phi = args
    return backend.simulate(za, zb, phi)


class FdtdBackend:
    name = "fdtd"

    def __init__(self, cfg: DomainConfig | None = None, seed: int = 7, *,
                 scatterers: bool = True, jobs: int = 1, kernel: str | None = None):
        self.cfg = cfg or DomainConfig()
        self.seed = seed
        self.jobs = max(1, int(jobs))
        self.kernel = kernel
        self.domain = build_domain(self.cfg, seed, scatterers=scatterers)

    @property
    def K(self) -> int:
        return self.cfg.harmonics.K

    def _extract(self, data: np.ndarray, band: int) -> np.ndarray:
        w1, w2 = self.cfg.carriers(band)
        h = self.cfg.harmonics
        n = data.shape[0]
        return extract_harmonics_matrix(data, self.domain.grid.dt, 0.5 * (w1 + w2), self.cfg.omega_m,
                                        h.K, int(math.floor(h.skip_fraction * n)), h.window)

    def simulate(self, za, zb, phi: float) -> tuple[np.ndarray, np.ndarray | None]:
        """One run; returns per-band amplitudes ``[n_probes, 2K+1]``."""
        g = self.domain.grid
        src = make_waveforms(za, *self.cfg.carriers(0), g.n_steps, g.dt)
        if zb is not None:
            src = src + make_waveforms(zb, *self.cfg.carriers(1), g.n_steps, g.dt)
        rec = run(self.domain, src, self.domain.slab.with_phase(float(phi)), kernel=self.kernel)
        a = self._extract(rec.data, 0)
        b = self._extract(rec.data, 1) if zb is not None else None
        return a, b

    def _map(self, jobs_args) -> list:
        if self.jobs == 1:
            return [_fdtd_sample(a) for a in jobs_args]
        with ProcessPoolExecutor(self.jobs) as pool:
            return list(pool.map(_fdtd_sample, jobs_args))   # map keeps sample order

    def amplitudes(self, Z, phis, band: int = 0) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        phis = np.broadcast_to(np.asarray(phis, dtype=float), (Z.shape[0],))
        if band == 0:
            args = [(self, z, None, p) for z, p in zip(Z, phis)]
            return np.stack([a for a, _ in self._map(args)])
        zero = np.zeros(Z.shape[1])
        args = [(self, zero, z, p) for z, p in zip(Z, phis)]
        return np.stack([b for _, b in self._map(args)])

    def multiplexed(self, Za, Zb, phis) -> tuple[np.ndarray, np.ndarray]:
        Za = np.atleast_2d(np.asarray(Za, dtype=float))
        Zb = np.atleast_2d(np.asarray(Zb, dtype=float))
        phis = np.broadcast_to(np.asarray(phis, dtype=float), (Za.shape[0],))
        out = self._map([(self, a, b, p) for a, b, p in zip(Za, Zb, phis)])
        return np.stack([a for a, _ in out]), np.stack([b for _, b in out])

    def manifest(self) -> dict:
        return {"backend": self.name, "geometry_seed": self.seed, "kernel": self.kernel or "auto"}
