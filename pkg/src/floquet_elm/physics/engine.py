"""Time stepping of the TMz Yee scheme with a time-varying slab.

The electric update goes through the displacement field: ``dD/dt = curl H``
and ``Ez = D / eps_r(t)``, which keeps ``D`` continuous when the slab
permittivity changes in time.  Everything is in normalized units
(``c = eps0 = mu0 = 1``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .domain import ModulatedSlab, SimulationDomain


class SimulationError(RuntimeError):
    """Fields blew up; ``step`` is the offending step index."""

    def __init__(self, step: int, limit: float):
        super().__init__(f"field magnitude exceeded {limit:.3g} (or became non-finite) at step {step}")
        self.step = step
        self.limit = limit


@dataclass
class FieldState:
    ez: np.ndarray
    dzx: np.ndarray
    dzy: np.ndarray
    hx: np.ndarray
    hy: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, nx: int, ny: int) -> "FieldState":
        return cls(*(np.zeros((nx, ny)) for _ in range(5)), t=0)

    def copy(self) -> "FieldState":
        return FieldState(self.ez.copy(), self.dzx.copy(), self.dzy.copy(),
                          self.hx.copy(), self.hy.copy(), self.t)


@dataclass
class SourceArray:
    """Per-node drive waveforms, shape ``(n_nodes, n_samples)``; sample ``k``
    is injected during step ``k``."""

    waveforms: np.ndarray

    def __post_init__(self):
        self.waveforms = np.ascontiguousarray(np.atleast_2d(self.waveforms), dtype=np.float64)

    @property
    def n_nodes(self) -> int:
        return self.waveforms.shape[0]

    @property
    def n_samples(self) -> int:
        return self.waveforms.shape[1]

    @property
    def peak(self) -> float:
        return float(np.abs(self.waveforms).max()) if self.waveforms.size else 0.0

    def __add__(self, other: "SourceArray") -> "SourceArray":
        return SourceArray(self.waveforms + other.waveforms)


@dataclass
class ProbeRecords:
    """Ez time series at every probe: ``data[step, probe]``."""

    data: np.ndarray
    dt: float

    @property
    def n_steps(self) -> int:
        return self.data.shape[0]

    @property
    def n_probes(self) -> int:
        return self.data.shape[1]

    def probe(self, p: int) -> np.ndarray:
        return self.data[:, p]


def _inv_eps_schedule(slab: ModulatedSlab, dt: float, t0: int, n: int) -> np.ndarray:
    t = (t0 + np.arange(n)) * dt
    return 1.0 / slab.permittivity(t)


def _call_kernel(fn, state: FieldState, domain: SimulationDomain, slab: ModulatedSlab,
                 waves: np.ndarray, records: np.ndarray, t0: int, n: int, limit: float,
                 hard: bool) -> int:
    pml = domain.pml
    src = domain.source_cells
    prb = domain.probe_cells
    src_i = np.ascontiguousarray(src[:, 0], dtype=np.intp)
    src_j = np.ascontiguousarray(src[:, 1], dtype=np.intp)
    prb_i = np.ascontiguousarray(prb[:, 0], dtype=np.intp)
    prb_j = np.ascontiguousarray(prb[:, 1], dtype=np.intp)
    src_eps = np.ascontiguousarray(1.0 / domain.inv_eps[src_i, src_j])
    i0, i1 = slab.columns
    return fn(state.ez, state.dzx, state.dzy, state.hx, state.hy,
              pml.ahx, pml.bhx, pml.ahy, pml.bhy, pml.aex, pml.bex, pml.aey, pml.bey,
              domain.inv_eps, domain.mask,
              int(i0), int(i1), _inv_eps_schedule(slab, domain.grid.dt, t0, n),
              src_i, src_j, src_eps, waves, bool(hard),
              prb_i, prb_j, records, int(t0), int(n), float(limit))


def _limit(domain: SimulationDomain, peak: float) -> float:
    # no drive amplitude to scale by: only non-finite values count as blow-up
    return domain.blowup_factor * peak if peak > 0 else np.inf


def step(state: FieldState, domain: SimulationDomain, slab: ModulatedSlab | None = None,
         sources: SourceArray | None = None, *, kernel: str | None = None) -> FieldState:
    """One leapfrog update (all H, then all D/E); returns a new state."""
    slab = slab or domain.slab
    if state.t >= domain.grid.n_steps:
        raise ValueError(f"state.t={state.t} is past the configured {domain.grid.n_steps} steps")
    _, fn = kernels.get_kernel(kernel)
    new = state.copy()
    if sources is None:
        sources = SourceArray(np.zeros((domain.n_sources, state.t + 1)))
    if sources.n_nodes != domain.n_sources:
        raise ValueError(f"{sources.n_nodes} waveforms for {domain.n_sources} source nodes")
    if sources.n_samples <= state.t:
        raise ValueError("source waveforms are shorter than the current step")
    records = np.zeros((1, domain.n_probes))
    limit = _limit(domain, sources.peak)
    bad = _call_kernel(fn, new, domain, slab, sources.waveforms, records, state.t, 1, limit,
                       domain.source_mode == "hard")
    if bad >= 0:
        raise SimulationError(bad, limit)
    new.t = state.t + 1
    return new


def run(domain: SimulationDomain, sources: SourceArray | None = None,
        slab: ModulatedSlab | None = None, *, n_steps: int | None = None,
        kernel: str | None = None, state: FieldState | None = None) -> ProbeRecords:
    """Run ``n_steps`` (default: the grid's) and return every probe record.

    The result depends only on the inputs; repeated calls are bit-identical.
    """
    slab = slab or domain.slab
    n = domain.grid.n_steps if n_steps is None else n_steps
    if sources is None:
        sources = SourceArray(np.zeros((domain.n_sources, n + (state.t if state else 0))))
    if sources.n_nodes != domain.n_sources:
        raise ValueError(f"{sources.n_nodes} waveforms for {domain.n_sources} source nodes")
    state = state or FieldState.zeros(domain.grid.nx, domain.grid.ny)
    if sources.n_samples < state.t + n:
        raise ValueError(f"source waveforms have {sources.n_samples} samples, need {state.t + n}")
    _, fn = kernels.get_kernel(kernel)
    records = np.zeros((n, domain.n_probes))
    limit = _limit(domain, sources.peak)
    bad = _call_kernel(fn, state, domain, slab, sources.waveforms, records, state.t, n, limit,
                       domain.source_mode == "hard")
    if bad >= 0:
        raise SimulationError(bad, limit)
    state.t += n
    return ProbeRecords(records, domain.grid.dt)
