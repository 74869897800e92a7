"""Floquet two-port relations and harmonic extraction from time series.

Harmonic ``n`` of carrier ``w_k`` sits at ``w_k + n*w_m``.  Shifting the
modulation phase by ``phi`` multiplies its complex amplitude by
``exp(1j*n*phi)``; two carriers that land on the same output frequency add
coherently.  Complex amplitudes follow ``x(t) = Re(A exp(1j*w*t))``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class HarmonicCoefficient:
    omega: float
    order: int
    value: complex


def phase_shifted_coefficient(c: HarmonicCoefficient, phi: float) -> HarmonicCoefficient:
    return HarmonicCoefficient(c.omega, c.order, c.value * np.exp(1j * c.order * phi))


def superposed_harmonic(t1: complex, n: int, t2: complex, m: int, phi):
    """``|exp(i n phi) t1 + exp(i m phi) t2|``; broadcasts over array inputs."""
    return np.abs(np.exp(1j * n * np.asarray(phi)) * t1 + np.exp(1j * m * np.asarray(phi)) * t2)


# Parameter sets of the four analytic surfaces for the central harmonic
# (n = 1 from w1, m = -1 from w2).  "fixed" is the fully specified harmonic,
# the other one has one part pinned and the other swept.
FIG2_PANELS = {
    "a": dict(fixed="T1", value=0.1 - 0.25j, pinned="real", pinned_value=0.1),
    "b": dict(fixed="T2", value=0.1 - 0.25j, pinned="real", pinned_value=0.1),
    "c": dict(fixed="T1", value=0.1 - 0.05j, pinned="imag", pinned_value=0.05),
    "d": dict(fixed="T2", value=0.1 - 0.05j, pinned="imag", pinned_value=0.05),
}


def sweep_phase_surface(fixed: str, value: complex, pinned: str, pinned_value: float,
                        sweep, phis, n: int = 1, m: int = -1) -> np.ndarray:
    """Magnitude grid ``[len(sweep), len(phis)]`` of the superposed harmonic.

    ``fixed`` ("T1" or "T2") is held at ``value``.  The other coefficient has
    its ``pinned`` part ("real" or "imag") held at ``pinned_value`` while the
    remaining part runs over ``sweep``.
    """
    sweep = np.asarray(sweep, dtype=float)
    phis = np.asarray(phis, dtype=float)
    if sweep.size == 0 or phis.size == 0:
        raise ValueError("sweep and phase ranges must be non-empty")
    if pinned == "real":
        other = pinned_value + 1j * sweep
    elif pinned == "imag":
        other = sweep + 1j * pinned_value
    else:
        raise ValueError(f"pinned must be 'real' or 'imag', got {pinned!r}")
    other = other[:, None]
    phi = phis[None, :]
    if fixed == "T1":
        return superposed_harmonic(value, n, other, m, phi)
    if fixed == "T2":
        return superposed_harmonic(other, n, value, m, phi)
    raise ValueError(f"fixed must be 'T1' or 'T2', got {fixed!r}")


# --- quasi-static transfer-matrix model -----------------------------------

def slab_transfer_matrix(index, k0d: float) -> np.ndarray:
    """Instantaneous transfer matrix ``[a1, b1] = Psi [a2, b2]`` of a slab.

    Normal incidence, vacuum on both sides, ``exp(+i w t)`` convention (a
    forward wave is ``exp(-i k x)``), reference planes on the slab faces.
    ``index`` may be an array; the result then has shape ``index.shape + (2, 2)``.
    """
    n = np.asarray(index, dtype=complex)
    delta = n * k0d
    c, s = np.cos(delta), np.sin(delta)
    plus = 0.5 * (n + 1.0 / n)
    minus = 0.5 * (n - 1.0 / n)
    psi = np.empty(n.shape + (2, 2), dtype=complex)
    psi[..., 0, 0] = c + 1j * plus * s
    psi[..., 0, 1] = 1j * minus * s
    psi[..., 1, 0] = -1j * minus * s
    psi[..., 1, 1] = c - 1j * plus * s
    return psi


@dataclass
class TwoPortFloquet:
    """Base coefficients ``{(omega_k, n): (T0, R0)}`` for orders ``-K..K``."""

    omega_m: float
    K: int
    table: dict = field(default_factory=dict)

    def coefficient(self, omega_k: float, n: int, kind: str = "T", phi: float = 0.0) -> HarmonicCoefficient:
        t, r = self.table[(omega_k, n)]
        base = HarmonicCoefficient(omega_k + n * self.omega_m, n, t if kind == "T" else r)
        return phase_shifted_coefficient(base, phi) if phi else base

    def carriers(self) -> list[float]:
        return sorted({w for w, _ in self.table})

    def passive_sum(self, omega_k: float) -> float:
        """``sum_n |T_n|^2 + |R_n|^2``; reported only, active modulation may exceed 1."""
        return float(sum(abs(t) ** 2 + abs(r) ** 2
                         for (w, _), (t, r) in self.table.items() if w == omega_k))


def floquet_slab(eps_s: float, delta_m: float, thickness: float, omegas, omega_m: float,
                 K: int = 5, phi: float = 0.0, n_time: int = 256, c: float = 1.0) -> TwoPortFloquet:
    """Floquet coefficients of a slab with ``eps(t) = eps_s + delta_m cos(w_m t + phi)``.

    Quasi-static: the instantaneous transfer matrix at each carrier is
    evaluated over one modulation period, expanded in a Fourier series, and
    the truncated harmonic system is solved with unit incidence on
    port 1 at the carrier and nothing incident on port 2.
    """
    tau = np.arange(n_time) / n_time  # fraction of a modulation period
    eps = eps_s + delta_m * np.cos(2 * np.pi * tau + phi)
    M = 2 * K + 1
    orders = np.arange(-K, K + 1)
    out = TwoPortFloquet(omega_m, K)
    for w in np.atleast_1d(omegas):
        psi_t = slab_transfer_matrix(np.sqrt(eps), w * thickness / c)
        # psi_t[j] = sum_p Psi^p exp(i p 2 pi tau_j)
        coeffs = np.fft.fft(psi_t, axis=0) / n_time

        def fourier(p):
            return coeffs[p % n_time]

        toe11 = np.empty((M, M), dtype=complex)
        toe21 = np.empty((M, M), dtype=complex)
        for qi, q in enumerate(orders):
            for pi_, p in enumerate(orders):
                f = fourier(q - p)
                toe11[qi, pi_] = f[0, 0]
                toe21[qi, pi_] = f[1, 0]
        rhs = np.zeros(M, dtype=complex)
        rhs[K] = 1.0
        trans = np.linalg.solve(toe11, rhs)
        refl = toe21 @ trans
        for n, t, r in zip(orders, trans, refl):
            out.table[(float(w), int(n))] = (complex(t), complex(r))
    return out


# --- harmonic extraction -----------------------------------------------------

@dataclass
class HarmonicSpectrum:
    node: int
    orders: np.ndarray
    amplitudes: np.ndarray
    omega_center: float
    omega_m: float

    def amplitude(self, k: int) -> complex:
        idx = np.flatnonzero(self.orders == k)
        if idx.size == 0:
            raise KeyError(k)
        return complex(self.amplitudes[idx[0]])

    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def as_dict(self) -> dict[int, complex]:
        return {int(k): complex(a) for k, a in zip(self.orders, self.amplitudes)}


class NyquistError(ValueError):
    pass


def harmonic_window(n_samples: int, skip: int, period_steps: float, max_window: int) -> tuple[int, int]:
    """``(start, length)`` of the analysis window: at most ``max_window`` samples
    from the end of the record, cut to a whole number of modulation periods,
    not reaching into the first ``skip`` samples."""
    usable = min(n_samples - skip, max_window)
    periods = math.floor(usable / period_steps + 1e-9)
    if periods < 1:
        raise ValueError(
            f"record leaves {n_samples - skip} samples after the transient, "
            f"less than one modulation period ({period_steps:.1f} steps)"
        )
    length = int(round(periods * period_steps))
    length = min(length, n_samples - skip)
    return n_samples - length, length


@functools.lru_cache(maxsize=64)
def _projector(start: int, length: int, dt: float, omega_center: float, omega_m: float, K: int) -> np.ndarray:
    t = (start + np.arange(length)) * dt
    w = omega_center + omega_m * np.arange(-K, K + 1)
    phase = np.outer(t, w)
    basis = np.hstack([np.cos(phase), np.sin(phase)])
    pinv = np.linalg.pinv(basis)
    pinv.setflags(write=False)
    return pinv


def extract_harmonics_matrix(records: np.ndarray, dt: float, omega_center: float, omega_m: float,
                             K: int = 5, skip: int = 0, window: int = 4096) -> np.ndarray:
    """Complex amplitudes ``[n_series, 2K+1]`` for a ``[n_samples, n_series]`` array.

    Amplitudes come from a least-squares fit of cosines and sines at exactly
    ``omega_center + k*omega_m`` over the analysis window, which equals the
    DFT at those lines when they fall on bins and stays exact off-bin.
    Time is measured from sample 0, so phases are comparable across runs.
    """
    records = np.asarray(records, dtype=float)
    if records.ndim == 1:
        records = records[:, None]
    top = omega_center + K * omega_m
    if top >= math.pi / dt:
        raise NyquistError(f"harmonic at {top:.4g} exceeds the Nyquist frequency {math.pi / dt:.4g}")
    if omega_center - K * omega_m <= 0:
        raise ValueError("lowest requested harmonic is at non-positive frequency")
    period = 2 * math.pi / (omega_m * dt)
    start, length = harmonic_window(records.shape[0], skip, period, window)
    pinv = _projector(start, length, float(dt), float(omega_center), float(omega_m), int(K))
    coef = pinv @ records[start:start + length]
    n = 2 * K + 1
    return (coef[:n] - 1j * coef[n:]).T


def extract_harmonics(record, omega_center: float, omega_m: float, K: int = 5, skip: int = 0,
                      *, dt: float, window: int = 4096, node: int = 0) -> HarmonicSpectrum:
    amps = extract_harmonics_matrix(np.asarray(record)[:, None], dt, omega_center, omega_m, K, skip, window)[0]
    return HarmonicSpectrum(node, np.arange(-K, K + 1), amps, omega_center, omega_m)


def spectra_from_records(records: np.ndarray, dt: float, omega_center: float, omega_m: float,
                         K: int = 5, skip: int = 0, window: int = 4096) -> list[HarmonicSpectrum]:
    amps = extract_harmonics_matrix(records, dt, omega_center, omega_m, K, skip, window)
    orders = np.arange(-K, K + 1)
    return [HarmonicSpectrum(p, orders, amps[p], omega_center, omega_m) for p in range(amps.shape[0])]


def write_spectra(spectra, path: str | Path) -> None:
    """Tab-separated table: node, order, re, im, intensity."""
    with open(path, "w") as fh:
        fh.write("node\torder\tre\tim\tintensity\n")
        for s in spectra:
            for k, a in zip(s.orders, s.amplitudes):
                fh.write(f"{s.node}\t{int(k)}\t{float(a.real)!r}\t{float(a.imag)!r}\t{float(abs(a)) ** 2!r}\n")


def read_spectra(path: str | Path, omega_center: float = float("nan"),
                 omega_m: float = float("nan")) -> list[HarmonicSpectrum]:
    table = np.loadtxt(path, delimiter="\t", skiprows=1, ndmin=2)
    out = []
    for node in np.unique(table[:, 0]).astype(int):
        rows = table[table[:, 0] == node]
        out.append(HarmonicSpectrum(int(node), rows[:, 1].astype(int), rows[:, 2] + 1j * rows[:, 3],
                                    omega_center, omega_m))
    return out
