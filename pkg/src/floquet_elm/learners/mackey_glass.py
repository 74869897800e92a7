"""Mackey-Glass delay differential equation

    dy/dt = beta * y(t - tau) / (1 + y(t - tau)**n) - gamma * y(t)

integrated with classical RK4; the delayed value at half steps is linearly
interpolated between grid points."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MackeyGlassParams:
    beta: float = 0.2
    gamma: float = 0.1
    tau: float = 18.0
    n: float = 10.0
    h: float = 0.1
    history: float = 1.2

    def __post_init__(self):
        lag = self.tau / self.h
        if abs(lag - round(lag)) > 1e-9:
            raise ValueError(f"tau/h must be an integer, got {lag}")

    @property
    def lag_steps(self) -> int:
        return int(round(self.tau / self.h))


def _rhs(y, yd, p: MackeyGlassParams):
    return p.beta * yd / (1.0 + yd ** p.n) - p.gamma * y


def mackey_glass(length: int, params: MackeyGlassParams | None = None, sample_every: int = 10) -> np.ndarray:
    """``length`` samples spaced ``sample_every * h`` apart, starting at ``t=0``
    where ``y = history`` (the constant history for ``t <= 0``)."""
    p = params or MackeyGlassParams()
    if length <= 0:
        raise ValueError("length must be positive")
    lag = p.lag_steps
    n_steps = (length - 1) * sample_every
    y = np.empty(lag + n_steps + 1)
    y[: lag + 1] = p.history
    for k in range(lag, lag + n_steps):
        d0 = y[k - lag]
        d1 = y[k - lag + 1]
        dm = 0.5 * (d0 + d1)
        yk = y[k]
        k1 = _rhs(yk, d0, p)
        k2 = _rhs(yk + 0.5 * p.h * k1, dm, p)
        k3 = _rhs(yk + 0.5 * p.h * k2, dm, p)
        k4 = _rhs(yk + p.h * k3, d1, p)
        y[k + 1] = yk + p.h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y[lag::sample_every][:length].copy()
