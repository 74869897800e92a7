"""Error and accuracy measures."""
from __future__ import annotations

import numpy as np


def rmse(pred, truth) -> float:
    p, t = np.asarray(pred, dtype=float), np.asarray(truth, dtype=float)
    if p.shape != t.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {t.shape}")
    return float(np.sqrt(np.mean((p - t) ** 2)))


def nrmse(pred, truth, norm: str = "std") -> float:
    """RMSE divided by the spread of ``truth`` (``std`` or ``range``)."""
    t = np.asarray(truth, dtype=float)
    scale = t.std() if norm == "std" else np.ptp(t)
    if norm not in ("std", "range"):
        raise ValueError(f"unknown normalization {norm!r}")
    return rmse(pred, t) / scale if scale > 0 else float("inf")


def r_squared(x, y) -> float:
    """Coefficient of determination of the least-squares line through (x, y)."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    ss_res = np.sum((y - A @ coef) ** 2)
    ss_tot = np.sum((y - y.mean()) ** 2)
    return float(1.0 - ss_res / ss_tot) if ss_tot > 0 else 1.0


def slope_sign_changes(y) -> int:
    d = np.sign(np.diff(np.asarray(y, dtype=float)))
    d = d[d != 0]
    return int(np.count_nonzero(d[1:] != d[:-1]))


def accuracy(pred, labels) -> float:
    return float(np.mean(np.asarray(pred) == np.asarray(labels)))


def confusion_matrix(pred, labels, n_classes: int | None = None) -> np.ndarray:
    """Counts ``C[true, predicted]``."""
    pred = np.asarray(pred, dtype=int)
    labels = np.asarray(labels, dtype=int)
    n = n_classes or int(max(pred.max(initial=0), labels.max(initial=0)) + 1)
    C = np.zeros((n, n), dtype=int)
    np.add.at(C, (labels, pred), 1)
    return C


def phase_portrait(series, lag: int = 1) -> np.ndarray:
    """Pairs ``(y(t), y(t - lag))`` as an ``[n - lag, 2]`` array."""
    y = np.asarray(series, dtype=float)
    return np.column_stack([y[lag:], y[:-lag]]) if y.size > lag else np.empty((0, 2))
