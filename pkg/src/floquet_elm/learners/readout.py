"""Trainable last layer: ridge regression and softmax classification."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MODEL_FORMAT = "floquet-elm-readout"
MODEL_VERSION = 1


class TrainingDivergence(RuntimeError):
    def __init__(self, epoch: int):
        super().__init__(f"loss became non-finite at epoch {epoch}")
        self.epoch = epoch


def harmonic_selection(K: int, n_harmonics: int) -> np.ndarray:
    """Column indices (into orders -K..K) of the first ``n_harmonics`` orders
    in the sequence 0, +1, -1, +2, -2, ..."""
    if not 1 <= n_harmonics <= 2 * K + 1:
        raise ValueError(f"n_harmonics must lie in 1..{2 * K + 1}")
    seq = [0]
    for j in range(1, K + 1):
        seq += [j, -j]
    return np.array(sorted(seq[:n_harmonics])) + K


def feature_matrix(amplitudes: np.ndarray, n_harmonics: int | None = None, bias: bool = True) -> np.ndarray:
    """Intensities ``|A|^2`` of the selected harmonics at every node, flattened
    node-major, with a trailing bias column of ones.

    ``amplitudes`` is ``[n_samples, n_nodes, 2K+1]``.
    """
    amplitudes = np.asarray(amplitudes)
    K = (amplitudes.shape[-1] - 1) // 2
    cols = harmonic_selection(K, n_harmonics or 2 * K + 1)
    X = (np.abs(amplitudes[..., cols]) ** 2).reshape(amplitudes.shape[0], -1)
    if bias:
        X = np.hstack([X, np.ones((X.shape[0], 1))])
    return X


@dataclass
class Standardizer:
    """Per-column z-scoring fitted on training rows (constant columns pass through)."""

    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, X) -> "Standardizer":
        X = np.asarray(X, dtype=float)
        mu = X.mean(axis=0)
        sd = X.std(axis=0)
        const = sd < 1e-12 * (1.0 + np.abs(mu))
        mu[const] = 0.0
        sd[const] = 1.0
        return cls(mu, sd)

    def __call__(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.scale


@dataclass
class ReadoutModel:
    kind: str
    W: np.ndarray
    hyper: dict = field(default_factory=dict)
    history: list = field(default_factory=list)

    @property
    def n_features(self) -> int:
        return self.W.shape[0]


def train_linear(X, y, lam: float = 1e-6) -> ReadoutModel:
    """``argmin ||X W - y||^2 + lam ||W||^2``; minimum-norm least squares at ``lam=0``."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"{X.shape[0]} rows but {y.shape[0]} targets")
    if lam < 0:
        raise ValueError("ridge coefficient must be non-negative")
    if lam == 0:
        W, *_ = np.linalg.lstsq(X, y, rcond=None)
    else:
        G = X.T @ X + lam * np.eye(X.shape[1])
        W = np.linalg.solve(G, X.T @ y)
    return ReadoutModel("linear", W, {"lambda": lam})


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def softmax_loss(W, X, labels) -> float:
    P = _softmax(X @ W)
    return float(-np.mean(np.log(P[np.arange(len(labels)), labels] + 1e-300)))


def softmax_grad(W, X, labels) -> np.ndarray:
    """Gradient of the mean categorical cross-entropy with respect to ``W``."""
    P = _softmax(X @ W)
    P[np.arange(len(labels)), labels] -= 1.0
    return X.T @ P / X.shape[0]


def train_softmax(X, labels, epochs: int = 200, lr: float = 0.05, n_classes: int | None = None) -> ReadoutModel:
    """Full-batch gradient descent from zero weights; loss per epoch in ``history``."""
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if X.shape[0] != labels.shape[0]:
        raise ValueError(f"{X.shape[0]} rows but {labels.shape[0]} labels")
    C = n_classes or int(labels.max()) + 1
    if labels.min() < 0 or labels.max() >= C:
        raise ValueError(f"labels must lie in 0..{C - 1}")
    W = np.zeros((X.shape[1], C))
    history = []
    with np.errstate(over="ignore", invalid="ignore"):   # divergence is reported below
        for epoch in range(epochs):
            loss = softmax_loss(W, X, labels)
            if not np.isfinite(loss):
                raise TrainingDivergence(epoch)
            history.append(loss)
            W = W - lr * softmax_grad(W, X, labels)
            if not np.all(np.isfinite(W)):
                raise TrainingDivergence(epoch)
        history.append(softmax_loss(W, X, labels))
    return ReadoutModel("softmax", W, {"epochs": epochs, "lr": lr, "n_classes": C}, history)


def predict(model: ReadoutModel, X) -> np.ndarray:
    out = np.asarray(X, dtype=float) @ model.W
    if model.kind == "softmax":
        return np.argmax(out, axis=1)
    return out


def predict_proba(model: ReadoutModel, X) -> np.ndarray:
    if model.kind != "softmax":
        raise ValueError("probabilities need a softmax model")
    return _softmax(np.asarray(X, dtype=float) @ model.W)


def save_model(model: ReadoutModel, path: str | Path, seeds: dict | None = None) -> None:
    doc = {
        "format": MODEL_FORMAT, "version": MODEL_VERSION, "kind": model.kind,
        "shape": list(model.W.shape), "weights": model.W.ravel().tolist(),
        "hyper": model.hyper, "history": list(model.history), "seeds": seeds or {},
    }
    Path(path).write_text(json.dumps(doc, indent=1))


def load_model(path: str | Path) -> ReadoutModel:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"{path}: not a readout model file")
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"{path}: unsupported model version {doc.get('version')}")
    W = np.array(doc["weights"], dtype=float).reshape(doc["shape"])
    return ReadoutModel(doc["kind"], W, doc["hyper"], doc["history"])
