"""Benchmark data: synthetic target functions, the abalone table and 10x10
grayscale image tasks (digit corpus in IDX format or class-per-directory
image trees)."""
from __future__ import annotations

import csv
import gzip
import hashlib
import math
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

IMAGE_SIDE = 10
IDX_IMAGES = 0x00000803
IDX_LABELS = 0x00000801
IMAGE_SUFFIXES = (".png", ".pgm", ".bmp", ".jpg", ".jpeg", ".tif", ".tiff")


class DatasetError(ValueError):
    pass


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def split_indices(n: int, train_fraction: float = 0.75, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Seeded disjoint permutation split."""
    perm = np.random.default_rng(seed).permutation(n)
    k = int(round(train_fraction * n))
    return np.sort(perm[:k]), np.sort(perm[k:])


# --- synthetic functions ----------------------------------------------------

def rect(z, half_width: float = math.pi / 2) -> np.ndarray:
    return (np.abs(np.asarray(z, dtype=float)) <= half_width).astype(float)


@dataclass
class SynthDataset:
    zeta: np.ndarray
    targets: dict
    alpha: float
    rect_half_width: float
    seed: int


def synth_targets(zeta, alpha: float = 1.0, rect_half_width: float = math.pi / 2) -> dict:
    z = np.asarray(zeta, dtype=float)
    return {
        "y1": alpha * np.sin(4 * math.pi * z) * np.abs(z) / math.pi,
        "y2": rect(z, rect_half_width),
        "y3": np.sinc(z),   # sin(pi z)/(pi z), equal to 1 at z = 0
    }


def synth_functions(n: int = 1000, seed: int = 0, alpha: float = 1.0,
                    rect_half_width: float = math.pi / 2) -> SynthDataset:
    """``n`` inputs uniform on [-pi, pi] with the three target functions."""
    z = np.random.default_rng(seed).uniform(-math.pi, math.pi, n)
    return SynthDataset(z, synth_targets(z, alpha, rect_half_width), alpha, rect_half_width, seed)


# --- abalone -------------------------------------------------------------------

ABALONE_COLUMNS = ("sex", "length", "diameter", "height", "whole_weight", "shucked_weight",
                   "viscera_weight", "shell_weight", "rings")
SEX_CODE = {"M": 1.0, "F": -1.0, "I": 0.0}


@dataclass
class TabularDataset:
    X_train: np.ndarray
    y_train: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray
    feature_names: tuple
    target_range: tuple[float, float]
    source_hash: str
    seed: int


def _minmax(col: np.ndarray) -> np.ndarray:
    lo, hi = col.min(), col.max()
    return (col - lo) / (hi - lo) if hi > lo else np.zeros_like(col)


def parse_abalone(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Raw ``(features[n, 8], rings[n])``; sex is coded M=1, F=-1, I=0."""
    feats, rings, bad = [], [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 9:
                bad.append(f"line {lineno}: expected 9 fields, got {len(row)}")
                continue
            sex = row[0].strip().upper()
            if sex not in SEX_CODE:
                bad.append(f"line {lineno}: unknown sex code {row[0]!r}")
                continue
            try:
                values = [float(c) for c in row[1:]]
            except ValueError:
                bad.append(f"line {lineno}: non-numeric field")
                continue
            if not all(math.isfinite(v) for v in values):
                bad.append(f"line {lineno}: non-finite field")
                continue
            feats.append([SEX_CODE[sex]] + values[:7])
            rings.append(values[7])
    if bad:
        raise DatasetError(f"{path}: {len(bad)} malformed row(s)\n" + "\n".join(bad[:20]))
    if not feats:
        raise DatasetError(f"{path}: no data rows")
    return np.array(feats), np.array(rings)


def load_abalone(path: str | Path, seed: int = 0, train_fraction: float = 0.75) -> TabularDataset:
    """Numeric columns min-max scaled to [0, 1], rings scaled to [0, 1]."""
    X, rings = parse_abalone(path)
    X = X.copy()
    for j in range(1, X.shape[1]):
        X[:, j] = _minmax(X[:, j])
    y = _minmax(rings)
    tr, te = split_indices(len(y), train_fraction, seed)
    return TabularDataset(X[tr], y[tr], X[te], y[te], ABALONE_COLUMNS[:-1],
                          (float(rings.min()), float(rings.max())), file_sha256(path), seed)


# --- images -------------------------------------------------------------------

def _overlap_matrix(n_in: int, n_out: int) -> np.ndarray:
    """``A[i, j]``: fraction of output cell ``i`` covered by input pixel ``j``."""
    edges_out = np.arange(n_out + 1) * (n_in / n_out)
    lo = np.maximum(edges_out[:-1, None], np.arange(n_in)[None, :])
    hi = np.minimum(edges_out[1:, None], np.arange(n_in)[None, :] + 1)
    return np.clip(hi - lo, 0.0, None) / (n_in / n_out)


def downsample(img, side: int = IMAGE_SIDE) -> np.ndarray:
    """Area-weighted average onto a ``side x side`` grid (any input size)."""
    a = np.asarray(img, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D image, got shape {a.shape}")
    return _overlap_matrix(a.shape[0], side) @ a @ _overlap_matrix(a.shape[1], side).T


@dataclass
class ImageDataset:
    X: np.ndarray          # [n, side*side] in [0, 1], row-major
    labels: np.ndarray
    class_names: tuple
    source_hash: str = ""

    def subset(self, idx) -> "ImageDataset":
        return ImageDataset(self.X[idx], self.labels[idx], self.class_names, self.source_hash)


def _open_maybe_gz(path: Path):
    return gzip.open(path, "rb") if path.suffix == ".gz" else open(path, "rb")


def read_idx(path: str | Path, expect: int | None = None) -> np.ndarray:
    """Unsigned-byte IDX container (big-endian header)."""
    path = Path(path)
    with _open_maybe_gz(path) as fh:
        raw = fh.read()
    if len(raw) < 8:
        raise DatasetError(f"{path}: truncated header")
    (magic,) = struct.unpack(">I", raw[:4])
    if magic not in (IDX_IMAGES, IDX_LABELS) or (expect is not None and magic != expect):
        raise DatasetError(f"{path}: bad magic number 0x{magic:08x}")
    ndim = magic & 0xFF
    if len(raw) < 4 + 4 * ndim:
        raise DatasetError(f"{path}: truncated header")
    dims = struct.unpack(f">{ndim}I", raw[4:4 + 4 * ndim])
    body = raw[4 + 4 * ndim:]
    size = int(np.prod(dims))
    if len(body) < size:
        raise DatasetError(f"{path}: truncated data ({len(body)} of {size} bytes)")
    return np.frombuffer(body[:size], dtype=np.uint8).reshape(dims)


def write_idx(array, path: str | Path) -> None:
    a = np.ascontiguousarray(array, dtype=np.uint8)
    magic = {3: IDX_IMAGES, 1: IDX_LABELS}.get(a.ndim)
    if magic is None:
        raise ValueError("IDX writer handles image stacks (3-D) and label vectors (1-D)")
    with open(path, "wb") as fh:
        fh.write(struct.pack(">I", magic) + struct.pack(f">{a.ndim}I", *a.shape) + a.tobytes())


def images_to_grid(images, side: int = IMAGE_SIDE) -> np.ndarray:
    """Stack of 8-bit (or [0, 1]) images to ``[n, side*side]`` features in [0, 1]."""
    imgs = np.asarray(images, dtype=float)
    if imgs.max(initial=0.0) > 1.0:
        imgs = imgs / 255.0
    if not len(imgs):
        return np.empty((0, side * side))
    return np.clip(np.stack([downsample(im, side).ravel() for im in imgs]), 0.0, 1.0)


def load_idx_pair(images: str | Path, labels: str | Path, side: int = IMAGE_SIDE) -> ImageDataset:
    imgs = read_idx(images, IDX_IMAGES)
    labs = read_idx(labels, IDX_LABELS).astype(int)
    if imgs.shape[0] != labs.shape[0]:
        raise DatasetError(f"{imgs.shape[0]} images but {labs.shape[0]} labels")
    h = hashlib.sha256((file_sha256(images) + file_sha256(labels)).encode()).hexdigest()
    names = tuple(str(c) for c in range(int(labs.max()) + 1))
    return ImageDataset(images_to_grid(imgs, side), labs, names, h)


def _find_idx(directory: Path, stem: str) -> Path | None:
    for name in (stem, stem + ".gz"):
        if (directory / name).exists():
            return directory / name
    return None


def load_digit_corpus(directory: str | Path, split: str = "train", side: int = IMAGE_SIDE) -> ImageDataset:
    """The 4-file handwritten-digit container (``{train,t10k}-{images-idx3,labels-idx1}-ubyte[.gz]``)."""
    d = Path(directory)
    prefix = {"train": "train", "test": "t10k"}[split]
    img = _find_idx(d, f"{prefix}-images-idx3-ubyte")
    lab = _find_idx(d, f"{prefix}-labels-idx1-ubyte")
    if img is None or lab is None:
        raise DatasetError(f"{d}: missing {prefix} IDX files")
    return load_idx_pair(img, lab, side)


def load_image_dir(path: str | Path, classes: list[str] | None = None, side: int = IMAGE_SIDE) -> ImageDataset:
    """Directory-per-class tree of grayscale images, or a digit-corpus directory."""
    from PIL import Image

    root = Path(path)
    if _find_idx(root, "train-images-idx3-ubyte") is not None:
        return load_digit_corpus(root, "train", side)
    names = classes or sorted(p.name for p in root.iterdir() if p.is_dir())
    if not names:
        raise DatasetError(f"{root}: no class subdirectories")
    X, labels, h = [], [], hashlib.sha256()
    for c, name in enumerate(names):
        files = sorted(f for f in (root / name).iterdir() if f.suffix.lower() in IMAGE_SUFFIXES)
        for f in files:
            with Image.open(f) as im:
                a = np.asarray(im.convert("L"), dtype=float) / 255.0
            X.append(np.clip(downsample(a, side).ravel(), 0.0, 1.0))
            labels.append(c)
            h.update(f"{name}/{f.name}:{file_sha256(f)}".encode())
    if not X:
        raise DatasetError(f"{root}: no images found")
    return ImageDataset(np.array(X), np.array(labels), tuple(names), h.hexdigest())


def bundled_digits(n: int | None = None, seed: int = 0, side: int = IMAGE_SIDE) -> ImageDataset:
    """5000-image 28x28 digit sample shipped with ``mlxtend`` (optional dependency)."""
    try:
        from mlxtend.data import mnist_data
    except ImportError as exc:   # pragma: no cover - depends on the environment
        raise DatasetError("no digit corpus given and the optional 'mlxtend' package is not installed") from exc
    X, y = mnist_data()
    if n is not None:
        idx = np.sort(np.random.default_rng(seed).permutation(len(y))[:n])
        X, y = X[idx], y[idx]
    h = hashlib.sha256(np.ascontiguousarray(X).tobytes() + np.ascontiguousarray(y).tobytes()).hexdigest()
    return ImageDataset(images_to_grid(X.reshape(-1, 28, 28), side), y.astype(int),
                        tuple(str(c) for c in range(10)), h)


def load_digits(source: str | Path | None = None, n: int | None = None, seed: int = 0) -> ImageDataset:
    """Digits from ``source`` (IDX directory or image tree), else the environment
    variable ``FLOQUET_ELM_DIGITS``, else the bundled sample."""
    source = source or os.environ.get("FLOQUET_ELM_DIGITS")
    if source:
        ds = load_image_dir(source)
        if n is not None and n < len(ds.labels):
            ds = ds.subset(np.sort(np.random.default_rng(seed).permutation(len(ds.labels))[:n]))
        return ds
    return bundled_digits(n, seed)


XRAY_CLASSES = ("normal", "pneumonia", "covid")


def synthetic_xray(n: int = 600, seed: int = 0, side: int = IMAGE_SIDE, size: int = 40) -> ImageDataset:
    """Procedural chest-radiograph stand-ins: two lung fields on a bright
    body; pneumonia adds a dense lobar patch, covid adds diffuse peripheral
    haze on both sides.  Rendered at ``size`` pixels and downsampled."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size] / (size - 1)
    X, labels = [], []
    for k in range(n):
        c = k % len(XRAY_CLASSES)
        img = rng.uniform(0.6, 0.85) + 0.1 * rng.standard_normal((size, size))
        for cx in (0.3, 0.7):
            jx = cx + 0.03 * rng.standard_normal()
            lung = ((xx - jx) / 0.17) ** 2 + ((yy - 0.5) / 0.33) ** 2 < 1.0
            img[lung] = rng.uniform(0.15, 0.3) + 0.1 * rng.standard_normal(np.count_nonzero(lung))
        if c == 1:
            px, py = rng.choice([0.3, 0.7]), rng.uniform(0.35, 0.75)
            patch = ((xx - px) / rng.uniform(0.05, 0.1)) ** 2 + ((yy - py) / 0.1) ** 2 < 1.0
            img[patch] += rng.uniform(0.05, 0.3)
        elif c == 2:
            for cx in (0.3, 0.7):
                r = np.hypot((xx - cx) / 0.17, (yy - 0.5) / 0.33)
                ring = (r > 0.6) & (r < 1.0)
                img[ring] += rng.uniform(0.03, 0.15)
        X.append(downsample(np.clip(img, 0.0, 1.0), side).ravel())
        labels.append(c)
    X = np.array(X)
    h = hashlib.sha256(f"synthetic_xray:{n}:{seed}:{side}:{size}".encode()).hexdigest()
    return ImageDataset(X, np.array(labels), XRAY_CLASSES, h)
