"""ProbeRecords file formats.

Columnar text: ``#``-prefixed metadata line, a header row ``step,probe_0,...``
and one row per step.

Binary container (all little-endian)::

    magic   4 bytes  b"FQPR"
    version uint32   1
    n_steps uint64
    n_probe uint64
    dt      float64
    data    n_steps * n_probe float64, row-major (step, probe)
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .engine import ProbeRecords

MAGIC = b"FQPR"
VERSION = 1
_HEADER = struct.Struct("<4sIQQd")


def save_text(rec: ProbeRecords, path: str | Path) -> None:
    header = ",".join(["step"] + [f"probe_{p}" for p in range(rec.n_probes)])
    table = np.column_stack([np.arange(rec.n_steps), rec.data])
    fmt = ["%d"] + ["%.17g"] * rec.n_probes
    np.savetxt(path, table, delimiter=",", header=f"dt={rec.dt!r}\n{header}", comments="# ", fmt=fmt)


def load_text(path: str | Path) -> ProbeRecords:
    dt = None
    with open(path) as fh:
        for line in fh:
            if line.startswith("# dt="):
                dt = float(line[5:].strip())
                break
    if dt is None:
        raise ValueError(f"{path}: missing '# dt=' metadata line")
    table = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    return ProbeRecords(np.ascontiguousarray(table[:, 1:]), dt)


def save_binary(rec: ProbeRecords, path: str | Path) -> None:
    data = np.ascontiguousarray(rec.data, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, rec.n_steps, rec.n_probes, rec.dt))
        fh.write(data.tobytes())


def load_binary(path: str | Path) -> ProbeRecords:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, version, n_steps, n_probes, dt = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    body = raw[_HEADER.size:]
    if len(body) != 8 * n_steps * n_probes:
        raise ValueError(f"{path}: expected {n_steps}x{n_probes} values, got {len(body) // 8}")
    data = np.frombuffer(body, dtype="<f8").reshape(n_steps, n_probes).astype(np.float64)
    return ProbeRecords(data, dt)
