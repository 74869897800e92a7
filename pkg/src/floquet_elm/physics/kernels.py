"""Leapfrog time-stepping kernels.

Two interchangeable implementations of :func:`advance` exist: the compiled
Cython extension ``_fdtd_core`` and :func:`advance_numpy` below.  The
compiled one is used when it imports; set ``FLOQUET_ELM_PURE=1`` to force the
numpy path.  Both apply the same floating-point operations in the same order.
"""
from __future__ import annotations

import os

import numpy as np


def advance_numpy(ez, dzx, dzy, hx, hy,
                  ahx, bhx, ahy, bhy, aex, bex, aey, bey,
                  inv_eps, mask,
                  slab_i0, slab_i1, slab_inv_eps,
                  src_i, src_j, src_eps, src_wave, hard,
                  prb_i, prb_j, records,
                  t0, n, limit):
    ahy_ = ahy[None, :-1]
    bhy_ = bhy[None, :-1]
    ahx_ = ahx[:-1, None]
    bhx_ = bhx[:-1, None]
    aex_ = aex[1:-1, None]
    bex_ = bex[1:-1, None]
    aey_ = aey[None, 1:-1]
    bey_ = bey[None, 1:-1]
    m = mask[1:-1, 1:-1]
    ie = inv_eps[1:-1, 1:-1]
    # slab columns in interior coordinates
    s0 = max(slab_i0, 1) - 1
    s1 = max(min(slab_i1, ez.shape[0] - 1) - 1, s0)

    for k in range(t0, t0 + n):
        hx[:, :-1] = ahy_ * hx[:, :-1] - bhy_ * (ez[:, 1:] - ez[:, :-1])
        hy[:-1, :] = ahx_ * hy[:-1, :] + bhx_ * (ez[1:, :] - ez[:-1, :])

        dzx[1:-1, 1:-1] = m * (aex_ * dzx[1:-1, 1:-1] + bex_ * (hy[1:-1, 1:-1] - hy[:-2, 1:-1]))
        dzy[1:-1, 1:-1] = m * (aey_ * dzy[1:-1, 1:-1] - bey_ * (hx[1:-1, 1:-1] - hx[1:-1, :-2]))

        if hard:
            dzx[src_i, src_j] = src_wave[:, k] * src_eps
            dzy[src_i, src_j] = 0.0
        else:
            dzx[src_i, src_j] = dzx[src_i, src_j] + src_wave[:, k] * src_eps

        total = dzx[1:-1, 1:-1] + dzy[1:-1, 1:-1]
        inner = total * ie
        if s1 > s0:
            inner[s0:s1] = total[s0:s1] * slab_inv_eps[k - t0]
        ez[1:-1, 1:-1] = inner

        records[k - t0] = ez[prb_i, prb_j]

        peak = np.abs(inner).max()
        if not peak <= limit:
            return k
    return -1


try:
    if os.environ.get("FLOQUET_ELM_PURE"):
        raise ImportError("pure-python kernel requested")
    from ._fdtd_core import advance as advance_compiled
except ImportError:
    advance_compiled = None

if advance_compiled is not None:
    advance = advance_compiled
    KERNEL = "cython"
else:
    advance = advance_numpy
    KERNEL = "numpy"


def get_kernel(name: str | None = None):
    """Return ``(name, callable)`` for ``"cython"``, ``"numpy"`` or the default."""
    if name is None:
        return KERNEL, advance
    if name == "numpy":
        return "numpy", advance_numpy
    if name == "cython":
        if advance_compiled is None:
            raise RuntimeError("compiled FDTD kernel is not built")
        return "cython", advance_compiled
    raise ValueError(f"unknown kernel {name!r}")
