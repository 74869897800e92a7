# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled TMz leapfrog kernel.

Mirrors ``floquet_elm.physics.kernels.advance_numpy`` operation for
operation, so both paths produce identical records (no FMA contraction:
build with ``-ffp-contract=off``).
"""
from libc.math cimport fabs


def advance(double[:, ::1] ez, double[:, ::1] dzx, double[:, ::1] dzy,
            double[:, ::1] hx, double[:, ::1] hy,
            const double[::1] ahx, const double[::1] bhx,
            const double[::1] ahy, const double[::1] bhy,
            const double[::1] aex, const double[::1] bex,
            const double[::1] aey, const double[::1] bey,
            const double[:, ::1] inv_eps, const double[:, ::1] mask,
            Py_ssize_t slab_i0, Py_ssize_t slab_i1, const double[::1] slab_inv_eps,
            const Py_ssize_t[::1] src_i, const Py_ssize_t[::1] src_j,
            const double[::1] src_eps, const double[:, ::1] src_wave, bint hard,
            const Py_ssize_t[::1] prb_i, const Py_ssize_t[::1] prb_j,
            double[:, ::1] records,
            Py_ssize_t t0, Py_ssize_t n, double limit):
    """Advance ``n`` steps starting at step index ``t0``.

    Returns the step index at which ``|Ez|`` exceeded ``limit`` (or became
    non-finite), else -1.
    """
    cdef Py_ssize_t nx = ez.shape[0]
    cdef Py_ssize_t ny = ez.shape[1]
    cdef Py_ssize_t k, i, j, s, p, si, sj
    cdef Py_ssize_t n_src = src_i.shape[0]
    cdef Py_ssize_t n_prb = prb_i.shape[0]
    cdef double a, b, ie, v, peak, sl
    cdef Py_ssize_t blown = -1

    with nogil:
        for k in range(t0, t0 + n):
            for i in range(nx):
                for j in range(ny - 1):
                    hx[i, j] = ahy[j] * hx[i, j] - bhy[j] * (ez[i, j + 1] - ez[i, j])
            for i in range(nx - 1):
                a = ahx[i]
                b = bhx[i]
                for j in range(ny):
                    hy[i, j] = a * hy[i, j] + b * (ez[i + 1, j] - ez[i, j])

            sl = slab_inv_eps[k - t0]
            peak = 0.0
            for i in range(1, nx - 1):
                a = aex[i]
                b = bex[i]
                for j in range(1, ny - 1):
                    dzx[i, j] = mask[i, j] * (a * dzx[i, j] + b * (hy[i, j] - hy[i - 1, j]))
                    dzy[i, j] = mask[i, j] * (aey[j] * dzy[i, j] - bey[j] * (hx[i, j] - hx[i, j - 1]))
                    if slab_i0 <= i < slab_i1:
                        ie = sl
                    else:
                        ie = inv_eps[i, j]
                    v = (dzx[i, j] + dzy[i, j]) * ie
                    ez[i, j] = v
                    if fabs(v) > peak:
                        peak = fabs(v)

            for s in range(n_src):
                si = src_i[s]
                sj = src_j[s]
                if hard:
                    dzx[si, sj] = src_wave[s, k] * src_eps[s]
                    dzy[si, sj] = 0.0
                else:
                    dzx[si, sj] = dzx[si, sj] + src_wave[s, k] * src_eps[s]
                if slab_i0 <= si < slab_i1:
                    ie = sl
                else:
                    ie = inv_eps[si, sj]
                v = (dzx[si, sj] + dzy[si, sj]) * ie
                ez[si, sj] = v
                if fabs(v) > peak:
                    peak = fabs(v)

            for p in range(n_prb):
                records[k - t0, p] = ez[prb_i[p], prb_j[p]]

            if not (peak <= limit):
                blown = k
                break
    return blown
