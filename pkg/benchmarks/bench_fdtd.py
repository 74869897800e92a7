"""Compare the compiled and pure-numpy FDTD kernels on the default domain.

    python benchmarks/bench_fdtd.py --steps 400 --repeat 3
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from floquet_elm.config import DomainConfig
from floquet_elm.encoding import make_mask, make_waveforms, mask_project
from floquet_elm.physics import build_domain, run
from floquet_elm.physics.kernels import advance_compiled


def time_kernel(domain, sources, slab, steps: int, kernel: str, repeat: int):
    best, rec = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        rec = run(domain, sources, slab, n_steps=steps, kernel=kernel)
        best = min(best, time.perf_counter() - t0)
    return best, rec


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=400)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--cells", type=int, default=30, help="cells per wavelength")
    args = ap.parse_args(argv)

    cfg = DomainConfig()
    cfg.grid.cells_per_wavelength = args.cells
    cfg.grid.n_steps = args.steps
    dom = build_domain(cfg)
    g = dom.grid
    z = mask_project(0.7, make_mask(1, dom.n_sources, 0))
    src = make_waveforms(z, *cfg.carriers(0), args.steps, g.dt)
    slab = dom.slab.with_phase(0.3)
    print(f"grid {g.nx}x{g.ny}, {args.steps} steps, best of {args.repeat}")

    results = {}
    kernels = ["numpy"] + (["cython"] if advance_compiled is not None else [])
    for k in kernels:
        t, rec = time_kernel(dom, src, slab, args.steps, k, args.repeat)
        results[k] = (t, rec)
        print(f"  {k:7s} {1e3 * t / args.steps:8.3f} ms/step  "
              f"{g.nx * g.ny * args.steps / t / 1e6:8.1f} Mcell-updates/s")
    if "cython" in results:
        t_np, r_np = results["numpy"]
        t_cy, r_cy = results["cython"]
        diff = float(np.max(np.abs(r_np.data - r_cy.data)))
        print(f"  speedup {t_np / t_cy:.1f}x, max |probe difference| = {diff:.3g}")
    else:
        print("  compiled kernel not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
