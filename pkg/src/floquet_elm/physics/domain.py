"""Simulation domain: Yee grid, modulated slab, PEC scatterers, node layout.

Layout along x (left to right): PML | source column | slab | scatterer
region | probe column | PML.  The slab spans the full height, through the
PML, so the absorbing layer also terminates the slab.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..config import ConfigError, DomainConfig, check_domain


@dataclass(frozen=True)
class GridSpec:
    dx: float
    dy: float
    dt: float
    nx: int
    ny: int
    n_steps: int
    wavelength: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if self.dt > self.dx / (math.sqrt(2.0) * self.c) * (1 + 1e-12):
            raise ConfigError("domain.grid.courant", "time step violates the 2D Courant bound")


@dataclass(frozen=True)
class ModulatedSlab:
    """Dielectric slab with ``eps_r(t) = eps_s + delta_m * cos(omega_m t + phase)``.

    ``columns`` is the half-open x-index range ``[i0, i1)`` of slab cells.
    """

    eps_s: float = 3.0
    delta_m: float = 0.3
    omega_m: float = 0.0
    phase: float = 0.0
    columns: tuple[int, int] = (0, 0)

    def __post_init__(self):
        if not self.delta_m < self.eps_s:
            raise ValueError("modulation depth must stay below eps_s")

    def permittivity(self, t):
        return self.eps_s + self.delta_m * np.cos(self.omega_m * np.asarray(t) + self.phase)

    def with_phase(self, phase: float) -> "ModulatedSlab":
        return ModulatedSlab(self.eps_s, self.delta_m, self.omega_m, phase, self.columns)

    def with_depth(self, delta_m: float) -> "ModulatedSlab":
        return ModulatedSlab(self.eps_s, delta_m, self.omega_m, self.phase, self.columns)


@dataclass(frozen=True)
class Disc:
    cx: float
    cy: float
    radius: float

    def cells(self, dx: float, nx: int, ny: int) -> tuple[np.ndarray, np.ndarray]:
        r = self.radius / dx
        x0, y0 = self.cx / dx, self.cy / dx
        i = np.arange(max(0, int(x0 - r) - 1), min(nx, int(x0 + r) + 2))
        j = np.arange(max(0, int(y0 - r) - 1), min(ny, int(y0 + r) + 2))
        ii, jj = np.meshgrid(i, j, indexing="ij")
        inside = (ii - x0) ** 2 + (jj - y0) ** 2 <= r * r
        return ii[inside], jj[inside]


@dataclass(frozen=True)
class ScattererSet:
    seed: int
    discs: tuple[Disc, ...]


@dataclass
class PMLProfile:
    """Exponential-update coefficients for the split-field PML.

    Arrays named ``a*``/``b*`` multiply the old field and the curl term; the
    ``b`` arrays already include ``1/dx``.
    """

    ahx: np.ndarray
    bhx: np.ndarray
    ahy: np.ndarray
    bhy: np.ndarray
    aex: np.ndarray
    bex: np.ndarray
    aey: np.ndarray
    bey: np.ndarray


def _sigma(pos: np.ndarray, lo: float, hi: float, thickness: float, smax: float, order: float):
    depth = np.maximum(lo - pos, 0.0) + np.maximum(pos - hi, 0.0)
    if thickness <= 0:
        return np.zeros_like(pos)
    return smax * (depth / thickness) ** order


def _exp_coeffs(sigma: np.ndarray, dt: float, d: float) -> tuple[np.ndarray, np.ndarray]:
    a = np.exp(-sigma * dt)
    with np.errstate(divide="ignore", invalid="ignore"):
        b = np.where(sigma > 0, (1.0 - a) / np.where(sigma > 0, sigma, 1.0), dt)
    return a, b / d


def pml_profile(grid: GridSpec, cells: int, order: float, reflection: float) -> PMLProfile:
    """Polynomially graded conductivity, ``sigma(d) = smax (d/L)^order``.

    ``smax`` targets normal-incidence reflection ``reflection``; magnetic
    conductivity equals electric conductivity (normalized units), which is
    the matched condition for any non-dispersive permittivity under the
    D-field update.
    """
    dx, dy, dt = grid.dx, grid.dy, grid.dt
    lx, ly = cells * dx, cells * dy
    smax_x = -(order + 1) * math.log(reflection) / (2.0 * lx) if cells else 0.0
    smax_y = -(order + 1) * math.log(reflection) / (2.0 * ly) if cells else 0.0
    xe = np.arange(grid.nx) * dx
    ye = np.arange(grid.ny) * dy
    xh = (np.arange(grid.nx) + 0.5) * dx
    yh = (np.arange(grid.ny) + 0.5) * dy
    xlo, xhi = lx, (grid.nx - 1) * dx - lx
    ylo, yhi = ly, (grid.ny - 1) * dy - ly
    ahx, bhx = _exp_coeffs(_sigma(xh, xlo, xhi, lx, smax_x, order), dt, dx)
    ahy, bhy = _exp_coeffs(_sigma(yh, ylo, yhi, ly, smax_y, order), dt, dy)
    aex, bex = _exp_coeffs(_sigma(xe, xlo, xhi, lx, smax_x, order), dt, dx)
    aey, bey = _exp_coeffs(_sigma(ye, ylo, yhi, ly, smax_y, order), dt, dy)
    return PMLProfile(ahx, bhx, ahy, bhy, aex, bex, aey, bey)


@dataclass
class SimulationDomain:
    grid: GridSpec
    slab: ModulatedSlab
    scatterers: ScattererSet
    source_cells: np.ndarray
    probe_cells: np.ndarray
    pml_cells: int
    pml: PMLProfile
    inv_eps: np.ndarray
    mask: np.ndarray
    source_mode: str = "soft"
    blowup_factor: float = 1e6
    config: DomainConfig | None = field(default=None, repr=False)

    @property
    def n_sources(self) -> int:
        return len(self.source_cells)

    @property
    def n_probes(self) -> int:
        return len(self.probe_cells)

    def pec_cells(self) -> np.ndarray:
        return np.argwhere(self.mask == 0.0)

    def scatterer_layout(self) -> list[tuple[float, float, float]]:
        return [(d.cx, d.cy, d.radius) for d in self.scatterers.discs]


def node_rows(n: int, ny: int, pml: int, margin_cells: int) -> np.ndarray:
    lo = pml + margin_cells
    hi = ny - 1 - pml - margin_cells
    if n == 1:
        rows = np.array([(lo + hi) // 2])
    else:
        rows = np.rint(np.linspace(lo, hi, n)).astype(int)
    if len(np.unique(rows)) != n or hi < lo:
        raise ConfigError("domain.nodes", f"cannot fit {n} distinct nodes in {hi - lo + 1} rows")
    return rows


def place_scatterers(cfg: DomainConfig, grid: GridSpec, x_range: tuple[float, float],
                     y_range: tuple[float, float], seed: int) -> ScattererSet:
    """Seeded rejection sampling of non-overlapping PEC discs."""
    sc = cfg.scatterers
    rng = np.random.default_rng(seed)
    r = sc.radius
    (x0, x1), (y0, y1) = x_range, y_range
    x0, x1, y0, y1 = x0 + r, x1 - r, y0 + r, y1 - r
    if sc.count and (x1 <= x0 or y1 <= y0):
        raise ConfigError("domain.scatterers", "no room between slab and probes for scatterers")
    discs: list[Disc] = []
    tries = 0
    while len(discs) < sc.count:
        tries += 1
        if tries > sc.max_tries:
            raise ConfigError(
                "domain.scatterers",
                f"could not place {sc.count} scatterers without overlap after {sc.max_tries} tries",
            )
        cx, cy = rng.uniform(x0, x1), rng.uniform(y0, y1)
        if all(math.hypot(cx - d.cx, cy - d.cy) >= 2 * r + sc.gap for d in discs):
            discs.append(Disc(float(cx), float(cy), r))
    return ScattererSet(seed, tuple(discs))


def build_domain(cfg: DomainConfig | None = None, seed: int = 7, *,
                 scatterers: bool = True) -> SimulationDomain:
    """Lay out the grid, slab, scatterers, sources and probes.

    ``scatterers=False`` gives the bare-slab geometry used by phase-law checks.
    """
    cfg = cfg or DomainConfig()
    problems = check_domain(cfg)
    if problems:
        path, _, msg = problems[0].partition(": ")
        raise ConfigError(path, msg)
    g = cfg.grid
    dx = cfg.dx
    nx = int(round(g.width / dx))
    ny = int(round(g.height / dx))
    grid = GridSpec(dx, dx, cfg.dt, nx, ny, g.n_steps, g.wavelength)
    npml = cfg.boundary.pml_cells
    margin = max(1, int(round(cfg.nodes.edge_margin / dx)))

    i_src = npml + margin
    i_prb = nx - 1 - npml - margin
    thick = max(1, int(round(cfg.slab.thickness / dx)))
    mid = (i_src + i_prb) // 2
    s0 = mid - thick // 2
    s1 = s0 + thick
    if not (i_src < s0 and s1 < i_prb):
        raise ConfigError("domain.grid.width", "domain too narrow for sources, slab and probes")
    slab = ModulatedSlab(cfg.slab.eps_s, cfg.slab.delta_m, cfg.omega_m, cfg.slab.phase, (s0, s1))

    margin_y = max(1, int(round(0.1 / dx)))
    src_rows = node_rows(cfg.nodes.n_sources, ny, npml, margin_y)
    prb_rows = node_rows(cfg.nodes.n_probes, ny, npml, margin_y)
    source_cells = np.column_stack([np.full(len(src_rows), i_src), src_rows]).astype(np.intp)
    probe_cells = np.column_stack([np.full(len(prb_rows), i_prb), prb_rows]).astype(np.intp)

    gap = cfg.scatterers.gap
    if scatterers and cfg.scatterers.count:
        xr = (s1 * dx + gap, i_prb * dx - gap)
        yr = ((npml + 1) * dx + gap, (ny - 2 - npml) * dx - gap)
        scat = place_scatterers(cfg, grid, xr, yr, seed)
    else:
        scat = ScattererSet(seed, ())

    inv_eps = np.ones((nx, ny))
    inv_eps[s0:s1, :] = 1.0 / cfg.slab.eps_s
    mask = np.ones((nx, ny))
    mask[0, :] = mask[-1, :] = 0.0
    mask[:, 0] = mask[:, -1] = 0.0
    for d in scat.discs:
        ii, jj = d.cells(dx, nx, ny)
        mask[ii, jj] = 0.0
    for cells in (source_cells, probe_cells):
        if np.any(mask[cells[:, 0], cells[:, 1]] == 0.0):
            raise ConfigError("domain.scatterers", "a scatterer covers a node")

    pml = pml_profile(grid, npml, cfg.boundary.grading_order, cfg.boundary.reflection)
    return SimulationDomain(
        grid=grid, slab=slab, scatterers=scat,
        source_cells=source_cells, probe_cells=probe_cells,
        pml_cells=npml, pml=pml, inv_eps=inv_eps, mask=mask,
        source_mode=cfg.nodes.source_mode, blowup_factor=cfg.blowup_factor, config=cfg,
    )


def vacuum_domain(nx: int, ny: int, dx: float = 1 / 30, courant: float = 0.5, *,
                  pml_cells: int = 10, n_steps: int = 1000, source=None, probes=(),
                  order: float = 3.0, reflection: float = 1e-6) -> SimulationDomain:
    """Free-space box with explicit node cells, for verification runs."""
    grid = GridSpec(dx, dx, courant * dx, nx, ny, n_steps)
    mask = np.ones((nx, ny))
    mask[0, :] = mask[-1, :] = 0.0
    mask[:, 0] = mask[:, -1] = 0.0
    src = np.array([source if source is not None else (nx // 2, ny // 2)], dtype=np.intp).reshape(-1, 2)
    prb = np.array(list(probes), dtype=np.intp).reshape(-1, 2)
    return SimulationDomain(
        grid=grid, slab=ModulatedSlab(1.0, 0.0, 0.0, 0.0, (0, 0)),
        scatterers=ScattererSet(0, ()), source_cells=src, probe_cells=prb,
        pml_cells=pml_cells, pml=pml_profile(grid, pml_cells, order, reflection),
        inv_eps=np.ones((nx, ny)), mask=mask,
    )
