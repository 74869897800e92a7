"""Configuration objects, YAML loading and validation.

All simulation quantities are dimensionless: lengths in units of the
reference wavelength ``lambda0`` and ``c = 1``.  Band frequencies are given
in THz and mapped to simulation angular frequency through the mean carrier of
the first band, which corresponds to ``lambda0``.
"""
from __future__ import annotations

import copy
import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
import types
import typing
from typing import Any, get_type_hints

import yaml


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class GridConfig:
    wavelength: float = 1.0
    cells_per_wavelength: int = 30
    width: float = 15.0
    height: float = 8.0
    courant: float = 0.5
    n_steps: int = 10000


@dataclass
class BoundaryConfig:
    pml_cells: int = 10
    grading_order: float = 3.0
    reflection: float = 1e-6


@dataclass
class SlabConfig:
    eps_s: float = 3.0
    delta_m: float = 0.3
    thickness: float = 0.2
    phase: float = 0.0


@dataclass
class ScattererConfig:
    count: int = 5
    radius: float = 0.1
    gap: float = 0.1
    max_tries: int = 2000


@dataclass
class NodeConfig:
    n_sources: int = 10
    n_probes: int = 10
    edge_margin: float = 0.5
    source_mode: str = "soft"


@dataclass
class Band:
    name: str
    f_low: float
    f_high: float

    @property
    def center(self) -> float:
        return 0.5 * (self.f_low + self.f_high)


def _default_bands() -> list[Band]:
    return [Band("digits", 4.0, 4.125), Band("xray", 4.375, 4.5)]


@dataclass
class HarmonicConfig:
    K: int = 5
    window: int = 4096
    skip_fraction: float = 0.4


@dataclass
class DomainConfig:
    grid: GridConfig = field(default_factory=GridConfig)
    boundary: BoundaryConfig = field(default_factory=BoundaryConfig)
    slab: SlabConfig = field(default_factory=SlabConfig)
    scatterers: ScattererConfig = field(default_factory=ScattererConfig)
    nodes: NodeConfig = field(default_factory=NodeConfig)
    bands: list[Band] = field(default_factory=_default_bands)
    harmonics: HarmonicConfig = field(default_factory=HarmonicConfig)
    blowup_factor: float = 1e6

    @property
    def dx(self) -> float:
        return self.grid.wavelength / self.grid.cells_per_wavelength

    @property
    def dt(self) -> float:
        return self.grid.courant * self.dx

    @property
    def reference_frequency(self) -> float:
        """THz value mapped onto ``lambda0`` (mean carrier of the first band)."""
        return self.bands[0].center

    def omega(self, f_thz: float) -> float:
        """Simulation angular frequency of a THz value."""
        return 2.0 * math.pi * f_thz / self.reference_frequency / self.grid.wavelength

    def carriers(self, band: int = 0) -> tuple[float, float]:
        b = self.bands[band]
        return self.omega(b.f_low), self.omega(b.f_high)

    @property
    def omega_m(self) -> float:
        w1, w2 = self.carriers(0)
        return abs(w1 - w2) / 2.0

    def modulation_period_steps(self) -> float:
        return 2.0 * math.pi / self.omega_m / self.dt


def _coerce(value: Any, typ: Any, path: str) -> Any:
    origin = typing.get_origin(typ)
    if origin in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(typ) if a is not type(None)]
        if value is None:
            return None
        return _coerce(value, args[0], path) if len(args) == 1 else value
    if typ is bool:
        if not isinstance(value, bool):
            raise ConfigError(path, f"expected true/false, got {value!r}")
        return value
    if typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(path, f"expected a number, got {value!r}")
        return float(value)
    if typ is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(path, f"expected an integer, got {value!r}")
        return value
    if typ is str:
        if not isinstance(value, str):
            raise ConfigError(path, f"expected a string, got {value!r}")
        return value
    return value


def _build(cls: type, data: dict, path: str):
    if not isinstance(data, dict):
        raise ConfigError(path, "expected a mapping")
    fields = {f.name: f for f in dataclasses.fields(cls) if f.init}
    hints = get_type_hints(cls)
    unknown = set(data) - set(fields)
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"{path}.{key}" if path else key, "unknown key")
    kwargs = {}
    for name, f in fields.items():
        if name not in data:
            continue
        sub = f"{path}.{name}" if path else name
        value = data[name]
        if name == "bands":
            if not isinstance(value, list) or not value:
                raise ConfigError(sub, "expected a non-empty list of bands")
            kwargs[name] = [_build(Band, b, f"{sub}[{i}]") for i, b in enumerate(value)]
        elif dataclasses.is_dataclass(hints[name]):
            kwargs[name] = _build(hints[name], value, sub)
        else:
            kwargs[name] = _coerce(value, hints[name], sub)
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(path or "<root>", str(exc)) from None


def domain_from_dict(data: dict | None) -> DomainConfig:
    return _build(DomainConfig, data or {}, "domain")


def to_dict(obj):
    """Plain-data snapshot of a config dataclass (derived ``init=False`` fields omitted)."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_dict(getattr(obj, f.name)) for f in dataclasses.fields(obj) if f.init}
    if isinstance(obj, (list, tuple)):
        return [to_dict(v) for v in obj]
    return copy.deepcopy(obj)


def check_domain(cfg: DomainConfig) -> list[str]:
    """Return a list of ``path: problem`` strings; empty when valid."""
    problems = []
    g = cfg.grid
    if g.cells_per_wavelength < 4:
        problems.append("domain.grid.cells_per_wavelength: fewer than 4 cells per wavelength")
    if g.courant <= 0:
        problems.append("domain.grid.courant: must be positive")
    elif g.courant > 1.0 / math.sqrt(2.0) + 1e-12:
        problems.append(
            f"domain.grid.courant: dt = {g.courant}*dx/c violates the 2D Courant bound dx/(sqrt(2) c)"
        )
    if g.n_steps <= 0:
        problems.append("domain.grid.n_steps: must be positive")
    if g.width <= 0 or g.height <= 0:
        problems.append("domain.grid: width and height must be positive")
    s = cfg.slab
    if s.delta_m < 0:
        problems.append("domain.slab.delta_m: must be non-negative")
    if s.delta_m >= s.eps_s:
        problems.append("domain.slab.delta_m: modulation depth must be below eps_s")
    if s.thickness <= 0:
        problems.append("domain.slab.thickness: must be positive")
    if cfg.nodes.source_mode not in ("soft", "hard"):
        problems.append("domain.nodes.source_mode: expected 'soft' or 'hard'")
    if cfg.nodes.n_sources < 1 or cfg.nodes.n_probes < 1:
        problems.append("domain.nodes: need at least one source and one probe")
    if cfg.boundary.pml_cells < 0:
        problems.append("domain.boundary.pml_cells: must be non-negative")
    if not 0 < cfg.boundary.reflection < 1:
        problems.append("domain.boundary.reflection: must lie in (0, 1)")
    for i, b in enumerate(cfg.bands):
        if not b.f_low < b.f_high:
            problems.append(f"domain.bands[{i}]: f_low must be below f_high")
    ordered = sorted(enumerate(cfg.bands), key=lambda ib: ib[1].f_low)
    for (i, a), (j, b) in zip(ordered, ordered[1:]):
        if b.f_low <= a.f_high:
            problems.append(f"domain.bands[{j}]: overlaps band {i} ({a.name})")
    widths = {round(b.f_high - b.f_low, 12) for b in cfg.bands}
    if len(widths) > 1:
        problems.append("domain.bands: all bands must share one modulation frequency (equal widths)")
    h = cfg.harmonics
    if h.K < 0:
        problems.append("domain.harmonics.K: must be non-negative")
    if not 0 <= h.skip_fraction < 1:
        problems.append("domain.harmonics.skip_fraction: must lie in [0, 1)")
    return problems


def deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in (override or {}).items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = deep_merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def load_yaml(path: str | Path) -> dict:
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(str(path), f"not valid YAML ({exc})") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(str(path), "top level must be a mapping")
    return data
