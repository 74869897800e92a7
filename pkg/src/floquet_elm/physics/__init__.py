"""2D FDTD engine (TMz) with a time-modulated slab, PEC scatterers and PML."""
from .domain import (Disc, GridSpec, ModulatedSlab, ScattererSet, SimulationDomain,
                     build_domain, vacuum_domain)
from .engine import FieldState, ProbeRecords, SimulationError, SourceArray, run, step
from .kernels import KERNEL

__all__ = [
    "Disc", "GridSpec", "ModulatedSlab", "ScattererSet", "SimulationDomain",
    "build_domain", "vacuum_domain", "FieldState", "ProbeRecords", "SimulationError",
    "SourceArray", "run", "step", "KERNEL",
]
