import os

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_domain_config():
    """Coarse, short configuration for engine-level tests."""
    from floquet_elm.config import DomainConfig

    cfg = DomainConfig()
    cfg.grid.cells_per_wavelength = 12
    cfg.grid.width = 8.0
    cfg.grid.height = 4.0
    cfg.grid.n_steps = 600
    cfg.boundary.pml_cells = 6
    cfg.scatterers.count = 2
    return cfg


def write_abalone_like(path, n=400, seed=0):
    """CSV with the abalone schema; rings depend smoothly on the measurements."""
    r = np.random.default_rng(seed)
    sex = r.choice(["M", "F", "I"], n)
    length = r.uniform(0.1, 0.8, n)
    diameter = 0.8 * length + r.normal(0, 0.02, n)
    height = 0.25 * length + r.normal(0, 0.01, n)
    whole = 2.0 * length ** 3 + r.uniform(0, 0.05, n)
    shucked, viscera, shell = 0.45 * whole, 0.2 * whole, 0.3 * whole
    rings = np.clip(np.round(3 + 20 * length + 8 * shell + r.normal(0, 0.7, n)), 1, 29).astype(int)
    with open(path, "w") as fh:
        for row in zip(sex, length, diameter, height, whole, shucked, viscera, shell, rings):
            fh.write(",".join([row[0]] + [f"{v:.4f}" for v in row[1:-1]] + [str(row[-1])]) + "\n")
    return path


@pytest.fixture
def abalone_csv(tmp_path):
    return write_abalone_like(tmp_path / "abalone.data")


ACCEPTANCE_LINES = {}


@pytest.fixture
def criterion():
    """``criterion(number, title, passed, detail)`` records one acceptance verdict."""
    def record(number, title, passed, detail=""):
        line = f"criterion {number} {'PASS' if passed else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES[number] = line
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
