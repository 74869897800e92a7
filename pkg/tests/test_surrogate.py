import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from floquet_elm.backends import SurrogateBackend
from floquet_elm.surrogate import SurrogateConfig, multiplexed_amplitudes, surrogate_amplitudes, surrogate_scatter

CFG = SurrogateConfig(4, 6, K=3, seed=1, n_bands=2)
vec = arrays(np.float64, 4, elements=st.floats(-2, 2))
phase = st.floats(0, 2 * math.pi)


@given(vec, vec, st.floats(-2, 2), phase)
def test_linear_at_fixed_phase(x, y, c, phi):
    A = surrogate_amplitudes(np.stack([x, y, x + c * y]), phi, CFG)
    assert np.allclose(A[2], A[0] + c * A[1], atol=1e-9)


@given(vec, phase)
def test_intensity_invariant_under_half_turn(z, phi):
    """Both contributions to an order differ by two in phase index, so a shift of pi flips them together."""
    a = surrogate_amplitudes(z[None], [phi], CFG)
    b = surrogate_amplitudes(z[None], [phi + math.pi], CFG)
    assert np.allclose(np.abs(a), np.abs(b), atol=1e-9)


@given(vec, phase, phase)
def test_two_carrier_phase_structure(z, phi, dphi):
    K = CFG.K
    k = np.arange(-K, K + 1)
    a = surrogate_amplitudes(z[None], [phi], CFG)[0] * np.exp(-1j * k * phi)
    b = surrogate_amplitudes(z[None], [phi + dphi], CFG)[0] * np.exp(-1j * k * (phi + dphi))
    # a = e^{i phi} X + e^{-i phi} Y for fixed X, Y
    c0 = surrogate_amplitudes(z[None], [0.0], CFG)[0]
    c1 = surrogate_amplitudes(z[None], [math.pi / 2], CFG)[0] * np.exp(-1j * k * math.pi / 2)
    X = (c0 - 1j * c1) / 2
    Y = (c0 + 1j * c1) / 2
    assert np.allclose(a, np.exp(1j * phi) * X + np.exp(-1j * phi) * Y, atol=1e-9)
    assert np.allclose(b, np.exp(1j * (phi + dphi)) * X + np.exp(-1j * (phi + dphi)) * Y, atol=1e-9)


def test_seeded_and_decaying():
    a = SurrogateConfig(4, 50, K=5, seed=3)
    b = SurrogateConfig(4, 50, K=5, seed=3)
    assert all(np.array_equal(x, y) for x, y in zip(a.c1, b.c1))
    mag = np.abs(a.c1[0]).mean(axis=0)
    assert mag[0] < mag[a.K + 1] and mag[-1] < mag[a.K + 1]


def test_band_isolation():
    rng = np.random.default_rng(0)
    Za, Zb, Zb2 = rng.normal(size=(3, 5, 4))
    phis = rng.uniform(0, 2 * math.pi, 5)
    a1, _ = multiplexed_amplitudes(Za, Zb, phis, CFG)
    a2, b2 = multiplexed_amplitudes(Za, Zb2, phis, CFG)
    assert np.array_equal(a1, a2)
    assert not np.allclose(b2, surrogate_amplitudes(Zb2, phis, CFG, 0))
    with pytest.raises(ValueError):
        multiplexed_amplitudes(Za, Zb, phis, SurrogateConfig(4, 6))


def test_shapes_and_errors():
    A = surrogate_amplitudes(np.ones((3, 4)), [0.1, 0.2, 0.3], CFG)
    assert A.shape == (3, 6, 7)
    with pytest.raises(ValueError):
        surrogate_amplitudes(np.ones((3, 5)), 0.0, CFG)
    spectra = surrogate_scatter(np.ones(4), 0.4, CFG)
    assert len(spectra) == 6 and list(spectra[0].orders) == list(range(-3, 4))
    assert np.allclose(spectra[2].amplitudes, surrogate_amplitudes(np.ones((1, 4)), 0.4, CFG)[0, 2])
    be = SurrogateBackend(CFG)
    assert be.K == 3 and be.manifest()["backend"] == "surrogate"
