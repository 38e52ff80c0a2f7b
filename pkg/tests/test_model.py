import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inls.model import (CartesianGrid, Field, NonFiniteFieldError, ParameterError, RadialGrid,
                        make_params, noncritical_params, weighted_potential_nodes)


@pytest.mark.parametrize("N, b, p", [(1, 0.5, 4.0), (2, 1.0, 2.0), (3, 1.0, 5.0 / 3.0), (2, 1.5, 1.5)])
def test_critical_power(N, b, p):
    assert make_params(N, b).p == pytest.approx(p)


@pytest.mark.parametrize("N, b", [(1, 0.0), (1, 1.0 + 1e-9), (2, 2.0), (3, -0.1), (0, 0.5), (1.5, 0.5)])
def test_rejects_inadmissible(N, b):
    with pytest.raises(ParameterError):
        make_params(N, b)


def test_b_zero_only_on_request():
    assert make_params(1, 0.0, allow_b_zero=True).p == 5.0


def test_noncritical_bounds():
    assert not noncritical_params(1, 0.5, 3.0).critical
    with pytest.raises(ParameterError):
        noncritical_params(3, 1.0, 4.0)


@pytest.mark.parametrize("M", [3, 0, -2])
def test_grid_rejects_odd_or_small_M(M):
    with pytest.raises(ValueError):
        CartesianGrid(1, 10.0, M)


def test_cell_centered_grid_avoids_origin():
    g = CartesianGrid(2, 5.0, 64)
    assert g.r.min() == pytest.approx(g.h / math.sqrt(2))
    assert g.axis[0] == pytest.approx(-5.0 + g.h / 2)


def test_wavenumbers_match_fft_convention():
    g = CartesianGrid(1, math.pi, 8)
    (k,) = g.wavenumbers
    np.testing.assert_allclose(np.sort(k.ravel()), np.arange(-4, 4))


def test_field_rejects_non_finite():
    g = CartesianGrid(1, 1.0, 4)
    with pytest.raises(NonFiniteFieldError):
        Field(np.array([0, np.nan, 0, 0], dtype=complex), g)


def test_field_shape_checked():
    with pytest.raises(ValueError):
        Field(np.zeros(5, dtype=complex), CartesianGrid(1, 1.0, 4))


def test_radial_grid_requires_increasing_nodes():
    with pytest.raises(ValueError):
        RadialGrid(np.array([0.1, 0.05, 0.2]))


@pytest.mark.parametrize("b", [0.25, 0.5, 0.9])
def test_weights_integrate_singularity_exactly(b):
    # cell averages of |x|^{-b} sum to the exact integral over the box
    g = CartesianGrid(1, 4.0, 64)
    w = weighted_potential_nodes(g, b)
    exact = 2.0 * 4.0 ** (1.0 - b) / (1.0 - b)
    assert g.integrate(w) == pytest.approx(exact, rel=1e-10)


def test_weights_far_from_origin_match_pointwise():
    g = CartesianGrid(1, 10.0, 512)
    w = weighted_potential_nodes(g, 0.5)
    far = g.r > 5.0
    np.testing.assert_allclose(w[far], g.r[far] ** -0.5, rtol=1e-4)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 0.95))
def test_weights_positive_and_radial(b):
    g = CartesianGrid(2, 3.0, 16)
    w = weighted_potential_nodes(g, b)
    assert np.all(w > 0)
    np.testing.assert_allclose(w, w.T, rtol=1e-12)
    np.testing.assert_allclose(w, w[::-1, :], rtol=1e-12)
