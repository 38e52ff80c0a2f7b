import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inls import functionals as F
from inls.model import CartesianGrid, Field
from inls.transforms import (ResolutionError, SFamilyParams, SupportError, closed_form_S,
                             inverse_pseudo_conformal, max_resolvable_scale, phase, pseudo_conformal,
                             resample, s_family, s_family_by_symmetry, scale, spectral_tail,
                             standing_wave)


def gauss(grid, a=1.0):
    return Field(np.exp(-a * grid.r2) + 0j, grid)


def test_resample_band_limited_function():
    g = CartesianGrid(1, 10.0, 256)
    u = gauss(g)
    pts = np.linspace(-3, 3, 101)
    np.testing.assert_allclose(resample(u.values, g, [pts]), np.exp(-pts**2), atol=1e-8)


def test_resample_outside_box_is_zero():
    g = CartesianGrid(1, 5.0, 64)
    assert resample(gauss(g).values, g, [np.array([6.0, -7.0])]).tolist() == [0, 0]


@settings(max_examples=15, deadline=None)
@given(st.floats(1.0, 3.0))
def test_scale_preserves_mass(lam):
    g = CartesianGrid(1, 12.0, 1024)
    u = gauss(g)
    assert F.mass(scale(u, lam)) == pytest.approx(F.mass(u), rel=1e-9)


def test_scale_matches_analytic():
    g = CartesianGrid(1, 12.0, 512)
    v = scale(gauss(g), 2.0)
    np.testing.assert_allclose(v.values, math.sqrt(2) * np.exp(-4 * g.r2), atol=1e-8)


def test_scale_down_rejects_loss_of_support():
    g = CartesianGrid(1, 6.0, 256)
    with pytest.raises(SupportError):
        scale(gauss(g, 0.05), 0.5)


def test_phase_is_pointwise():
    g = CartesianGrid(1, 5.0, 16)
    u = gauss(g)
    np.testing.assert_allclose(phase(u, 0.7).values, np.exp(0.7j) * u.values)


@pytest.mark.parametrize("s", [1.0, 3.0, 5.0])
def test_pseudo_conformal_of_standing_wave(gs, s):
    # odd integer s: scaled nodes fall on nodes, so the comparison is exact up to round-off
    g = CartesianGrid(1, 20.0, 1024)
    v = standing_wave(gs, g, s, lambda0=1.3, gamma0=0.4)
    u = pseudo_conformal(v, s, T=1.0)
    ref = s_family(SFamilyParams(1.0, 1.3, 0.4), gs, 1.0 - 1.0 / s, g, resolution_tol=None)
    assert np.max(np.abs(u.values - ref.values)) < 1e-8


def test_pseudo_conformal_round_trip():
    g = CartesianGrid(1, 20.0, 2048)
    v = Field(np.exp(-g.r2 + 0.2j * g.axis), g, t=2.0)
    w = pseudo_conformal(v, 2.0, T=1.0)
    assert w.t == pytest.approx(0.5)
    back = inverse_pseudo_conformal(w, T=1.0)
    assert back.t == pytest.approx(2.0)
    inner = np.abs(g.axis) < 8
    np.testing.assert_allclose(back.values[inner], v.values[inner], atol=1e-7)


def test_s_family_mass_is_critical(gs):
    g = CartesianGrid(1, 20.0, 4096)
    for t in (0.0, 0.3, 0.6):
        u = s_family(SFamilyParams(1.0), gs, t, g)
        assert F.mass(u) == pytest.approx(gs.mass_sq, rel=1e-4)


def test_s_family_gradient_formula(gs):
    # ‖∇S(t)‖² = λ₀²‖∇ψ‖²/τ² + Γ(ψ)/(4λ₀²)
    g = CartesianGrid(1, 16.0, 2**15)
    sp = SFamilyParams(1.0, 1.5)
    tau = 0.5
    u = s_family(sp, gs, 1.0 - tau, g)
    psi = s_family(SFamilyParams(1.0, 1.0), gs, 0.0, CartesianGrid(1, 30.0, 2**15))
    gamma_psi = F.virial_gamma(Field(np.abs(psi.values), psi.grid))
    exact = sp.lambda0**2 * gs.grad_sq / tau**2 + gamma_psi / (4 * sp.lambda0**2)
    assert F.kinetic_integral(u) == pytest.approx(exact, rel=1e-4)


def test_s_family_guards(gs):
    sp = SFamilyParams(1.0, 1.0)
    with pytest.raises(SupportError):
        s_family(sp, gs, 0.0, CartesianGrid(1, 3.0, 256))
    with pytest.raises(ResolutionError):
        s_family(sp, gs, 0.0, CartesianGrid(1, 20.0, 128))
    with pytest.raises(ValueError):
        s_family(sp, gs, 1.0, CartesianGrid(1, 20.0, 1024))


def test_max_resolvable_scale(gs):
    g = CartesianGrid(1, 20.0, 1024)
    sp = SFamilyParams(1.0)
    tau = max_resolvable_scale(gs, g, sp)
    assert 0 < tau < 1
    s_family(sp, gs, 1.0 - tau * 1.01, g)
    with pytest.raises((ResolutionError, SupportError)):
        s_family(sp, gs, 1.0 - tau * 0.9, g)


@pytest.mark.parametrize("T, lam, gam", [(1.0, 1.0, 0.0), (0.7, 2.0, 1.1), (2.5, 0.5, -0.3)])
def test_symmetry_construction_matches_formula(gs, T, lam, gam):
    g = CartesianGrid(1, 20.0, 1024)
    sp = SFamilyParams(T, lam, gam)
    u = s_family_by_symmetry(sp, gs)
    for t in (0.0, 0.4 * T):
        direct = s_family(sp, gs, t, g, amplitude_tol=1.0, resolution_tol=None).values
        np.testing.assert_allclose(u(t, g.coords), direct, atol=1e-12)


def test_closed_form_S_blows_up_at_zero(gs):
    S = closed_form_S(gs)
    x = (np.array([0.0]),)
    # |S(t, 0)| = ψ(0)|t|^{-N/2}
    assert abs(S(-1e-4, x)[0]) == pytest.approx(100 * abs(S(-1.0, x)[0]))


def test_spectral_tail():
    g = CartesianGrid(1, 10.0, 256)
    assert spectral_tail(gauss(g)) < 1e-20
    noisy = Field(np.random.default_rng(0).standard_normal(256) + 0j, g)
    assert spectral_tail(noisy) > 0.2
