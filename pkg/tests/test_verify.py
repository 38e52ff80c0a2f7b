import math

import numpy as np
import pytest

from inls import verify as V
from inls.evolution import DiagnosticsSeries, Termination, Trajectory
from inls.model import CartesianGrid, Field, make_params


def synthetic(T=1.0, alpha=1.0, t_last=0.999, n=200, conc=None, termination=Termination.BLOWUP_DETECTED):
    d = DiagnosticsSeries()
    t = 1.0 - np.geomspace(1.0, 1.0 - t_last, n)
    d.t = list(t)
    d.grad_norm = list(2.0 / (T - t) ** alpha)
    d.mass = [1.0] * n
    d.conc_fraction = list(conc if conc is not None else np.linspace(0.5, 0.99, n))
    g = CartesianGrid(1, 1.0, 2)
    return Trajectory([], d, termination, Field(np.zeros(2), g, t_last))


def test_check_report_relative_tolerance():
    assert V.CheckReport.make("a", 101.0, 100.0, 0.011).passed
    assert not V.CheckReport.make("a", 102.0, 100.0, 0.011).passed
    assert V.CheckReport.make("a", 1e-7, 0.0, 1e-6).passed
    assert not V.CheckReport.make("a", math.nan, 0.0, 1.0).passed


def test_upper_bound_report():
    assert V.CheckReport.upper_bound("u", 0.5, 1.0, 0.0).passed
    r = V.CheckReport.upper_bound("u", 1.5, 1.0, 0.1)
    assert not r.passed and r.observed == pytest.approx(0.5)


def test_fail_and_skip_lines():
    assert V.CheckReport.fail("x", "no growth").line().startswith("FAIL x")
    assert "no growth" in V.CheckReport.fail("x", "no growth").line()
    assert V.CheckReport.skip("y", "n/a").line().startswith("SKIP y")


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_fit_blowup_rate_known_T(alpha):
    a, _ = V.fit_blowup_rate(synthetic(alpha=alpha), T=1.0)
    assert a == pytest.approx(alpha, rel=1e-10)


def test_fit_blowup_rate_free_T():
    a, Tf = V.fit_blowup_rate(synthetic(T=1.0, t_last=0.995))
    assert a == pytest.approx(1.0, rel=1e-4)
    assert Tf == pytest.approx(1.0, rel=1e-5)


def test_fit_needs_a_decade():
    with pytest.raises(V.InsufficientRangeError):
        V.fit_blowup_rate(synthetic(t_last=0.5))


def test_blowup_rate_fails_without_blowup():
    r = V.check_blowup_rate(synthetic(t_last=0.5, termination=Termination.REACHED_T_END))
    assert not r.passed and not r.skipped
    r = V.check_blowup_rate(synthetic(t_last=0.5))
    assert not r.passed and "decade" in r.context["reason"]


def test_blowup_rate_passes_on_exact_rate():
    assert V.check_blowup_rate(synthetic(), T_known=1.0, tol=0.02).passed


def test_mass_concentration_reports():
    tr = synthetic()
    tr.diagnostics.conc_radius = 0.5
    frac, mono = V.check_mass_concentration(tr, 0.5, psi_mass=1.0)
    assert frac.passed and mono.passed
    tr = synthetic(conc=np.r_[np.linspace(0.5, 0.99, 199), 0.9])
    frac, mono = V.check_mass_concentration(tr, 0.5, psi_mass=1.0)
    assert not frac.passed and not mono.passed
    with pytest.raises(ValueError):
        V.check_mass_concentration(tr, 1.0, psi_mass=1.0)


def test_second_difference_of_parabola():
    t = np.linspace(0, 1, 11)
    _, d2 = V._second_difference(t, 3 * t**2 + t)
    np.testing.assert_allclose(d2, 6.0, rtol=1e-10)
    with pytest.raises(ValueError):
        V._second_difference(np.array([0, 1, 3.0]), np.zeros(3))


def test_gaussian_with_norm(grid):
    u = V.gaussian_with_norm(grid, 1.5)
    assert V.F.mass(u) == pytest.approx(2.25)


def test_random_bandlimited_is_band_limited(grid):
    u = V.random_bandlimited(grid, np.random.default_rng(0))
    uk = np.abs(np.fft.fft(u.values))
    k = np.abs(grid.wavenumbers[0])
    assert np.all(uk[k >= 0.2 * grid.k_nyquist] < 1e-10 * uk.max())


def test_classic_limit_and_pohozaev(gs):
    assert all(r.passed for r in V.check_classic_limit())
    assert all(r.passed for r in V.check_pohozaev(gs))


def test_weinstein_and_momentum_flux(params, small_grid):
    assert V.check_weinstein_minimality(params, small_grid, n_fields=10).passed
    assert V.check_modulated_energy(params, small_grid, n_trials=5).passed
    assert V.check_momentum_flux_bound(params, small_grid, n_fields=5).passed


def test_subcritical_bound_short(params, small_grid):
    u0 = V.gaussian_with_norm(small_grid, 0.9 * math.sqrt(V.shoot(params).mass_sq))
    assert V.check_subcritical_bound(u0, params, dt=1e-3, t_end=0.2).passed


def test_virial_short_critical(params):
    g = CartesianGrid(1, 40.0, 2048)
    u0 = V.gaussian_with_norm(g, 0.9 * math.sqrt(V.shoot(params).mass_sq))
    r = V.check_virial(u0, params, dt=1e-4, t_end=0.1, record_dt=2e-3, tol=1e-2)
    assert r.passed, r


def test_s_family_evolution_short(gs, params):
    g = CartesianGrid(1, 20.0, 2048)
    from inls.evolution import EvolutionConfig
    from inls.transforms import SFamilyParams

    r = V.check_s_family_evolution(SFamilyParams(1.0), 0.0, 0.05, g, EvolutionConfig(dt0=5e-5), gs, tol=1e-2)
    assert r.passed, r


def test_quick_suite_passes():
    reports = V.run_suite("quick")
    failed = [r.line() for r in reports if not r.passed]
    assert not failed


def test_unknown_suite():
    with pytest.raises(ValueError):
        V.run_suite("bogus")


def test_suite_config_rejects_bad_params():
    with pytest.raises(ValueError):
        V.SuiteConfig(b=1.5)
    assert V.SuiteConfig().refined().M == 2048
