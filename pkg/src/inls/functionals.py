"""Conserved quantities, the Weinstein functional and virial quantities.

Every integral is the periodic trapezoid rule (equal to the midpoint rule on a
cell-centered grid); derivatives are spectral.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .fft import fftn, ifftn
from .model import CartesianGrid, Field, NonFiniteFieldError, Params, weighted_potential_nodes


class BoundaryMassWarning(RuntimeWarning):
    """Field does not decay at the edge of the periodic box."""


class BoundaryMassError(RuntimeError):
    pass


@dataclass(frozen=True)
class EnergyBreakdown:
    kinetic: float
    potential: float
    total: float

    @classmethod
    def from_parts(cls, kinetic: float, potential: float) -> EnergyBreakdown:
        return cls(kinetic, potential, kinetic - potential)


@dataclass(frozen=True)
class VirialSample:
    t: float
    gamma: float
    gamma_prime: float


class Phase(NamedTuple):
    """A real phase function θ sampled on the grid together with its exact gradient."""

    values: np.ndarray
    grad: tuple[np.ndarray, ...]


def quadratic_phase(grid: CartesianGrid) -> Phase:
    """θ = |x|²/2, ∇θ = x."""
    full = [c + np.zeros(grid.shape) for c in grid.coords]
    return Phase(0.5 * grid.r2, tuple(full))


def gaussian_phase(grid: CartesianGrid, center, width: float, amplitude: float = 1.0) -> Phase:
    """θ = A exp(-|x - c|²/w²)."""
    center = np.broadcast_to(np.asarray(center, dtype=float), (grid.N,))
    d = [c - c0 for c, c0 in zip(grid.coords, center)]
    theta = amplitude * np.exp(-sum(q**2 for q in d) / width**2)
    grad = tuple(-2.0 * q / width**2 * theta for q in d)
    return Phase(theta, grad)


def _check_finite(u: Field):
    if not np.all(np.isfinite(u.values)):
        raise NonFiniteFieldError("field contains non-finite samples")


def spectral_gradient(u: Field | np.ndarray, grid: CartesianGrid | None = None) -> list[np.ndarray]:
    if isinstance(u, Field):
        grid, values = u.grid, u.values
    else:
        values = np.asarray(u)
    uk = fftn(values)
    return [ifftn(1j * k * uk) for k in grid.derivative_wavenumbers]


def mass(u: Field) -> float:
    _check_finite(u)
    return u.grid.integrate(np.abs(u.values) ** 2)


def kinetic_integral(u: Field) -> float:
    """∫|∇u|² as -<u, Δu> with the spectral Laplacian (Parseval)."""
    g = u.grid
    uk = fftn(u.values)
    return float(np.sum(g.k2 * np.abs(uk) ** 2) * g.cell_volume / u.values.size)


def potential_integral(u: Field, params: Params, weights: np.ndarray | None = None) -> float:
    """∫ |x|^{-b} |u|^{p+1}."""
    if weights is None:
        weights = weighted_potential_nodes(u.grid, params.b)
    return u.grid.integrate(weights * np.abs(u.values) ** (params.p + 1.0))


def energy(u: Field, params: Params, weights: np.ndarray | None = None) -> EnergyBreakdown:
    _check_finite(u)
    kin = 0.5 * kinetic_integral(u)
    pot = potential_integral(u, params, weights) / (params.p + 1.0)
    out = EnergyBreakdown.from_parts(kin, pot)
    if not np.isfinite(out.total):
        raise NonFiniteFieldError("energy is not finite")
    return out


def weinstein_J(u: Field, params: Params, weights: np.ndarray | None = None) -> float:
    """‖∇u‖² ‖u‖^{p-1} / ∫|x|^{-b}|u|^{p+1}."""
    denom = potential_integral(u, params, weights)
    if not denom > 0:
        raise ZeroDivisionError("∫|x|^{-b}|u|^{p+1} vanishes")
    return kinetic_integral(u) * mass(u) ** ((params.p - 1.0) / 2.0) / denom


def gn_gap(u: Field, psi_mass: float, params: Params, weights: np.ndarray | None = None) -> float:
    """E(u) - ½‖∇u‖²(1 - (‖u‖/‖ψ‖)^{(4-2b)/N}); nonnegative for every u.

    ``psi_mass`` is ‖ψ‖₂² (the squared critical mass).
    """
    e = energy(u, params, weights)
    ratio = mass(u) / psi_mass
    return e.total - e.kinetic * (1.0 - ratio ** (params.sigma / 2.0))


def boundary_mass_fraction(u: Field, width: int = 2) -> float:
    dens = np.abs(u.values) ** 2
    total = dens.sum()
    if total == 0:
        return 0.0
    return float(dens[u.grid.boundary_mask(width)].sum() / total)


def _boundary_guard(u: Field, strict: bool, threshold: float = 1e-10):
    edge = np.abs(u.values[u.grid.boundary_mask(1)])
    peak = np.abs(u.values).max()
    if peak > 0 and edge.max(initial=0.0) > threshold * max(peak, 1.0):
        msg = f"field is {edge.max():.2e} at the box boundary; Γ is truncated"
        if strict:
            raise BoundaryMassError(msg)
        warnings.warn(msg, BoundaryMassWarning, stacklevel=3)


def virial_gamma(u: Field, strict: bool = False) -> float:
    """Γ = ∫|x|²|u|²."""
    _check_finite(u)
    _boundary_guard(u, strict)
    return u.grid.integrate(u.grid.r2 * np.abs(u.values) ** 2)


def virial_gamma_prime(u: Field, strict: bool = False) -> float:
    """Γ' = 4 Im ∫ ū (x·∇u)."""
    _check_finite(u)
    _boundary_guard(u, strict)
    grad = spectral_gradient(u)
    xdu = sum(c * g for c, g in zip(u.grid.coords, grad))
    return 4.0 * u.grid.integrate(np.imag(np.conj(u.values) * xdu))


def virial_sample(u: Field, strict: bool = False) -> VirialSample:
    return VirialSample(u.t, virial_gamma(u, strict), virial_gamma_prime(u, strict))


def momentum_density_flux(u: Field, theta: Phase) -> float:
    """∫ ∇θ · Im(ū ∇u)."""
    grad = spectral_gradient(u)
    ub = np.conj(u.values)
    return u.grid.integrate(sum(gt * np.imag(ub * g) for gt, g in zip(theta.grad, grad)))


def _grad_theta_sq_mass(u: Field, theta: Phase) -> float:
    """∫ |∇θ|² |u|²."""
    return u.grid.integrate(sum(gt**2 for gt in theta.grad) * np.abs(u.values) ** 2)


def phase_modulated_energy(u: Field, theta: Phase, s: float, params: Params,
                           weights: np.ndarray | None = None) -> float:
    """E(u e^{isθ}) expanded as a quadratic polynomial in s."""
    e = energy(u, params, weights).total
    return e + s * momentum_density_flux(u, theta) + 0.5 * s**2 * _grad_theta_sq_mass(u, theta)


def modulate(u: Field, theta: Phase, s: float) -> Field:
    return u.with_values(u.values * np.exp(1j * s * theta.values))


def banica_lhs_rhs(u: Field, theta: Phase, params: Params, psi_mass: float,
                   tol: float = 1e-6, weights: np.ndarray | None = None) -> tuple[float, float]:
    """Both sides of |∫∇θ·Im(ū∇u)| <= √(2E(u)) (∫|∇θ|²|u|²)^{1/2}.

    Only meaningful at critical mass, where E(u) >= 0.
    """
    m = mass(u)
    if abs(np.sqrt(m) - np.sqrt(psi_mass)) > tol * np.sqrt(psi_mass):
        raise ValueError(f"field mass {m:.10g} is not the critical mass {psi_mass:.10g}")
    e = energy(u, params, weights)
    if e.total < -tol * max(1.0, e.kinetic):
        raise ValueError(f"E(u) = {e.total:.3e} < 0 at critical mass")
    lhs = abs(momentum_density_flux(u, theta))
    rhs = np.sqrt(2.0 * max(e.total, 0.0)) * np.sqrt(_grad_theta_sq_mass(u, theta))
    return lhs, float(rhs)


def mass_within(u: Field, radius: float) -> float:
    """∫_{|x|<R} |u|²."""
    inside = u.grid.r < radius
    return u.grid.integrate(np.where(inside, np.abs(u.values) ** 2, 0.0))
