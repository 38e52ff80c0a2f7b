"""Phase and scaling symmetries, the pseudo-conformal map and the S-family.

S_{T,λ₀,γ₀}(t, x) = e^{iγ₀} e^{iλ₀²/(T-t)} e^{-i|x|²/4(T-t)} (λ₀/(T-t))^{N/2} ψ(λ₀x/(T-t))
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import ndimage, signal

from .fft import fftn
from .ground_state import GroundState
from .model import CartesianGrid, Field


class SupportError(ValueError):
    """The transformed field does not fit in the periodic box."""


class ResolutionError(ValueError):
    """The field carries significant energy near the Nyquist limit."""


@dataclass(frozen=True)
class SFamilyParams:
    T: float
    lambda0: float = 1.0
    gamma0: float = 0.0

    def __post_init__(self):
        if not self.lambda0 > 0:
            raise ValueError("lambda0 must be positive")

    def scale_at(self, t: float) -> float:
        """λ(t) = λ₀/(T - t)."""
        return self.lambda0 / (self.T - t)


# ---------------------------------------------------------------------------
# Resampling
# ---------------------------------------------------------------------------

def default_oversample(N: int) -> int:
    return 4 if N <= 2 else 2


def resample(values: np.ndarray, grid: CartesianGrid, points, oversample: int | None = None) -> np.ndarray:
    """Evaluate a periodic band-limited field at arbitrary points.

    Fourier zero-padding to ``oversample`` × the resolution, then cubic
    spline interpolation on the refined grid.  Points outside the box return 0.
    """
    if oversample is None:
        oversample = default_oversample(grid.N)
    fine = np.asarray(values, dtype=complex)
    for ax in range(grid.N):
        fine = signal.resample(fine, grid.M * oversample, axis=ax)
    hf = grid.h / oversample
    idx = [(np.asarray(q, dtype=float) - grid.axis[0]) / hf for q in points]
    idx = np.broadcast_arrays(*idx)
    inside = np.ones(idx[0].shape, dtype=bool)
    for q in points:
        inside &= np.abs(np.broadcast_to(q, idx[0].shape)) <= grid.L
    coords = np.stack([i[inside] for i in idx])
    out = np.zeros(idx[0].shape, dtype=complex)
    kw = dict(order=3, mode="grid-wrap", prefilter=True)
    out[inside] = ndimage.map_coordinates(fine.real, coords, **kw) \
        + 1j * ndimage.map_coordinates(fine.imag, coords, **kw)
    return out


def spectral_tail(u: Field, fraction: float = 2.0 / 3.0) -> float:
    """Share of ∑|û|² carried by modes with some |k_i| above ``fraction`` × Nyquist."""
    uk2 = np.abs(fftn(u.values)) ** 2
    total = uk2.sum()
    if total == 0:
        return 0.0
    cut = fraction * u.grid.k_nyquist
    high = np.zeros(u.grid.shape, dtype=bool)
    for k in u.grid.wavenumbers:
        high |= np.abs(k) > cut
    return float(uk2[high].sum() / total)


# ---------------------------------------------------------------------------
# Symmetries on snapshots
# ---------------------------------------------------------------------------

def scale(u: Field, lambda0: float, support_tol: float = 1e-9, oversample: int | None = None) -> Field:
    """λ₀^{N/2} u(λ₀ x), the L²-critical rescaling."""
    if not lambda0 > 0:
        raise ValueError("lambda0 must be positive")
    g = u.grid
    if lambda0 == 1.0:
        return u.copy()
    if lambda0 < 1.0:
        # only u on [-λ₀L, λ₀L]^N is seen by the rescaled field
        lost = np.zeros(g.shape, dtype=bool)
        for c in g.coords:
            lost |= np.abs(c) > lambda0 * g.L
        dens = np.abs(u.values) ** 2
        if dens.sum() > 0 and dens[lost].sum() > support_tol * dens.sum():
            raise SupportError(f"rescaling by {lambda0:g} pushes {dens[lost].sum() / dens.sum():.2e} of the mass out of the box")
    pts = [lambda0 * c for c in g.coords]
    vals = lambda0 ** (g.N / 2.0) * resample(u.values, g, pts, oversample)
    return u.with_values(vals)


def phase(u: Field, gamma0: float) -> Field:
    return u.with_values(np.exp(1j * gamma0) * u.values)


def chirp(grid: CartesianGrid, tau: float) -> np.ndarray:
    """e^{-i|x|²/4τ}."""
    return np.exp(-1j * grid.r2 / (4.0 * tau))


def standing_wave(gs: GroundState, grid: CartesianGrid, s: float = 0.0,
                  lambda0: float = 1.0, gamma0: float = 0.0) -> Field:
    """e^{iγ₀} e^{iλ₀² s} λ₀^{N/2} ψ(λ₀ x) at time s."""
    N = gs.params.N
    vals = np.exp(1j * (gamma0 + lambda0**2 * s)) * lambda0 ** (N / 2.0) * gs(lambda0 * grid.r)
    return Field(vals, grid, s)


def pseudo_conformal(v: Field, s: float, T: float, oversample: int | None = None) -> Field:
    """u_T(t, x) = e^{-i|x|²/4(T-t)} (T-t)^{-N/2} v(x/(T-t)) with t = T - 1/s.

    ``v`` is the snapshot of a global solution at time s = 1/(T - t) > 0.
    """
    if not s > 0:
        raise ValueError("internal time s = 1/(T - t) must be positive")
    tau = 1.0 / s
    scaled = scale(v, s, oversample=oversample)
    return Field(chirp(v.grid, tau) * scaled.values, v.grid, T - tau)


def inverse_pseudo_conformal(w: Field, T: float, oversample: int | None = None) -> Field:
    """Recover the snapshot v(s) from u_T(t), s = 1/(T - t)."""
    tau = T - w.t
    if not tau > 0:
        raise ValueError("need t < T")
    unchirped = w.with_values(w.values / chirp(w.grid, tau))
    v = scale(unchirped, tau, oversample=oversample)
    return Field(v.values, w.grid, 1.0 / tau)


# ---------------------------------------------------------------------------
# S-family
# ---------------------------------------------------------------------------

def s_family(sp: SFamilyParams, gs: GroundState, t: float, grid: CartesianGrid,
             amplitude_tol: float = 1e-7, resolution_tol: float | None = 1e-5) -> Field:
    """Sample S_{T,λ₀,γ₀}(t, ·) on the grid.

    Raises :class:`SupportError` when ψ(λ(t)x) has not decayed to
    ``amplitude_tol`` of its peak at the box face, and :class:`ResolutionError`
    when more than ``resolution_tol`` of the spectral energy sits in the top
    third of the resolved band (the chirp or the profile is under-resolved).
    """
    if not t < sp.T:
        raise ValueError(f"t = {t:g} must precede the blow-up time T = {sp.T:g}")
    N = gs.params.N
    tau = sp.T - t
    lam = sp.lambda0 / tau
    edge = float(gs(np.array([lam * grid.L]))[0])
    if edge > amplitude_tol * gs.psi0:
        raise SupportError(f"ψ(λ(t)L)/ψ(0) = {edge / gs.psi0:.2e} at t = {t:g}: profile wider than the box")
    vals = (np.exp(1j * (sp.gamma0 + sp.lambda0**2 / tau)) * chirp(grid, tau)
            * lam ** (N / 2.0) * gs(lam * grid.r))
    out = Field(vals, grid, t)
    if resolution_tol is not None:
        tail = spectral_tail(out)
        if tail > resolution_tol:
            raise ResolutionError(f"spectral tail {tail:.2e} at t = {t:g}: chirp/profile exceeds grid resolution")
    return out


def max_resolvable_scale(gs: GroundState, grid: CartesianGrid, sp: SFamilyParams,
                         resolution_tol: float = 1e-5) -> float:
    """Smallest T - t at which s_family still passes its resolution check (bisection in log τ)."""
    def ok(tau):
        try:
            s_family(sp, gs, sp.T - tau, grid, resolution_tol=resolution_tol)
        except (ResolutionError, SupportError):
            return False
        return True

    hi = sp.T if ok(sp.T) else None
    if hi is None:
        raise ResolutionError("S-family is not resolvable even at t = 0")
    lo = hi
    while ok(lo) and lo > 1e-12:
        hi = lo
        lo *= 0.5
    for _ in range(40):
        mid = math.sqrt(lo * hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# Symmetries acting on solutions given as callables u(t, coords)
# ---------------------------------------------------------------------------

Solution = Callable[[float, tuple], np.ndarray]


def closed_form_S(gs: GroundState) -> Solution:
    """S(t, x) = e^{i|x|²/4t} e^{-i/t} |t|^{-N/2} ψ(-x/t), t < 0."""
    N = gs.params.N

    def S(t, coords):
        r2 = sum(c**2 for c in coords)
        return np.exp(1j * r2 / (4.0 * t)) * np.exp(-1j / t) * abs(t) ** (-N / 2.0) \
            * gs(np.sqrt(r2) / abs(t))

    return S


def rescale_solution(u: Solution, lam: float, N: int) -> Solution:
    """u ↦ λ^{N/2} u(λ² t, λ x)."""
    return lambda t, coords: lam ** (N / 2.0) * u(lam**2 * t, tuple(lam * c for c in coords))


def translate_time(u: Solution, t0: float) -> Solution:
    """u ↦ u(t - t0, x)."""
    return lambda t, coords: u(t - t0, coords)


def rotate_phase(u: Solution, gamma0: float) -> Solution:
    return lambda t, coords: np.exp(1j * gamma0) * u(t, coords)


def s_family_by_symmetry(sp: SFamilyParams, gs: GroundState) -> Solution:
    """S_{T,λ₀,γ₀} obtained from S_{0,1,0} by scaling with 1/λ₀, shifting by T, rotating by γ₀."""
    u = rescale_solution(closed_form_S(gs), 1.0 / sp.lambda0, gs.params.N)
    return rotate_phase(translate_time(u, sp.T), sp.gamma0)
