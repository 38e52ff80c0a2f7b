"""The positive radial ground state ψ of Δψ - ψ + |x|^{-b} ψ^p = 0.

Two independent solvers are provided: radial shooting on φ(0) (the production
path) and a preconditioned imaginary-time iteration on a Cartesian grid, used
as an oracle for the first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.interpolate import CubicSpline
from scipy.special import kv

from . import functionals as F
from .fft import fftn, ifftn
from .model import CartesianGrid, Field, Params, RadialGrid, weighted_potential_nodes


class ShootingError(RuntimeError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history if history is not None else []


def unit_sphere_area(N: int) -> float:
    """|S^{N-1}|; equals 2 for N = 1 (the two half-lines)."""
    return 2.0 * math.pi ** (N / 2) / math.gamma(N / 2)


def _tail_shape(N: int, r):
    """Decaying solution r^{-ν} K_ν(r), ν = N/2 - 1, of the linearized equation."""
    nu = N / 2.0 - 1.0
    return r ** (-nu) * kv(nu, r)


def _tail_slope(N: int, r):
    nu = N / 2.0 - 1.0
    return -(r ** (-nu)) * kv(nu + 1.0, r)


@dataclass(frozen=True, eq=False)
class GroundState:
    """Radial profile ψ(r) with its integral invariants.

    ``mass_sq`` = ‖ψ‖₂², ``grad_sq`` = ‖∇ψ‖₂², ``potential_term`` =
    ∫|x|^{-b}ψ^{p+1}.  Beyond the last radial node the profile continues with
    the fitted decaying tail when ``tail_constant`` is known.
    """

    params: Params
    radial: RadialGrid
    profile: np.ndarray
    psi0: float
    mass_sq: float
    grad_sq: float
    potential_term: float
    J_min: float
    residual: float
    method: str
    tail_constant: float | None = None
    cartesian: Field | None = None
    iterations: int = 0
    _spline: CubicSpline = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_spline", CubicSpline(self.radial.nodes, self.profile))

    @property
    def energy(self) -> float:
        return 0.5 * self.grad_sq - self.potential_term / (self.params.p + 1.0)

    @property
    def grad_norm(self) -> float:
        return math.sqrt(self.grad_sq)

    def __call__(self, r, extrapolate: bool = True) -> np.ndarray:
        r = np.abs(np.asarray(r, dtype=float))
        out = np.empty_like(r)
        inner = r < self.radial.r_min
        outer = r > self.radial.r_max
        mid = ~(inner | outer)
        out[mid] = self._spline(r[mid])
        if np.any(inner):
            out[inner] = series_start(self.params, self.psi0, r[inner])[0]
        if np.any(outer):
            if not extrapolate:
                raise ValueError(f"r = {r[outer].max():g} beyond computed profile r_max = {self.radial.r_max:g}")
            if self.tail_constant is None:
                out[outer] = 0.0
            else:
                out[outer] = self.tail_constant * _tail_shape(self.params.N, r[outer])
        return out

    def summary(self) -> dict:
        p = self.params
        return {
            "N": p.N, "b": p.b, "p": p.p, "psi0": self.psi0, "mass_sq": self.mass_sq,
            "grad_sq": self.grad_sq, "potential_term": self.potential_term,
            "J_min": self.J_min, "residual": self.residual,
        }


def series_start(params: Params, a: float, r):
    """φ and φ' near r = 0 from φ(r) = a - a^p r^{2-b}/((2-b)(N-b)) + a r²/(2N)."""
    N, b, p = params.N, params.b, params.p
    c = a**p / ((2.0 - b) * (N - b))
    phi = a - c * r ** (2.0 - b) + a / (2.0 * N) * r**2
    dphi = -c * (2.0 - b) * r ** (1.0 - b) + a / N * r
    return phi, dphi


# ---------------------------------------------------------------------------
# Shooting
# ---------------------------------------------------------------------------

_R_START = 1e-6


def _rhs(params):
    N, b, pm1 = params.N, params.b, params.p - 1.0

    def f(r, y):
        phi, dphi = y
        return [dphi, -(N - 1) / r * dphi + phi - r ** (-b) * abs(phi) ** pm1 * phi]

    return f


def _crossing(r, y):
    return y[0]


_crossing.terminal = True
_crossing.direction = -1


def _turning(r, y):
    return y[1]


_turning.terminal = True
_turning.direction = 1


def _integrate(params, a, r_end, dense=False):
    """Returns (+1 overshoot | -1 undershoot | 0 neither, solution)."""
    y0 = series_start(params, a, _R_START)
    sol = solve_ivp(_rhs(params), (_R_START, r_end), y0, method="DOP853", rtol=1e-13,
                    atol=1e-16 * max(a, 1.0), events=[_crossing, _turning], dense_output=dense)
    if sol.t_events[0].size:
        return 1, sol
    if sol.t_events[1].size:
        return -1, sol
    return 0, sol


def shoot(params: Params, tol: float = 1e-14, a_seed: float = 1.0, r_max: float = 60.0,
          max_iter: int = 200) -> GroundState:
    """Ground state by bisection on a = φ(0).

    Overshoot: φ crosses zero.  Undershoot: φ' turns positive while φ > 0.
    The converged profile is continued past the divergence radius of the two
    bracketing shots by the decaying tail C r^{-ν}K_ν(r), ν = N/2 - 1.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    return _shoot_cached(params, float(tol), float(a_seed), float(r_max), int(max_iter))


@lru_cache(maxsize=32)
def _shoot_cached(params, tol, a_seed, r_max, max_iter):
    r_end = 40.0
    lo = hi = None
    for k in range(0, 40):
        for a in (a_seed * 2.0**k, a_seed * 2.0 ** (-k)):
            s, _ = _integrate(params, a, r_end)
            if s > 0:
                hi = a if hi is None else min(hi, a)
            elif s < 0:
                lo = a if lo is None else max(lo, a)
        if lo is not None and hi is not None and lo < hi:
            break
    else:
        raise ShootingError(f"no bisection bracket found around a_seed = {a_seed:g}")

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol * mid or mid in (lo, hi):
            break
        s, _ = _integrate(params, mid, r_end)
        if s > 0:
            hi = mid
        else:
            lo = mid
    else:
        raise ShootingError(f"bisection did not reach tol = {tol:g} in {max_iter} iterations")

    _, sol_lo = _integrate(params, lo, r_end, dense=True)
    _, sol_hi = _integrate(params, hi, r_end, dense=True)
    r_common = min(sol_lo.t[-1], sol_hi.t[-1])
    rr = np.linspace(_R_START, r_common, 8001)
    phi_lo = sol_lo.sol(rr)[0]
    gap = np.abs(phi_lo - sol_hi.sol(rr)[0]) / np.abs(phi_lo)
    split = rr[np.argmax(gap > 1e-8)] if np.any(gap > 1e-8) else r_common
    r_match = max(split - 1.0, 1.0)
    a = 0.5 * (lo + hi)
    return _assemble(params, a, sol_lo, r_match, r_max, residual=(hi - lo) / a)


def _assemble(params, a, sol, r_match, r_max, residual):
    N, b, p = params.N, params.b, params.p
    C = float(sol.sol(r_match)[0] / _tail_shape(N, r_match))

    def phi(r):
        return sol.sol(r)[0] if r <= r_match else C * _tail_shape(N, r)

    def dphi(r):
        return sol.sol(r)[1] if r <= r_match else C * _tail_slope(N, r)

    w = unit_sphere_area(N)
    brk = [x for x in (1e-3, 1e-2, 0.1, 1.0) if x < r_match]

    def integral(f):
        inner, _ = quad(f, _R_START, r_match, limit=1000, epsabs=0.0, epsrel=1e-13, points=brk)
        outer, _ = quad(f, r_match, np.inf, limit=500, epsabs=0.0, epsrel=1e-13)
        return w * (inner + outer)

    r0 = _R_START
    mass_sq = integral(lambda r: r ** (N - 1) * phi(r) ** 2) + w * a * a * r0**N / N
    grad_sq = integral(lambda r: r ** (N - 1) * dphi(r) ** 2)
    pot = integral(lambda r: r ** (N - 1 - b) * abs(phi(r)) ** (p + 1)) \
        + w * a ** (p + 1) * r0 ** (N - b) / (N - b)

    nodes = np.concatenate([
        np.geomspace(r0, 0.05, 400, endpoint=False),
        np.arange(0.05, r_max + 1e-9, 0.005),
    ])
    inside = nodes <= r_match
    values = np.empty_like(nodes)
    values[inside] = sol.sol(nodes[inside])[0]
    values[~inside] = C * _tail_shape(N, nodes[~inside])
    J = grad_sq * mass_sq ** ((p - 1.0) / 2.0) / pot
    return GroundState(params, RadialGrid(nodes), values, a, mass_sq, grad_sq, pot, J,
                       residual, "shoot", tail_constant=C)


# ---------------------------------------------------------------------------
# Grid oracle
# ---------------------------------------------------------------------------

def equation_residual(u: Field, params: Params, weights=None) -> float:
    """‖Δu - u + w|u|^{p-1}u‖₂ / ‖u‖₂ on the grid."""
    if weights is None:
        weights = weighted_potential_nodes(u.grid, params.b)
    lap = ifftn(-u.grid.k2 * fftn(u.values))
    res = lap - u.values + weights * np.abs(u.values) ** (params.p - 1.0) * u.values
    return math.sqrt(u.grid.integrate(np.abs(res) ** 2) / u.grid.integrate(np.abs(u.values) ** 2))


def gradient_flow(params: Params, grid: CartesianGrid | RadialGrid, tol: float = 1e-10,
                  dtau: float = math.inf, seed: Field | None = None,
                  max_iter: int = 5000) -> GroundState:
    """Discrete ground state by preconditioned imaginary-time steps.

    Each step solves (1 + dτ(1 - Δ)) u⁺ = u + dτ S^γ |x|^{-b}|u|^{p-1}u with
    S = <(1-Δ)u, u> / <|x|^{-b}|u|^{p+1}> and γ = p/(p-1).  The amplitude
    factor S^γ replaces L² renormalization: at the critical power the
    mass-constrained flow has no fixed point away from the (unknown) critical
    mass, whereas here S → 1 at the fixed point, so the limit solves the
    equation with unit coefficient on the linear term and needs no rescaling.
    dτ = inf is the Petviashvili iteration.

    On a :class:`RadialGrid` the same iteration runs on a finite-volume
    discretization of the radial operator; see :func:`radial_mesh`.
    """
    if isinstance(grid, RadialGrid):
        return _radial_flow(params, grid, tol, dtau, max_iter)
    w = weighted_potential_nodes(grid, params.b)
    p = params.p
    gamma = p / (p - 1.0)
    Lsym = 1.0 + grid.k2
    if seed is None:
        u = np.exp(-grid.r2) + 0j
    else:
        u = np.array(seed.values, dtype=complex)
    u = np.abs(u)
    history = []
    for it in range(max_iter + 1):
        uk = fftn(u)
        nl = w * u**p
        lin = float(np.real(np.vdot(uk, Lsym * uk))) / u.size
        nlin = float(np.sum(nl * u))
        res = equation_residual(Field(u, grid), params, w)
        history.append(res)
        if not np.isfinite(res) or nlin <= 0:
            raise ConvergenceError("imaginary-time iteration diverged", history)
        if res < tol:
            break
        S = lin / nlin
        nlk = fftn(nl) * S**gamma
        if math.isinf(dtau):
            u = np.real(ifftn(nlk / Lsym))
        else:
            u = np.real(ifftn((uk + dtau * nlk) / (1.0 + dtau * Lsym)))
        if len(history) > 50 and history[-1] > 0.999 * history[-50]:
            raise ConvergenceError("imaginary-time iteration stalled", history)
    else:
        raise ConvergenceError(f"residual {history[-1]:.3e} above tol after {max_iter} iterations", history)
    return from_field(Field(u, grid), params, residual=history[-1], iterations=it)


def from_field(u: Field, params: Params, residual: float = math.nan, iterations: int = 0) -> GroundState:
    """Wrap a converged grid ground state with its norms and radial profile."""
    grid = u.grid
    vals = np.real(u.values)
    centre = grid.M // 2
    line_idx = (slice(centre, None),) + (centre,) * (grid.N - 1)
    offs = (grid.N - 1) * grid.axis[centre] ** 2
    r_line = np.sqrt(grid.axis[centre:] ** 2 + offs)
    prof = vals[line_idx]
    psi0 = _extrapolate_origin(params, grid, vals)
    e = F.energy(u, params)
    mass_sq = F.mass(u)
    grad_sq = 2.0 * e.kinetic
    pot = e.potential * (params.p + 1.0)
    gs = GroundState(params, RadialGrid(r_line), prof, psi0, mass_sq, grad_sq, pot,
                     grad_sq * mass_sq ** ((params.p - 1.0) / 2.0) / pot, residual,
                     "gradient_flow", tail_constant=None, cartesian=u, iterations=iterations)
    return gs


def _extrapolate_origin(params, grid, vals):
    """ψ(0) from a least-squares fit of the small-r expansion on the innermost shells."""
    r = grid.r.ravel()
    v = vals.ravel()
    order = np.argsort(r)
    rs, idx = np.unique(np.round(r[order], 12), return_index=True)
    rs = rs[:6]
    vs = v[order][idx][:6]
    b = params.b
    cols = [np.ones_like(rs), rs**2, rs**4] if b == 0 else \
        [np.ones_like(rs), rs ** (2 - b), rs**2, rs ** (4 - 2 * b)]
    coef, *_ = np.linalg.lstsq(np.stack(cols, axis=1), vs, rcond=None)
    return float(coef[0])


# ---------------------------------------------------------------------------
# Cartesian sampling and characterization
# ---------------------------------------------------------------------------

def to_cartesian(gs: GroundState, grid: CartesianGrid) -> Field:
    r_far = float(grid.r.max())
    if gs.tail_constant is None and r_far > gs.radial.r_max + 1e-12:
        raise ValueError(f"grid reaches r = {r_far:g} beyond the computed profile (r_max = {gs.radial.r_max:g})")
    if gs.tail_constant is not None and gs.radial.r_max < grid.L * math.sqrt(grid.N):
        raise ValueError("profile r_max must be at least L*sqrt(N)")
    return Field(gs(grid.r), grid)


def scaled_profile(gs: GroundState, grid: CartesianGrid, lambda0: float = 1.0,
                   gamma0: float = 0.0) -> Field:
    """e^{iγ₀} λ₀^{N/2} ψ(λ₀ x)."""
    N = gs.params.N
    vals = np.exp(1j * gamma0) * lambda0 ** (N / 2.0) * gs(lambda0 * grid.r)
    return Field(vals, grid)


def characterization_test(v: Field, gs: GroundState, tol: float = 1e-3,
                          energy_tol: float | None = None) -> tuple[bool, float, float]:
    """Decide whether v = e^{iγ₀} λ₀^{N/2} ψ(λ₀ x) for some (λ₀, γ₀).

    Requires ‖v‖₂ = ‖ψ‖₂.  A candidate with E(v) not zero (relative to
    ‖∇v‖₂²) is rejected; otherwise λ₀ = √((p-1)/2) ‖∇|v|‖₂/‖v‖₂, γ₀ is the phase
    at max |v|, and the relative H¹ distance to the fitted orbit member decides.
    """
    params = gs.params
    if energy_tol is None:
        energy_tol = tol
    m = F.mass(v)
    if abs(m - gs.mass_sq) > tol * gs.mass_sq:
        raise ValueError(f"mass {m:.8g} differs from critical mass {gs.mass_sq:.8g}")
    e = F.energy(v, params)
    modulus = v.with_values(np.abs(v.values))
    lam = math.sqrt((params.p - 1.0) / 2.0 * F.kinetic_integral(modulus) / m)
    peak = np.unravel_index(np.argmax(np.abs(v.values)), v.grid.shape)
    gam = float(np.angle(v.values[peak]))
    if abs(e.total) >= energy_tol * max(2.0 * e.kinetic, 1e-300):
        return False, lam, gam
    cand = scaled_profile(gs, v.grid, lam, gam)
    d = v - cand
    dist = math.sqrt(F.mass(d) + F.kinetic_integral(d))
    size = math.sqrt(m + 2.0 * e.kinetic)
    return bool(dist < tol * size), lam, gam


# ---------------------------------------------------------------------------
# Radial finite-volume oracle
# ---------------------------------------------------------------------------

def radial_mesh(r_max: float = 30.0, n: int = 4000, grading: float = 2.0) -> RadialGrid:
    """Nodes r_i = r_max (i/n)^q, i = 1..n, clustered at the origin.

    The cell of node i spans the midpoints to its neighbours; the first cell
    reaches down to r = 0.
    """
    s = np.arange(1, n + 1) / n
    return RadialGrid(r_max * s**grading)


def _radial_operator(params, nodes):
    from scipy.sparse import diags

    N, b = params.N, params.b
    r = nodes
    faces = np.concatenate([[0.0], 0.5 * (r[1:] + r[:-1]), [r[-1] + 0.5 * (r[-1] - r[-2])]])
    vol = (faces[1:] ** N - faces[:-1] ** N) / N
    wvol = (faces[1:] ** (N - b) - faces[:-1] ** (N - b)) / (N - b)
    flux = faces[1:-1] ** (N - 1) / np.diff(r)
    # outer face: Dirichlet φ = 0 one spacing beyond the last node
    out = faces[-1] ** (N - 1) / (r[-1] - r[-2])
    main = np.concatenate([flux, [0.0]]) + np.concatenate([[0.0], flux])
    main[-1] += out
    stiff = diags([main, -flux, -flux], [0, 1, -1], format="csc")
    return stiff, vol, wvol


def _radial_flow(params, radial, tol, dtau, max_iter):
    from scipy.sparse import diags
    from scipy.sparse.linalg import splu

    r = radial.nodes
    p = params.p
    gamma = p / (p - 1.0)
    stiff, vol, wvol = _radial_operator(params, r)
    Lmat = stiff + diags(vol)
    if math.isinf(dtau):
        solver = splu(Lmat.tocsc())
    else:
        solver = splu((diags(vol) + dtau * Lmat).tocsc())
    u = np.exp(-r**2)
    history = []
    # the pointwise residual has a roundoff floor from the graded mesh, so
    # convergence is judged on the relative size of the update
    for it in range(1, max_iter + 1):
        nl = wvol * u**p
        Lu = Lmat @ u
        S = float(u @ Lu) / float(u @ nl)
        rhs = S**gamma * nl
        if math.isinf(dtau):
            new = solver.solve(rhs)
        else:
            new = solver.solve(vol * u + dtau * rhs)
        change = math.sqrt(np.sum((new - u) ** 2 * vol) / np.sum(new**2 * vol))
        u = new
        history.append(change)
        if not np.isfinite(change):
            raise ConvergenceError("radial iteration diverged", history)
        if change < tol:
            break
        if len(history) > 50 and history[-1] > 0.999 * history[-50]:
            raise ConvergenceError("radial iteration stalled", history)
    else:
        raise ConvergenceError(f"update {history[-1]:.3e} above tol after {max_iter} iterations", history)

    area = unit_sphere_area(params.N)
    mass_sq = area * float(np.sum(u**2 * vol))
    grad_sq = area * float(u @ (stiff @ u))
    pot = area * float(np.sum(wvol * u ** (p + 1.0)))
    psi0 = _radial_origin(params, r, u)
    J = grad_sq * mass_sq ** ((p - 1.0) / 2.0) / pot
    return GroundState(params, radial, u, psi0, mass_sq, grad_sq, pot, J, history[-1],
                       "gradient_flow", iterations=it)


def _radial_origin(params, r, u):
    b = params.b
    rs, vs = r[:6], u[:6]
    cols = [np.ones_like(rs), rs**2, rs**4] if b == 0 else \
        [np.ones_like(rs), rs ** (2 - b), rs**2, rs ** (4 - 2 * b)]
    coef, *_ = np.linalg.lstsq(np.stack(cols, axis=1), vs, rcond=None)
    return float(coef[0])
