"""Strang split-step time integration with blow-up detection."""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import functionals as F
from .fft import fftn, ifftn
from .model import Field, Params, weighted_potential_nodes


class StepSizeWarning(RuntimeWarning):
    """dt exceeds the split-step stability limit of the grid."""


def stable_dt(grid) -> float:
    """h²/π: largest dt with k_max² dt <= π.

    Beyond it the splitting resonates with grid-scale modes and the energy
    drifts or explodes, even though every sub-step is exact.
    """
    return grid.h**2 / math.pi


class Termination(str, Enum):
    REACHED_T_END = "reached_t_end"
    BLOWUP_DETECTED = "blowup_detected"
    BOUNDARY_CONTAMINATED = "boundary_contaminated"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass
class EvolutionConfig:
    dt0: float = 1e-3
    t_end: float = 1.0
    grad_blowup_threshold: float | None = None
    adapt: bool = False
    record_every: int = 10
    strict_boundary: bool = False
    snapshot_times: tuple[float, ...] = ()
    conc_radius: float = 0.5
    boundary_tol: float = 1e-6
    precision: str = "auto"

    def __post_init__(self):
        if self.precision not in PRECISIONS:
            raise ValueError(f"precision must be one of {PRECISIONS}, got {self.precision!r}")
        if not self.dt0 > 0:
            raise ValueError("dt0 must be positive")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        self.snapshot_times = tuple(sorted(float(t) for t in self.snapshot_times))


PRECISIONS = ("auto", "double", "extended")


def _working_dtype(precision: str, N: int):
    """Extended precision keeps FFT round-off drift of the mass near 1e-15 over 1e4 steps.

    "auto" uses it in 1D only, where the cost is small.
    """
    if precision == "extended" or (precision == "auto" and N == 1):
        return np.clongdouble
    return np.complex128


DIAGNOSTIC_COLUMNS = ("t", "mass", "kinetic", "potential", "energy", "grad_norm",
                      "gamma", "gamma_prime", "conc_fraction")


@dataclass
class DiagnosticsSeries:
    t: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    kinetic: list = field(default_factory=list)
    potential: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    grad_norm: list = field(default_factory=list)
    gamma: list = field(default_factory=list)
    gamma_prime: list = field(default_factory=list)
    conc_fraction: list = field(default_factory=list)
    conc_radius: float = 0.5

    def __len__(self):
        return len(self.t)

    def record(self, u: Field, params: Params, weights=None):
        e = F.energy(u, params, weights)
        m = F.mass(u)
        self.t.append(u.t)
        self.mass.append(m)
        self.kinetic.append(e.kinetic)
        self.potential.append(e.potential)
        self.energy.append(e.total)
        self.grad_norm.append(math.sqrt(2.0 * e.kinetic))
        self.gamma.append(u.grid.integrate(u.grid.r2 * np.abs(u.values) ** 2))
        self.gamma_prime.append(_gamma_prime(u))
        self.conc_fraction.append(F.mass_within(u, self.conc_radius) / m if m > 0 else 0.0)

    def column(self, name: str) -> np.ndarray:
        return np.asarray(getattr(self, name), dtype=float)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(DIAGNOSTIC_COLUMNS)
        for row in zip(*(getattr(self, c) for c in DIAGNOSTIC_COLUMNS)):
            w.writerow([format(v, ".17g") for v in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, text: str, conc_radius: float = 0.5) -> DiagnosticsSeries:
        rows = list(csv.reader(io.StringIO(text)))
        if tuple(rows[0]) != DIAGNOSTIC_COLUMNS:
            raise ValueError(f"unexpected diagnostics header {rows[0]}")
        out = cls(conc_radius=conc_radius)
        for row in rows[1:]:
            for name, v in zip(DIAGNOSTIC_COLUMNS, row):
                getattr(out, name).append(float(v))
        return out


def _gamma_prime(u: Field) -> float:
    grad = F.spectral_gradient(u)
    xdu = sum(c * g for c, g in zip(u.grid.coords, grad))
    return 4.0 * u.grid.integrate(np.imag(np.conj(u.values) * xdu))


@dataclass
class Trajectory:
    snapshots: list
    diagnostics: DiagnosticsSeries
    termination: Termination
    final: Field
    steps: int = 0
    initial_grad_norm: float = math.nan

    def snapshot_at(self, t: float) -> Field:
        for s in self.snapshots:
            if abs(s.t - t) <= 1e-12 * max(1.0, abs(t)):
                return s
        raise KeyError(f"no snapshot recorded at t = {t:g}")


def _nonlinear_phase(values, weights, p, dt):
    """Exact flow of i u_t = -|x|^{-b}|u|^{p-1}u over dt (|u| is conserved)."""
    return values * np.exp(1j * dt * weights * np.abs(values) ** (p - 1.0))


def step(u: Field, dt: float, params: Params, weights: np.ndarray | None = None,
         precision: str = "double") -> Field:
    """One Strang step: half nonlinear phase, exact linear flow e^{i dt Δ}, half phase."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    if weights is None:
        weights = weighted_potential_nodes(u.grid, params.b)
    dtype = _working_dtype(precision, u.grid.N)
    real = np.longdouble if dtype is np.clongdouble else np.float64
    w = np.asarray(weights, dtype=real)
    k2 = u.grid.k2.astype(real)
    v = _nonlinear_phase(u.values.astype(dtype), w, params.p, 0.5 * dt)
    v = ifftn(np.exp(-1j * real(dt) * k2) * fftn(v))
    v = _nonlinear_phase(v, w, params.p, 0.5 * dt)
    return Field(v.astype(np.complex128), u.grid, u.t + dt)


def default_blowup_threshold(params: Params) -> float:
    """50 ‖∇ψ‖₂ at the critical power; no threshold otherwise."""
    if not params.critical:
        return math.inf
    from .ground_state import shoot

    return 50.0 * shoot(params).grad_norm


def evolve(u0: Field, cfg: EvolutionConfig, params: Params,
           weights: np.ndarray | None = None) -> Trajectory:
    grid = u0.grid
    if weights is None:
        weights = weighted_potential_nodes(grid, params.b)
    p = params.p
    dtype = _working_dtype(cfg.precision, grid.N)
    real = np.longdouble if dtype is np.clongdouble else np.float64
    k2 = grid.k2.astype(real)
    weights = np.asarray(weights, dtype=real)
    norm = grid.cell_volume / u0.values.size
    g0 = math.sqrt(F.kinetic_integral(u0))
    threshold = cfg.grad_blowup_threshold
    if threshold is None:
        threshold = default_blowup_threshold(params)
    if not threshold > g0:
        raise ValueError(f"blow-up threshold {threshold:g} must exceed the initial ‖∇u₀‖ = {g0:g}")
    adapt_ref = g0 if g0 > 0 else 1.0
    if cfg.dt0 > stable_dt(grid) * (1.0 + 1e-12):
        warnings.warn(f"dt0 = {cfg.dt0:g} exceeds the split-step stability limit h²/π = {stable_dt(grid):.3g}",
                      StepSizeWarning, stacklevel=2)

    diag = DiagnosticsSeries(conc_radius=cfg.conc_radius)
    diag.record(u0, params, weights)
    pending = [t for t in cfg.snapshot_times if t > u0.t]
    snapshots = [u0.copy()] if any(abs(t - u0.t) < 1e-14 for t in cfg.snapshot_times) else []
    t = u0.t
    v = u0.values.astype(dtype)
    g = g0
    n = 0
    status = Termination.REACHED_T_END
    eps = 1e-12 * max(1.0, abs(cfg.t_end))
    while t < cfg.t_end - eps:
        dt = cfg.dt0 / (1.0 + (g / adapt_ref) ** 2) if cfg.adapt else cfg.dt0
        target = min([cfg.t_end] + pending[:1])
        dt = min(dt, target - t)
        if target - t - dt < 1e-3 * dt:
            dt = target - t
        v = _nonlinear_phase(v, weights, p, 0.5 * dt)
        vk = fftn(v)
        g = math.sqrt(float(np.sum(k2 * (vk.real**2 + vk.imag**2)) * norm))
        v = ifftn(np.exp(-1j * real(dt) * k2) * vk)
        v = _nonlinear_phase(v, weights, p, 0.5 * dt)
        t = target if abs(target - (t + dt)) < eps else t + dt
        n += 1
        if not (np.isfinite(g) and np.all(np.isfinite(v))):
            status = Termination.NUMERICAL_FAILURE
            break
        u = Field(v.astype(np.complex128), grid, t)
        hit = bool(pending) and abs(t - pending[0]) < eps
        blown = g > threshold
        if n % cfg.record_every == 0 or hit or blown or t >= cfg.t_end - eps:
            diag.record(u, params, weights)
            if cfg.strict_boundary and F.boundary_mass_fraction(u) > cfg.boundary_tol:
                status = Termination.BOUNDARY_CONTAMINATED
                break
        if hit:
            snapshots.append(u.copy())
            pending.pop(0)
        if blown:
            status = Termination.BLOWUP_DETECTED
            break
    v = v.astype(np.complex128)
    final = Field(v, grid, t) if status != Termination.NUMERICAL_FAILURE else \
        Field(np.nan_to_num(v), grid, t)
    return Trajectory(snapshots, diag, status, final, n, g0)
