"""Parameters, grids and the discrete field type.

The equation solved throughout the package is

    i u_t + Δu + |x|^{-b} |u|^{p-1} u = 0,    p = 1 + (4 - 2b)/N,

posed on a periodic box [-L, L)^N.  Grids are cell-centered by default so that
no node sits on the singularity of |x|^{-b}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np


class ParameterError(ValueError):
    """Inadmissible (N, b, p) combination."""


class NonFiniteFieldError(FloatingPointError):
    """A field contains NaN or Inf samples."""


@dataclass(frozen=True)
class Params:
    """Dimension ``N`` and inhomogeneity exponent ``b``.

    ``p`` is derived as the L²-critical power.  ``power`` is only set through
    :func:`noncritical_params`, for virial checks at a non-critical exponent.
    """

    N: int
    b: float
    power: float | None = None

    @property
    def p(self) -> float:
        if self.power is not None:
            return self.power
        return 1.0 + (4.0 - 2.0 * self.b) / self.N

    @property
    def critical(self) -> bool:
        return self.power is None

    @property
    def sigma(self) -> float:
        """Exponent (4 - 2b)/N appearing in the sharp Gagliardo-Nirenberg bound."""
        return (4.0 - 2.0 * self.b) / self.N


def make_params(N: int, b: float, allow_b_zero: bool = False) -> Params:
    if int(N) != N or N < 1:
        raise ParameterError(f"dimension N must be an integer >= 1, got {N!r}")
    N = int(N)
    b = float(b)
    upper = min(2.0, float(N))
    if b == 0.0 and allow_b_zero:
        return Params(N, 0.0)
    if not (0.0 < b < upper):
        raise ParameterError(f"need 0 < b < min(2, N) = {upper:g}, got b = {b:g}")
    return Params(N, b)


def noncritical_params(N: int, b: float, p: float) -> Params:
    """Params with an explicit energy-subcritical power ``p``."""
    base = make_params(N, b, allow_b_zero=True)
    p_max = math.inf if N <= 2 else 1.0 + (4.0 - 2.0 * b) / (N - 2)
    if not (1.0 < p < p_max):
        raise ParameterError(f"p must lie in (1, {p_max:g}), got {p:g}")
    return Params(base.N, base.b, float(p))


@dataclass(frozen=True)
class CartesianGrid:
    """Periodic box [-L, L)^N sampled with M points per axis (M even)."""

    N: int
    L: float
    M: int
    cell_centered: bool = True

    def __post_init__(self):
        if self.N not in (1, 2, 3):
            raise ValueError("Cartesian grids support N = 1, 2, 3 only")
        if self.M < 2 or self.M % 2:
            raise ValueError(f"M must be an even integer >= 2, got {self.M}")
        if not self.L > 0:
            raise ValueError("L must be positive")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.M

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.M,) * self.N

    @property
    def cell_volume(self) -> float:
        return self.h**self.N

    @cached_property
    def axis(self) -> np.ndarray:
        offset = 0.5 if self.cell_centered else 0.0
        return -self.L + self.h * (np.arange(self.M) + offset)

    @cached_property
    def coords(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.axis] * self.N), indexing="ij", sparse=True))

    @cached_property
    def r2(self) -> np.ndarray:
        return sum(c**2 for c in self.coords) + np.zeros(self.shape)

    @cached_property
    def r(self) -> np.ndarray:
        return np.sqrt(self.r2)

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        k = 2.0 * np.pi * np.fft.fftfreq(self.M, d=self.h)
        return tuple(np.meshgrid(*([k] * self.N), indexing="ij", sparse=True))

    @cached_property
    def k2(self) -> np.ndarray:
        """Symbol of -Δ (Nyquist mode kept: even derivatives are unambiguous)."""
        return sum(k**2 for k in self.wavenumbers) + np.zeros(self.shape)

    @cached_property
    def derivative_wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Wavenumbers for first derivatives, Nyquist coefficient zeroed."""
        k = 2.0 * np.pi * np.fft.fftfreq(self.M, d=self.h)
        k[self.M // 2] = 0.0
        return tuple(np.meshgrid(*([k] * self.N), indexing="ij", sparse=True))

    @property
    def k_nyquist(self) -> float:
        return np.pi / self.h

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(values) * self.cell_volume)

    def boundary_mask(self, width: int = 2) -> np.ndarray:
        """Nodes within ``width`` cells of any face of the box."""
        idx = np.arange(self.M)
        edge = (idx < width) | (idx >= self.M - width)
        mask = np.zeros(self.shape, dtype=bool)
        for ax in range(self.N):
            sl = [None] * self.N
            sl[ax] = slice(None)
            mask |= edge[tuple(sl)]
        return mask


@dataclass(frozen=True)
class RadialGrid:
    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("radial grid needs at least two nodes")
        if nodes[0] <= 0:
            raise ValueError("radial grid must start at r_min > 0")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("radial nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)

    @property
    def r_min(self) -> float:
        return float(self.nodes[0])

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])


@dataclass
class Field:
    """Complex samples of u(t, ·) on a Cartesian grid."""

    values: np.ndarray
    grid: CartesianGrid
    t: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.shape != self.grid.shape:
            values = values.reshape(self.grid.shape)
        if not np.all(np.isfinite(values)):
            raise NonFiniteFieldError("field contains non-finite samples")
        self.values = values

    def copy(self) -> Field:
        return Field(self.values.copy(), self.grid, self.t)

    def with_values(self, values: np.ndarray, t: float | None = None) -> Field:
        return Field(values, self.grid, self.t if t is None else t)

    def __mul__(self, other):
        if isinstance(other, Field):
            other = other.values
        return self.with_values(self.values * other)

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, Field):
            other = other.values
        return self.with_values(self.values + other)

    def __sub__(self, other):
        if isinstance(other, Field):
            other = other.values
        return self.with_values(self.values - other)


# ---------------------------------------------------------------------------
# Singular weight |x|^{-b}
# ---------------------------------------------------------------------------

# Cells whose index-space distance to the origin is below this get an
# accurately integrated average in N >= 2; the rest use the midpoint value with
# the h²/24 Laplacian correction.
_NEAR_CELLS = 8


def weighted_potential_nodes(
    grid: CartesianGrid, b: float, corrected: bool = True
) -> np.ndarray:
    """Per-node quadrature weights for ∫ |x|^{-b} f dx ≈ h^N Σ w_j f(x_j).

    With ``corrected`` the weight of each node is the average of |x|^{-b} over
    its cell: exact in 1D; in 2D and 3D cells within a few spacings of the origin
    are integrated numerically and the far field uses the midpoint value plus
    the second-order correction (h²/24) Δ|x|^{-b}.
    """
    if b == 0.0:
        return np.ones(grid.shape)
    if not grid.cell_centered and not corrected:
        raise ValueError("node-centered grid has a node at x = 0; use corrected=True")
    if not corrected:
        return grid.r ** (-b)
    return _cell_average_weights(grid.N, grid.L, grid.M, grid.cell_centered, float(b))


@lru_cache(maxsize=16)
def _cell_average_weights(N, L, M, cell_centered, b):
    grid = CartesianGrid(N, L, M, cell_centered)
    h = grid.h
    if N == 1:
        x = grid.axis
        lo, hi = x - h / 2, x + h / 2
        F = lambda s: np.sign(s) * np.abs(s) ** (1.0 - b) / (1.0 - b)  # noqa: E731
        w = (F(hi) - F(lo)) / h
        w.setflags(write=False)
        return w
    r = grid.r
    with np.errstate(divide="ignore"):
        w = r ** (-b) + (h**2 / 24.0) * b * (b + 2.0 - N) * r ** (-b - 2.0)
    off = 0.5 if cell_centered else 0.0
    idx = np.arange(M) - M // 2 + off  # cell center in units of h
    near = np.abs(idx) < _NEAR_CELLS
    sel = np.nonzero(near)[0]
    table = {}
    for multi in np.ndindex(*(sel.size,) * N):
        centers = tuple(idx[sel[m]] for m in multi)
        if math.sqrt(sum(c * c for c in centers)) >= _NEAR_CELLS:
            continue
        key = tuple(sorted(abs(c) for c in centers))
        if key not in table:
            table[key] = _unit_cell_average(key, b)
        w[tuple(sel[m] for m in multi)] = table[key] * h ** (-b)
    w.setflags(write=False)
    return w


def _unit_cell_average(center, b):
    """Average of |s|^{-b} over the unit cube centered at ``center``."""
    N = len(center)
    lo = np.array(center) - 0.5
    if np.all(np.abs(lo) < 1e-12) or np.all(np.abs(lo + 0.5) < 1e-12):
        # cube with a corner at the origin, or centered on it
        a = 1.0 if np.all(np.abs(lo) < 1e-12) else 0.5
        return a ** (-b) * _corner_cube_integral(N, b)
    n = 24 if np.min(np.abs(center)) < 3 else 10
    g, gw = np.polynomial.legendre.leggauss(n)
    g = 0.5 * (g + 1.0)
    gw = 0.5 * gw
    pts = np.meshgrid(*[lo[i] + g for i in range(N)], indexing="ij")
    wts = np.prod(np.meshgrid(*([gw] * N), indexing="ij"), axis=0)
    rr = np.sqrt(sum(q**2 for q in pts))
    return float(np.sum(wts * rr ** (-b)))


def _corner_cube_integral(N, b):
    """∫_{[0,1]^N} |s|^{-b} ds via Euler's identity for homogeneous functions.

    div(s |s|^{-b}) = (N - b)|s|^{-b}, and s·n vanishes on the coordinate
    faces, so the integral reduces to the N outer faces where |s| >= 1.
    """
    g, gw = np.polynomial.legendre.leggauss(40)
    g = 0.5 * (g + 1.0)
    gw = 0.5 * gw
    pts = np.meshgrid(*([g] * (N - 1)), indexing="ij")
    wts = np.prod(np.meshgrid(*([gw] * (N - 1)), indexing="ij"), axis=0)
    rr = np.sqrt(1.0 + sum(q**2 for q in pts))
    face = float(np.sum(wts * rr ** (-b)))
    return N * face / (N - b)
