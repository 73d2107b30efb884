"""Uniform 1-D grids, discrete fields and difference/quadrature helpers.

Two boundary conventions exist side by side.  Dirichlet grids hold
half-offset nodes x_j = -L + (j + 1/2) h (no node on the boundary, exact
mirror symmetry, fields treated as zero outside), which keeps centered
stencils symmetric so the self-adjoint operators stay self-adjoint in
the discrete inner product.  Periodic grids hold x_j = -L + j h with a
power-of-two node count for the transforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ArgumentError, GridError

# 4th-order centered stencils
_D1_W = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2_W = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [-L, L] with n nodes; n*h = 2L."""

    n: int
    L: float
    boundary: str = "dirichlet"

    def __post_init__(self):
        if self.n < 256:
            raise GridError("need at least 256 nodes")
        if self.boundary not in ("dirichlet", "periodic"):
            raise GridError(f"unknown boundary {self.boundary!r}")
        if self.boundary == "periodic" and self.n & (self.n - 1):
            raise GridError("periodic grids require a power-of-two n")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def x(self) -> np.ndarray:
        if self.boundary == "dirichlet":
            return -self.L + (np.arange(self.n) + 0.5) * self.h
        return -self.L + np.arange(self.n) * self.h

    @property
    def xi(self) -> np.ndarray:
        """Discrete frequencies (periodic grids only)."""
        if self.boundary != "periodic":
            raise GridError("frequencies only defined on periodic grids")
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.h)

    def refine(self, factor: int = 2) -> "Grid":
        return Grid(self.n * factor, self.L, self.boundary)

    def with_length(self, L: float) -> "Grid":
        """Same spacing, new half-length (node count rounded to keep h)."""
        n = int(round(2.0 * L / self.h))
        if self.boundary == "periodic":
            n = 1 << max(8, int(np.ceil(np.log2(n))))
        return Grid(n, n * self.h / 2.0, self.boundary)

    def diff_matrix(self, order: int) -> sp.csr_matrix:
        """Sparse 4th-order accurate d^order/dx^order, zero extension."""
        n, h = self.n, self.h
        if order == 1:
            offs, w = [-2, -1, 0, 1, 2], _D1_W / h
        elif order == 2:
            offs, w = [-2, -1, 0, 1, 2], _D2_W / h**2
        else:
            raise ArgumentError("only first and second derivative stencils")
        if self.boundary == "periodic":
            m = sp.lil_matrix((n, n))
            for o, c in zip(offs, w):
                m.setdiag(c, o)
                if o > 0:
                    m.setdiag(c, o - n)
                elif o < 0:
                    m.setdiag(c, o + n)
            return m.tocsr()
        return sp.diags(w, offs, shape=(n, n), format="csr")


@dataclass
class Field:
    """Complex nodal values bound to a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n,):
            raise GridError("field length does not match grid")

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    @property
    def imag(self) -> np.ndarray:
        return self.values.imag


def same_grid(*objs) -> Grid:
    grids = [o.grid if hasattr(o, "grid") else o for o in objs]
    g0 = grids[0]
    for g in grids[1:]:
        if g.n != g0.n or g.L != g0.L or g.boundary != g0.boundary:
            raise ArgumentError("operands live on different grids")
    return g0


def quad_weights(grid: Grid) -> np.ndarray:
    """Trapezoidal weights; exact-h weights for both boundary types
    (fields vanish at the boundary / wrap around)."""
    return np.full(grid.n, grid.h)


def integrate(grid: Grid, values: np.ndarray) -> float | complex:
    out = grid.h * np.sum(values)
    return out.item() if np.ndim(out) == 0 else out


def inner(grid: Grid, u: np.ndarray, v: np.ndarray) -> float:
    """Real L2 pairing Re sum(u * conj(v)) * h."""
    return float(np.real(np.sum(u * np.conj(v))) * grid.h)


def norm(grid: Grid, u: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(u) ** 2) * grid.h))


def cumulative_from_zero(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Odd antiderivative: F(x) = integral from 0 to x, F(-x) = -F(x)
    when the integrand is even.  Composite Simpson accuracy."""
    from scipy.integrate import cumulative_simpson

    x = grid.x
    F = cumulative_simpson(values, x=x, initial=0.0)
    # anchor at x = 0 by interpolating the cumulative there
    F0 = np.interp(0.0, x, F)
    return F - F0


def cumulative_left(grid: Grid, values: np.ndarray) -> np.ndarray:
    """integral from the left edge to x (Simpson)."""
    from scipy.integrate import cumulative_simpson

    return cumulative_simpson(values, x=grid.x, initial=0.0)


def cumulative_right(grid: Grid, values: np.ndarray) -> np.ndarray:
    """integral from x to the right edge (Simpson)."""
    F = cumulative_left(grid, values)
    return F[-1] - F


def fourier_shift(grid: Grid, values: np.ndarray, shift: float) -> np.ndarray:
    """Exact translation u(x) -> u(x + shift) on a periodic grid."""
    if grid.boundary != "periodic":
        raise GridError("fourier shift needs a periodic grid")
    return np.fft.ifft(np.fft.fft(values) * np.exp(1j * grid.xi * shift))
