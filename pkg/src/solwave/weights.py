"""Virial weight families and the derived potential/Green data.

The base bump is a degree-7 smoothstep between the plateau value 2 on
[0, 1] and 0 beyond 2.  Inside the localized-exponential weight the bump
enters through its normalized transition (value 1 at the origin), which
keeps that weight at 1 near the soliton, monotone below 1 outside, and
its log-curvature supported in the transition annulus only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, SolwaveError
from .grids import Grid, cumulative_from_zero, integrate
from .nonlin import smallness
from .operators import a_minus, a_minus_prime, a_plus, a_plus_prime
from .soliton import SolitonProfile

BUMP_PLATEAU = 2.0


def bump(r) -> np.ndarray:
    """Smooth even bump: plateau 2 on [0,1], 0 on [2, inf), C^3 between."""
    r = np.abs(np.asarray(r, dtype=float))
    t = np.clip(r - 1.0, 0.0, 1.0)
    s = 35.0 * t**4 - 84.0 * t**5 + 70.0 * t**6 - 20.0 * t**7
    return BUMP_PLATEAU * (1.0 - s)


def bump_prime(r) -> np.ndarray:
    """Derivative of the bump; supported on 1 < |r| < 2."""
    r = np.asarray(r, dtype=float)
    t = np.clip(np.abs(r) - 1.0, 0.0, 1.0)
    ds = 140.0 * t**3 * (1.0 - t) ** 3
    return -BUMP_PLATEAU * ds * np.sign(r)


def bump_normalized(r) -> np.ndarray:
    return bump(r) / BUMP_PLATEAU


@dataclass
class WeightSet:
    """Tabulated weight arrays for one (omega0, A, B) choice."""

    omega0: float
    A: float
    B: float
    grid: Grid
    chi_A: np.ndarray = field(init=False)
    eta_A: np.ndarray = field(init=False)
    zeta_A: np.ndarray = field(init=False)
    Phi_A: np.ndarray = field(init=False)
    zeta_B: np.ndarray = field(init=False)
    Phi_B: np.ndarray = field(init=False)
    Psi_AB: np.ndarray = field(init=False)
    rho: np.ndarray = field(init=False)

    def __post_init__(self):
        w0, A, B = self.omega0, self.A, self.B
        if not (A > B > w0 ** (-0.5) > 1.0):
            raise ArgumentError(
                f"need A > B > omega0^(-1/2) > 1, got A={A}, B={B}, "
                f"omega0^(-1/2)={w0 ** (-0.5):.3g}"
            )
        if self.grid.L < 2.0 * A:
            raise ArgumentError(
                f"grid half-length {self.grid.L} does not cover [-2A, 2A]"
            )
        x = self.grid.x
        self.chi_A = bump(x / A)
        self.chi_A_prime = bump_prime(x / A) / A
        self.eta_A = 1.0 / np.cosh(2.0 * x / A)
        self.zeta_A = self._zeta(A)
        self.Phi_A = cumulative_from_zero(self.grid, self.zeta_A**2)
        self.zeta_B = self._zeta(B)
        self.Phi_B = cumulative_from_zero(self.grid, self.zeta_B**2)
        self.Psi_AB = self.chi_A**2 * self.Phi_B
        self.Psi_AB_prime = (2.0 * self.chi_A * self.chi_A_prime * self.Phi_B
                             + self.chi_A**2 * self.zeta_B**2)
        self.rho = 1.0 / np.cosh(np.sqrt(w0) / 10.0 * x)

    def _zeta(self, K: float) -> np.ndarray:
        x = self.grid.x
        taper = 1.0 - bump_normalized(np.sqrt(self.omega0) * x)
        return np.exp(-np.abs(x) / K * taper)

    def zeta_of(self, K: float) -> np.ndarray:
        return self._zeta(K)


def default_AB(nl, omega0: float, grid: Grid) -> tuple[float, float]:
    """Diagnostic defaults: B from the inverse smallness scale (capped),
    A = 40 B further capped so the grid still covers [-2A, 2A]."""
    eps = smallness(nl, omega0).eps
    if eps > 0:
        B = float(min(np.ceil(2.0 / (eps * np.sqrt(omega0))), 1e3))
    else:
        B = 2.0 * omega0 ** (-0.5)
    B = max(B, np.nextafter(omega0 ** (-0.5), np.inf) * 1.001)
    A = min(40.0 * B, np.floor(grid.L / 2.0))
    if A <= B:
        B = max(A / 4.0, 1.001 * omega0 ** (-0.5))
    if A <= B:
        raise ArgumentError(
            f"grid too small to order A > B > omega0^(-1/2) (L={grid.L})"
        )
    return float(A), float(B)


def build_weights(omega0: float, A: float, B: float, grid: Grid) -> WeightSet:
    return WeightSet(omega0, A, B, grid)


class PotentialSet:
    """Potentials of the transformed operators, their virial-weighted
    versions, and the bounded Green solutions feeding the second virial."""

    def __init__(self, profile: SolitonProfile, weights: WeightSet):
        from .grids import same_grid

        g = same_grid(profile.grid, weights.grid)
        self.grid = g
        self.omega = profile.omega
        x = g.x
        self.a_plus = a_plus(profile)
        self.a_minus = a_minus(profile)
        self.a_plus_prime = a_plus_prime(profile)
        self.a_minus_prime = a_minus_prime(profile)
        ratio = weights.Phi_B / weights.zeta_B**2
        self.P_B_plus = -self.a_plus_prime * ratio
        self.P_B_minus = -self.a_minus_prime * ratio
        self.P_B = 0.5 * (self.P_B_plus + self.P_B_minus)
        self.D_B = 0.5 * (self.P_B_plus - self.P_B_minus)
        self.P_inf = -0.5 * x * (self.a_plus_prime + self.a_minus_prime)
        self.D_inf = -0.5 * x * (self.a_plus_prime - self.a_minus_prime)
        self.R_B = green_bounded(g, self.omega, self.D_B)
        self.R_inf = green_bounded(g, self.omega, self.D_inf)
        sm = smallness(profile.nl, profile.omega)
        self.eps = sm.eps
        self._gamma_B = None
        self._gamma_inf = None
        if self.eps > 0.0:
            self._gamma_B = integrate(g, self.P_B) / self.eps
            self._gamma_inf = integrate(g, self.P_inf) / self.eps

    @property
    def gamma_B(self) -> float:
        if self._gamma_B is None:
            raise SolwaveError("gamma undefined: smallness scale is zero")
        return self._gamma_B

    @property
    def gamma_inf(self) -> float:
        if self._gamma_inf is None:
            raise SolwaveError("gamma undefined: smallness scale is zero")
        return self._gamma_inf


def green_bounded(grid: Grid, omega: float, rhs: np.ndarray) -> np.ndarray:
    """Bounded solution of -R''/2 + omega R = rhs via the exponential
    kernel exp(-sqrt(2 omega)|x-y|)/sqrt(2 omega), evaluated by a
    shift-stable recursion (no large exponentials are ever formed)."""
    k = np.sqrt(2.0 * omega)
    h = grid.h
    e = np.exp(-k * h)
    # exact weights for a linear interpolant of rhs on each interval
    w_far = (1.0 - e * (1.0 + k * h)) / (k**2 * h)   # node farther from x
    w_near = (1.0 - e) / k - w_far                   # node at x
    n = grid.n
    left = np.zeros(n)
    for j in range(1, n):
        left[j] = left[j - 1] * e + rhs[j - 1] * w_far + rhs[j] * w_near
    right = np.zeros(n)
    for j in range(n - 2, -1, -1):
        right[j] = right[j + 1] * e + rhs[j + 1] * w_far + rhs[j] * w_near
    return (left + right) / k


def build_potentials(profile: SolitonProfile, weights: WeightSet) -> PotentialSet:
    return PotentialSet(profile, weights)
