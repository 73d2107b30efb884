"""Solitary-wave profiles and their companion functions.

The even positive profile solves phi'' = omega*phi - phi^3 + phi*g(phi^2)
and carries the first integral (phi')^2 = omega*phi^2 - phi^4/2 + G(phi^2).
Rather than shooting (the initial-value problem has an exponentially
unstable direction), the profile is obtained by quadrature inversion of
the first integral, which is unconditionally stable:

    x(p) = integral_p^zeta  dq / sqrt(omega q^2 - q^4/2 + G(q^2)),

with the square-root singularity at q = zeta absorbed by q = zeta - t^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

from .errors import GridError, NoSolitonError, NumericsError
from .grids import Grid
from .nonlin import Nonlinearity

TAIL_FLOOR = 1e-12  # below TAIL_FLOOR*sqrt(omega) the tail is analytic
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def j_curve(nl: Nonlinearity, s) -> tuple:
    """Height function J(s) = s/2 - G(s)/s and its derivative.

    J(0) = 0 by continuity and J'(0) = 1/2; the first frequency with no
    localized profile is J at the first critical point of J.
    """
    s_arr = np.asarray(s, dtype=float)
    J = 0.5 * s_arr - nl.G_over_s(s_arr)
    Jp = 0.5 - nl.g_over_s(s_arr) + nl.G_over_s2(s_arr)
    if J.shape:
        return J, Jp
    return float(J), float(Jp)


def omega_max(nl: Nonlinearity) -> float:
    """Largest admissible frequency: J evaluated at its first critical
    point (s_max caps the search when J has no critical point)."""
    J, _ = j_curve(nl, nl.s_max)
    return float(J)


def solve_zeta(nl: Nonlinearity, omega: float) -> tuple[float, float, float]:
    """Peak amplitude zeta = sqrt(s) solving J(s) = omega.

    Returns (zeta, dzeta/domega, omega_max).  Newton iteration with a
    bisection fallback on the bracket (0, s_max).
    """
    w_max = omega_max(nl)
    if not 0.0 < omega < w_max:
        raise NoSolitonError(
            f"omega={omega} outside the admissible range (0, {w_max})"
        )
    lo, hi = 0.0, nl.s_max
    s = min(2.0 * omega, 0.5 * (lo + hi))
    for _ in range(100):
        J, Jp = j_curve(nl, s)
        if J > omega:
            hi = s
        else:
            lo = s
        if abs(J - omega) <= 1e-15 + 1e-15 * omega:
            break
        step = (J - omega) / Jp if Jp > 0 else np.nan
        s_new = s - step
        if not np.isfinite(s_new) or not lo < s_new < hi:
            s_new = 0.5 * (lo + hi)
        if s_new == s:
            break
        s = s_new
    J, Jp = j_curve(nl, s)
    if abs(J - omega) > 1e-13:
        raise NumericsError(f"J(s)-omega residual {abs(J - omega):.3e} > 1e-13")
    zeta = float(np.sqrt(s))
    dzeta = 1.0 / (2.0 * Jp * zeta)
    return zeta, dzeta, w_max


@dataclass
class SolitonProfile:
    """Profile arrays on a grid, with closed-form derivatives.

    phi_k[k] holds the k-th spatial derivative at the nodes (k = 0..4).
    lam / lam_prime and a_omega / a_omega_prime are filled by
    build_lambda and build_a_omega.
    """

    nl: Nonlinearity
    omega: float
    zeta: float
    dzeta_domega: float
    omega_max: float
    grid: Grid
    phi_k: np.ndarray  # shape (5, n)
    x_switch: float  # |x| beyond which the exponential tail is used
    _log_spline: CubicSpline
    lam: np.ndarray | None = None
    lam_prime: np.ndarray | None = None
    a_omega: np.ndarray | None = None
    a_omega_prime: np.ndarray | None = None
    alpha_norm: float | None = None
    flags: dict = field(default_factory=dict)

    @property
    def phi(self) -> np.ndarray:
        return self.phi_k[0]

    def phi_fn(self, x):
        """Profile value at arbitrary positions (spline + analytic tail)."""
        x = np.abs(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        inside = x <= self.x_switch
        out[inside] = np.exp(self._log_spline(x[inside]))
        t = x[~inside]
        w = self.omega
        p_sw = float(np.exp(self._log_spline(self.x_switch)))
        out[~inside] = p_sw * np.exp(-np.sqrt(w) * (t - self.x_switch))
        return out if out.shape else float(out)

    def first_integral(self, p):
        """(phi')^2 as a function of phi."""
        p = np.asarray(p, dtype=float)
        s = p * p
        return self.omega * s - 0.5 * s * s + self.nl.G(s)

    def derivative_arrays(self, p, sgn):
        """Closed-form phi', phi'', phi''', phi'''' from phi values."""
        nl, w = self.nl, self.omega
        s = p * p
        V = np.maximum(self.first_integral(p), 0.0)
        d1 = -sgn * np.sqrt(V)
        g = nl.g(s) if not nl.is_zero else np.zeros_like(p)
        g1 = nl.g(s, 1) if not nl.is_zero else np.zeros_like(p)
        d2 = w * p - p * s + p * g
        lin = w - 3.0 * s + g + 2.0 * s * g1
        d3 = d1 * lin
        d4 = d2 * lin + V * p * (-6.0 + 6.0 * g1 + 4.0 * nl.s_g2(s))
        return d1, d2, d3, d4

    def validate(self, tol_ode: float | None = None) -> dict:
        """Finite-difference self-consistency of the stored arrays."""
        if tol_ode is None:
            tol_ode = 1e-7 * self.omega
        g = self.grid
        D1 = g.diff_matrix(1)
        D2 = g.diff_matrix(2)
        p = self.phi
        keep = slice(4, g.n - 4)
        ode = (D2 @ p) - (self.omega * p - p**3 + p * self.nl.g(p * p))
        fi = (D1 @ p) ** 2 - self.first_integral(p)
        report = {
            "ode_residual": float(np.max(np.abs(ode[keep]))),
            "first_integral_residual": float(np.max(np.abs(fi[keep]))),
            "tol_ode": tol_ode,
            "even": bool(np.allclose(p, p[::-1], rtol=0, atol=1e-14)),
            "positive": bool(np.all(p > 0)),
            "decreasing": bool(
                np.all(np.diff(p[g.x >= 0]) <= 1e-17)
            ),
            "zeta_gate": bool(self.zeta <= np.sqrt(3.0 * self.omega)),
        }
        report["ode_ok"] = report["ode_residual"] <= tol_ode
        report["first_integral_ok"] = (
            report["first_integral_residual"] <= tol_ode
        )
        return report


def _quadrature_table(nl: Nonlinearity, omega: float, zeta: float,
                      ladder: int) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative table (x_k, p_k) of the inverse profile, p decreasing."""

    def V(p):
        s = p * p
        return omega * s - 0.5 * s * s + nl.G(s)

    # near the peak: p = zeta - t^2 removes the sqrt singularity
    p_c = 0.75 * zeta
    t_c = np.sqrt(zeta - p_c)
    t_edges = np.linspace(0.0, t_c, ladder + 1)
    a, b = t_edges[:-1, None], t_edges[1:, None]
    tt = 0.5 * (b - a) * _GL_NODES + 0.5 * (a + b)
    f = 2.0 * tt / np.sqrt(V(zeta - tt * tt))
    seg = 0.5 * (b - a)[:, 0] * (f @ _GL_WEIGHTS)
    x1 = np.concatenate([[0.0], np.cumsum(seg)])
    p1 = zeta - t_edges**2

    # tail: integrate in log p down to the analytic-tail floor
    p_min = 0.1 * TAIL_FLOOR * np.sqrt(omega)
    u_edges = np.linspace(np.log(p_c), np.log(p_min), ladder + 1)
    a, b = u_edges[:-1, None], u_edges[1:, None]
    uu = 0.5 * (b - a) * _GL_NODES + 0.5 * (a + b)
    pp = np.exp(uu)
    f = pp / np.sqrt(V(pp))
    seg = 0.5 * (a - b)[:, 0] * (f @ _GL_WEIGHTS)  # u decreases along x
    x2 = x1[-1] + np.cumsum(seg)
    p2 = np.exp(u_edges[1:])

    x = np.concatenate([x1, x2])
    p = np.concatenate([p1, p2])
    return x, p


def build_profile(
    nl: Nonlinearity, omega: float, grid: Grid, ladder: int = 5000
) -> SolitonProfile:
    """Tabulate the profile and derivatives 0..4 on the grid."""
    if grid.L < 25.0 / np.sqrt(omega):
        raise GridError(
            f"grid half-length {grid.L} below 25/sqrt(omega)="
            f"{25.0 / np.sqrt(omega):.1f}"
        )
    zeta, dzeta, w_max = solve_zeta(nl, omega)
    xs, ps = _quadrature_table(nl, omega, zeta, ladder)
    log_spline = CubicSpline(xs, np.log(ps))
    # switch to the pure exponential where the profile drops below floor
    floor = TAIL_FLOOR * np.sqrt(omega)
    x_switch = float(np.interp(-np.log(floor), -np.log(ps), xs))

    prof = SolitonProfile(
        nl=nl,
        omega=omega,
        zeta=zeta,
        dzeta_domega=dzeta,
        omega_max=w_max,
        grid=grid,
        phi_k=np.zeros((5, grid.n)),
        x_switch=x_switch,
        _log_spline=log_spline,
    )
    x = grid.x
    p = prof.phi_fn(x)
    sgn = np.sign(x)
    d1, d2, d3, d4 = prof.derivative_arrays(p, sgn)
    prof.phi_k = np.stack([p, d1, d2, d3, d4])

    s3 = 3.0 * omega
    ss = np.linspace(0.0, s3, 512)[1:]
    prof.flags = {
        "zeta_le_sqrt3w": bool(zeta <= np.sqrt(s3)),
        "g_below_identity": bool(np.all(np.abs(nl.g(ss)) < ss)),
    }
    return prof


def phi_second_at_zero(profile: SolitonProfile) -> float:
    """phi''(0) from the closed form at the peak."""
    z = profile.zeta
    s = z * z
    return profile.omega * z - z * s + z * profile.nl.g(s)


def _even_halves(grid: Grid):
    """Index maps for the even-subspace restriction of a symmetric grid."""
    n = grid.n
    if n % 2:
        raise GridError("even-subspace solve expects an even node count")
    half = np.arange(n // 2, n)
    mirror = n - 1 - half
    return half, mirror


def lplus_matrix(profile: SolitonProfile) -> sp.csr_matrix:
    """-d2/dx2 + omega - 3 phi^2 + g(phi^2) + 2 phi^2 g'(phi^2)."""
    g = profile.grid
    p = profile.phi
    s = p * p
    nl = profile.nl
    pot = profile.omega - 3.0 * s + nl.g(s) + 2.0 * s * nl.g(s, 1)
    return (-g.diff_matrix(2) + sp.diags(pot)).tocsr()


def build_lambda(profile: SolitonProfile, rtol_anchor: float = 1e-6) -> None:
    """Scaled frequency derivative of the profile, from the boundary-value
    problem on the even subspace (the odd kernel direction is excluded by
    symmetry, so the restricted operator is invertible).  On periodic
    grids the kernel direction is pinned by a bordered solve instead."""
    g = profile.grid
    A = lplus_matrix(profile)
    if g.boundary == "periodic":
        _build_lambda_bordered(profile, A, rtol_anchor)
        return
    half, mirror = _even_halves(g)
    m = half.size
    # restriction of A to even vectors: columns folded onto the half grid
    idx = np.arange(m)
    E = sp.csr_matrix(
        (np.ones(2 * m), (np.concatenate([half, mirror]),
                          np.concatenate([idx, idx]))),
        shape=(g.n, m),
    )
    Ae = (A @ E)[half, :]
    rhs = -profile.omega * profile.phi[half]
    lu = spla.splu(Ae.tocsc())
    lam_half = lu.solve(rhs)
    # cheap condition estimate via one-norms of the matrix and its inverse
    lu_t = spla.splu(Ae.T.tocsc())
    inv_norm = spla.onenormest(
        spla.LinearOperator((m, m), matvec=lu.solve, rmatvec=lu_t.solve)
    )
    cond = spla.onenormest(Ae) * inv_norm
    if cond > 1e12:
        raise NumericsError(f"even-subspace solve ill-conditioned ({cond:.2e})")
    lam = np.empty(g.n)
    lam[half] = lam_half
    lam[mirror] = lam_half
    # anchor: value at the origin must match omega * dzeta/domega
    c = lam_half[:4]
    lam0 = (9.0 * (c[0] + c[0]) - (c[1] + c[1])) / 16.0
    target = profile.omega * profile.dzeta_domega
    if abs(lam0 - target) > rtol_anchor * abs(target):
        raise NumericsError(
            f"origin anchor mismatch: {lam0:.10g} vs {target:.10g}"
        )
    profile.lam = lam
    profile.lam_prime = g.diff_matrix(1) @ lam


def _build_lambda_bordered(profile: SolitonProfile, A, rtol_anchor: float):
    g = profile.grid
    c = profile.phi_k[1][:, None] * g.h
    M = sp.bmat([[A, c], [c.T, None]], format="csc")
    rhs = np.concatenate([-profile.omega * profile.phi, [0.0]])
    sol_vec = spla.splu(M).solve(rhs)
    lam = sol_vec[:-1]
    resid = np.linalg.norm(A @ lam + profile.omega * profile.phi)
    scale = np.linalg.norm(profile.omega * profile.phi)
    if resid > 1e-9 * scale:
        raise NumericsError(f"pinned solve residual {resid/scale:.2e}")
    j0 = int(np.argmin(np.abs(g.x)))
    target = profile.omega * profile.dzeta_domega
    if abs(lam[j0] - target) > rtol_anchor * abs(target):
        raise NumericsError(
            f"origin anchor mismatch: {lam[j0]:.10g} vs {target:.10g}"
        )
    profile.lam = lam
    profile.lam_prime = g.diff_matrix(1) @ lam


def build_a_omega(profile: SolitonProfile) -> None:
    """Even growing solution of the kernel equation for the linearized
    operator on the real part, normalized so that
    phi'' * A - phi' * A' = 1 everywhere."""
    g = profile.grid
    x = g.x
    d2_0 = phi_second_at_zero(profile)
    if d2_0 == 0.0:
        raise NumericsError("degenerate profile: phi''(0) = 0")
    half, mirror = _even_halves(g)
    xr = x[half]
    p1 = profile.phi_k[1][half]
    p2 = profile.phi_k[2][half]
    res = 1.0 / p1**2 - 1.0 / (d2_0 * xr) ** 2

    # res is even and finite at 0; r(0) = -phi''''(0) / (3 phi''(0)^3)
    z = profile.zeta
    *_, d4_0 = profile.derivative_arrays(np.array([z]), np.array([0.0]))
    r0 = -float(d4_0[0]) / (3.0 * d2_0**3)
    h2 = xr[0]
    r2 = (res[0] - r0) / h2**2
    head = r0 * h2 + r2 * h2**3 / 3.0  # integral of res over [0, x_0]

    D = head + cumulative_simpson(res, x=xr, initial=0.0)
    bracket = 1.0 / (d2_0**2 * xr) - D
    a_half = p1 * bracket
    ap_half = p2 * bracket - 1.0 / p1

    a = np.empty(g.n)
    ap = np.empty(g.n)
    a[half] = a_half
    a[mirror] = a_half
    ap[half] = ap_half
    ap[mirror] = -ap_half
    profile.a_omega = a
    profile.a_omega_prime = ap
    x_ref = 1.0 / np.sqrt(profile.omega)
    profile.alpha_norm = float(
        np.sqrt(profile.omega) / d2_0**2 - np.interp(x_ref, xr, D)
    )


def wronskian_residual(profile: SolitonProfile) -> float:
    """max |phi'' A - phi' A' - 1| over the nodes."""
    if profile.a_omega is None:
        raise NumericsError("a_omega not built")
    w = (
        profile.phi_k[2] * profile.a_omega
        - profile.phi_k[1] * profile.a_omega_prime
    )
    return float(np.max(np.abs(w - 1.0)))


# closed-form comparators for the unperturbed cubic equation

def cubic_profile(omega: float, x) -> np.ndarray:
    """sqrt(2 omega) sech(sqrt(omega) x)."""
    return np.sqrt(2.0 * omega) / np.cosh(np.sqrt(omega) * np.asarray(x))


def cubic_lambda(omega: float, x) -> np.ndarray:
    """Scaled frequency derivative of the cubic profile."""
    y = np.sqrt(omega) * np.asarray(x)
    return np.sqrt(omega / 2.0) * (1.0 - y * np.tanh(y)) / np.cosh(y)
