"""Closed-form perturbation nonlinearities and their smallness scales.

The cubic equation is perturbed by a term g(|psi|^2) psi where g is a
finite combination of real powers s^sigma with sigma > 1.  Keeping the
family closed-form means every derivative up to order five is exact, so
no downstream tolerance is polluted by numerical differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import ArgumentError, DomainError, SingularityError

# Admissible frequencies probe s in [0, SUP_MULTIPLIER * omega]; the
# smallness scale tolerates any multiplier strictly above 2.
SUP_MULTIPLIER = 3.0
_SUP_SAMPLES = 4096


def _falling(sigma: float, k: int) -> float:
    """sigma * (sigma-1) * ... * (sigma-k+1)."""
    out = 1.0
    for j in range(k):
        out *= sigma - j
    return out


@dataclass(frozen=True)
class Nonlinearity:
    """A finite sum g(s) = sum_i a_i s^{sigma_i} with sigma_i > 1.

    Families:
      zero            -- g identically 0
      power(sigma)    -- g(s) = s^sigma
      spower(a,sigma) -- g(s) = a s^sigma
      poly            -- arbitrary finite sum
    """

    family: str
    terms: tuple[tuple[float, float], ...]  # (coefficient, exponent) pairs
    s_max: float = field(default=0.0)
    name: str = ""

    def __post_init__(self):
        for a, sigma in self.terms:
            if not np.isfinite(a) or not np.isfinite(sigma):
                raise ArgumentError("non-finite term in nonlinearity")
            if sigma <= 1.0:
                raise ArgumentError(
                    f"exponent {sigma} <= 1 violates g(0)=g'(0)=0"
                )
        if self.s_max <= 0.0:
            object.__setattr__(self, "s_max", self._default_s_max())
        if not self.name:
            object.__setattr__(self, "name", self._default_name())

    # -- construction -------------------------------------------------

    @staticmethod
    def zero() -> "Nonlinearity":
        return Nonlinearity("zero", ())

    @staticmethod
    def power(sigma: float) -> "Nonlinearity":
        return Nonlinearity("power", ((1.0, float(sigma)),))

    @staticmethod
    def spower(a: float, sigma: float) -> "Nonlinearity":
        return Nonlinearity("spower", ((float(a), float(sigma)),))

    @staticmethod
    def poly(terms) -> "Nonlinearity":
        return Nonlinearity(
            "poly", tuple((float(a), float(s)) for a, s in terms)
        )

    @staticmethod
    def from_config(cfg: dict) -> "Nonlinearity":
        fam = cfg.get("family")
        if fam == "zero":
            return Nonlinearity.zero()
        if fam == "power":
            return Nonlinearity.power(cfg["sigma"])
        if fam in ("spower", "signed-power"):
            return Nonlinearity.spower(cfg["a"], cfg["sigma"])
        if fam == "poly":
            return Nonlinearity.poly(
                [(t["a"], t["sigma"]) for t in cfg["terms"]]
            )
        raise ArgumentError(f"unknown nonlinearity family {fam!r}")

    @staticmethod
    def from_string(spec: str) -> "Nonlinearity":
        """Parse shorthand such as 'zero', 'power:2', 'spower:-1,2',
        'poly:1.0,1.5;-0.3,2.5'."""
        head, _, rest = spec.partition(":")
        head = head.strip().lower()
        if head == "zero":
            return Nonlinearity.zero()
        if head == "power":
            return Nonlinearity.power(float(rest))
        if head == "spower":
            a, sigma = rest.split(",")
            return Nonlinearity.spower(float(a), float(sigma))
        if head == "poly":
            terms = []
            for piece in rest.split(";"):
                a, sigma = piece.split(",")
                terms.append((float(a), float(sigma)))
            return Nonlinearity.poly(terms)
        raise ArgumentError(f"unknown nonlinearity spec {spec!r}")

    def config(self) -> dict:
        if self.family == "zero":
            return {"family": "zero"}
        if self.family in ("power", "spower"):
            a, sigma = self.terms[0]
            if self.family == "power":
                return {"family": "power", "sigma": sigma}
            return {"family": "spower", "a": a, "sigma": sigma}
        return {
            "family": "poly",
            "terms": [{"a": a, "sigma": s} for a, s in self.terms],
        }

    def _default_name(self) -> str:
        if not self.terms:
            return "g=0"
        bits = [f"{a:+g}*s^{s:g}" for a, s in self.terms]
        return "g(s)=" + "".join(bits).lstrip("+")

    # -- evaluation ---------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return all(a == 0.0 for a, _ in self.terms)

    @property
    def sigma_min(self) -> float:
        live = [s for a, s in self.terms if a != 0.0]
        return min(live) if live else np.inf

    def g(self, s, k: int = 0):
        """k-th derivative of g at s (vectorized, no domain checks)."""
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        for a, sigma in self.terms:
            c = a * _falling(sigma, k)
            if c != 0.0:
                with np.errstate(divide="ignore", invalid="ignore"):
                    out = out + c * np.power(s, sigma - k)
        return out if out.shape else float(out)

    def G(self, s):
        """Primitive G(s) = integral of g from 0 to s."""
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        for a, sigma in self.terms:
            out = out + a / (sigma + 1.0) * np.power(s, sigma + 1.0)
        return out if out.shape else float(out)

    # Exact ratio forms: these stay finite at s = 0 because every
    # exponent below is positive, killing the 0/0 ambiguity that naive
    # division would create in soliton tails.

    def g_over_s(self, s):
        return self._power_sum(s, lambda a, sig: (a, sig - 1.0))

    def G_over_s(self, s):
        return self._power_sum(s, lambda a, sig: (a / (sig + 1.0), sig))

    def G_over_s2(self, s):
        return self._power_sum(s, lambda a, sig: (a / (sig + 1.0), sig - 1.0))

    def s_g2(self, s):
        """s * g''(s), continuous down to s = 0."""
        return self._power_sum(
            s, lambda a, sig: (a * _falling(sig, 2), sig - 1.0)
        )

    def s2_g3(self, s):
        """s^2 * g'''(s), continuous down to s = 0."""
        return self._power_sum(
            s, lambda a, sig: (a * _falling(sig, 3), sig - 1.0)
        )

    def s3_g4(self, s):
        """s^3 * g''''(s), continuous down to s = 0."""
        return self._power_sum(
            s, lambda a, sig: (a * _falling(sig, 4), sig - 1.0)
        )

    def _power_sum(self, s, xf):
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        for a, sigma in self.terms:
            c, p = xf(a, sigma)
            if c != 0.0:
                out = out + c * np.power(s, p)
        return out if out.shape else float(out)

    def _default_s_max(self) -> float:
        """First critical point of J(s) = s/2 - G(s)/s, else 1."""
        if self.is_zero:
            return 1.0
        ss = np.logspace(-8, 1, 2000)
        jp = 0.5 - self.g_over_s(ss) + self.G_over_s2(ss)
        below = np.nonzero(jp <= 0.0)[0]
        if below.size == 0:
            return 1.0
        i = below[0]
        lo, hi = ss[i - 1], ss[i]
        f = lambda s: 0.5 - self.g_over_s(s) + self.G_over_s2(s)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if f(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def eval_g(nl: Nonlinearity, s: float, k: int = 0, primitive: bool = False):
    """Checked evaluation of g^(k)(s), or of G(s) when primitive is set.

    Raises DomainError beyond s_max and SingularityError when a
    derivative order exceeds what the family supports at s = 0.
    """
    if not 0 <= k <= 5:
        raise ArgumentError("derivative order must lie in 0..5")
    if s < 0.0 or s > nl.s_max:
        raise DomainError(f"s={s} outside [0, {nl.s_max}]")
    if primitive:
        if k != 0:
            raise ArgumentError("primitive flag only applies at k = 0")
        return nl.G(s)
    if s == 0.0 and k >= 2:
        for a, sigma in nl.terms:
            if a != 0.0 and sigma < k and _falling(sigma, k) != 0.0:
                raise SingularityError(
                    f"g^({k}) unbounded at s=0 for exponent {sigma}"
                )
        # all exponents >= k: limit exists (0 or the sigma == k constant)
        out = 0.0
        for a, sigma in nl.terms:
            if sigma == k:
                out += a * _falling(sigma, k)
        return out
    return nl.g(s, k)


@dataclass(frozen=True)
class SmallnessPair:
    """Perturbation scales sup|s g''| and sup|s^2 g'''| over [0, m*omega]."""

    omega: float
    eps: float
    eps_tilde: float
    refine_delta: float  # relative change when sample density doubles


def _sampled_sup(fn, hi: float, samples: int) -> float:
    if hi <= 0.0:
        return 0.0
    ss = np.linspace(0.0, hi, samples)
    vals = np.abs(fn(ss))
    i = int(np.argmax(vals))
    best = float(vals[i])
    # golden-section refinement around the sampled argmax bracket
    lo = ss[max(i - 1, 0)]
    up = ss[min(i + 1, samples - 1)]
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, up
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = abs(float(fn(c))), abs(float(fn(d)))
    for _ in range(80):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = abs(float(fn(c)))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = abs(float(fn(d)))
    return max(best, fc, fd)


def smallness(
    nl: Nonlinearity, omega: float, multiplier: float = SUP_MULTIPLIER
) -> SmallnessPair:
    """Compute the pair (eps, eps_tilde) for the window [0, multiplier*omega]."""
    if omega <= 0.0:
        raise ArgumentError("omega must be positive")
    hi = multiplier * omega
    if hi > nl.s_max:
        raise DomainError(
            f"window [0, {hi}] exceeds validity cap s_max={nl.s_max}"
        )
    eps = _sampled_sup(nl.s_g2, hi, _SUP_SAMPLES)
    eps2 = _sampled_sup(nl.s_g2, hi, 2 * _SUP_SAMPLES)
    eps_t = _sampled_sup(nl.s2_g3, hi, _SUP_SAMPLES)
    scale = max(eps, eps2, 1e-300)
    return SmallnessPair(omega, eps2, eps_t, abs(eps2 - eps) / scale)


def check_H1(nl: Nonlinearity, omega_sweep) -> dict:
    """Trend report for the small-argument decay of g and its derivatives.

    For each derivative order k the sampled sup of |g^(k)(s) s^(k-1)| on
    (0, 3*omega] must shrink along a decreasing omega sweep; a finite
    sweep exhibits the trend and its log-log slope, not a limit.
    """
    sweep = [float(w) for w in omega_sweep]
    if any(w <= 0 for w in sweep) or any(
        a <= b for a, b in zip(sweep, sweep[1:])
    ):
        raise ArgumentError("omega sweep must be positive and decreasing")
    report: dict = {"omega": sweep, "orders": {}, "name": nl.name}
    nontrivial = not nl.is_zero
    if nontrivial:
        probe = np.linspace(0.0, SUP_MULTIPLIER * min(sweep), 64)[1:]
        nontrivial = bool(np.any(nl.g(probe) != 0.0))
    report["nontrivial"] = nontrivial
    all_decay = True
    for k in range(6):
        sups = []
        for w in sweep:
            hi = min(SUP_MULTIPLIER * w, nl.s_max)
            ss = np.linspace(0.0, hi, 1024)[1:]
            vals = np.abs(nl.g(ss, k) * ss ** (k - 1))
            sups.append(float(np.max(vals)) if vals.size else 0.0)
        sups_arr = np.array(sups)
        decreasing = bool(np.all(np.diff(sups_arr) <= 1e-14 + sups_arr[:-1]))
        # trend toward zero: final value below initial, allowing flat zeros
        toward_zero = sups_arr[-1] <= sups_arr[0] * (1.0 + 1e-12)
        pos = sups_arr > 0
        slope = None
        if np.count_nonzero(pos) >= 2:
            slope = float(
                np.polyfit(np.log(np.array(sweep)[pos]), np.log(sups_arr[pos]), 1)[0]
            )
        report["orders"][k] = {
            "sup": sups,
            "slope": slope,
            "decays": bool(decreasing and toward_zero),
        }
        all_decay = all_decay and report["orders"][k]["decays"]
    report["passed"] = bool(all_decay and nontrivial)
    return report


def primitive_residual(nl: Nonlinearity, s: float) -> float:
    """Relative gap between closed-form G and adaptive quadrature of g."""
    if s <= 0:
        return 0.0
    val, _ = quad(lambda t: nl.g(t), 0.0, s, limit=200)
    ref = nl.G(s)
    return abs(val - ref) / max(abs(ref), 1e-300)
