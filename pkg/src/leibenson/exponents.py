"""Exponent algebra for the weighted doubly nonlinear diffusion rho*du/dt = Delta_p(u^q).

Derived constants (fast-diffusion gap, Sobolev exponent, energy exponents),
admissibility windows for the density exponent l in the different geometric
regimes, and the extinction-time bound obtained from the energy-decay ODE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "Exponents",
    "DerivedConstants",
    "Interval",
    "derive",
    "theta_of",
    "sigma_min_of",
    "caccioppoli_constant",
    "theta_max_cases",
    "admissible_l_range",
    "extinction_time_bound",
    "REGIMES",
]

# Relative slack used when a denominator should vanish exactly but floating
# point leaves a residue (theta -> infinity detection).
_SNAP = 1e-12


@dataclass(frozen=True)
class Exponents:
    """The primitive exponent tuple (n, p, q, zeta, sigma).

    Requires p > 1, q > 0, zeta > 1, n >= 2 and the fast-diffusion condition
    1 - q(p-1) > 0.  sigma is optional; operations default it to sigma_min.
    """

    n: int
    p: float
    q: float
    zeta: float = 2.0
    sigma: float | None = None

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"spatial dimension must be an integer >= 2, got {self.n}")
        if not self.p > 1:
            raise DomainError(f"p must be > 1, got {self.p}")
        if not self.q > 0:
            raise DomainError(f"q must be > 0, got {self.q}")
        if not self.zeta > 1:
            raise DomainError(f"zeta must be > 1, got {self.zeta}")
        if not 1.0 - self.q * (self.p - 1.0) > 0.0:
            raise DomainError(
                f"fast-diffusion condition 1 - q(p-1) > 0 fails for p={self.p}, q={self.q}"
            )

    @property
    def diffusion_gap(self) -> float:
        """The fast-diffusion gap 1 - q(p-1), in (0, 1)."""
        return 1.0 - self.q * (self.p - 1.0)


@dataclass(frozen=True)
class DerivedConstants:
    """All scalars derived from an Exponents tuple (and optionally l)."""

    diffusion_gap: float
    kappa: float
    sigma: float
    sigma_min: float
    theta: float
    theta_max: float
    theta_opt: float
    theta_opt_conjectural: bool
    l_star: float
    kappa_l: float | None
    c_caccioppoli: float


@dataclass(frozen=True)
class Interval:
    """A real interval with explicit endpoint-openness flags.

    hi may be math.inf; empty intervals are legal values.
    """

    lo: float
    hi: float
    lo_open: bool = True
    hi_open: bool = True

    @property
    def unbounded_above(self) -> bool:
        return math.isinf(self.hi)

    @property
    def is_empty(self) -> bool:
        if self.lo > self.hi:
            return True
        if self.lo == self.hi and (self.lo_open or self.hi_open):
            return True
        return False

    def contains(self, x: float) -> bool:
        if self.is_empty:
            return False
        lo_ok = x > self.lo if self.lo_open else x >= self.lo
        hi_ok = x < self.hi if self.hi_open else x <= self.hi
        return lo_ok and hi_ok

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        hi = "inf" if math.isinf(self.hi) else f"{self.hi:.6g}"
        return f"{left}{self.lo:.6g}, {hi}{right}"


def sigma_min_of(p: float, q: float, zeta: float, kappa: float) -> float:
    """Smallest admissible energy exponent: max(p, pq, zeta - gap, gap/(kappa-1))."""
    gap = 1.0 - q * (p - 1.0)
    return max(p, p * q, zeta - gap, gap / (kappa - 1.0))


def theta_of(kappa: float, gap: float, sigma: float) -> float:
    """Integrability exponent kappa / (kappa - 1 - gap/sigma); +inf at the degenerate endpoint."""
    denom = kappa - 1.0 - gap / sigma
    if denom <= _SNAP * (kappa - 1.0):
        return math.inf
    return kappa / denom


def caccioppoli_constant(p: float, q: float, sigma: float) -> float:
    """Energy-inequality constant (sigma+gap)(sigma+gap-1) 2^-p q^(p-1) sigma^-p p^p."""
    gap = 1.0 - q * (p - 1.0)
    s = sigma + gap
    return s * (s - 1.0) * 2.0 ** (-p) * q ** (p - 1.0) * sigma ** (-p) * p**p


def derive(e: Exponents, l: float | None = None) -> DerivedConstants:
    """Derive every scalar constant from the exponent tuple.

    kappa = n/(n-p) (requires n > p).  sigma defaults to sigma_min, the choice
    that maximizes theta.  theta_opt is the conjectured optimal endpoint and is
    always flagged conjectural; no admissibility decision here consumes it.

    Raises DomainError if n <= p or a supplied sigma is below sigma_min.
    """
    n, p, q, zeta = e.n, e.p, e.q, e.zeta
    gap = e.diffusion_gap
    if not n > p:
        raise DomainError(f"n > p required for the Sobolev exponent n/(n-p); got n={n}, p={p}")
    kappa = n / (n - p)
    sigma_min = sigma_min_of(p, q, zeta, kappa)
    sigma = e.sigma if e.sigma is not None else sigma_min
    if sigma < sigma_min * (1.0 - 1e-15):
        raise DomainError(f"sigma={sigma} is below sigma_min={sigma_min}")
    theta = theta_of(kappa, gap, sigma)
    theta_max = theta_of(kappa, gap, sigma_min)
    if kappa >= 1.0 / (1.0 - gap):
        theta_opt = theta_of(kappa, gap, zeta - gap)
    else:
        theta_opt = math.inf
    l_star = (p - n * gap) / (1.0 - gap)
    kappa_l = (1.0 - gap) * (l - l_star) if l is not None else None
    return DerivedConstants(
        diffusion_gap=gap,
        kappa=kappa,
        sigma=sigma,
        sigma_min=sigma_min,
        theta=theta,
        theta_max=theta_max,
        theta_opt=theta_opt,
        theta_opt_conjectural=True,
        l_star=l_star,
        kappa_l=kappa_l,
        c_caccioppoli=caccioppoli_constant(p, q, sigma),
    )


def theta_max_cases(e: Exponents) -> tuple[str, float]:
    """Piecewise form of theta_max for kappa = n/(n-p).

    Returns a case label and the value.  The three finite branches correspond
    to sigma_min being pq, p, or zeta-gap respectively; when gap/(kappa-1)
    dominates, theta_max is infinite ("else").  Always agrees with
    derive(e).theta_max.
    """
    n, p, q, zeta = e.n, e.p, e.q, e.zeta
    gap = e.diffusion_gap
    if not n > p:
        raise DomainError(f"n > p required, got n={n}, p={p}")

    def finite(sig: float) -> float:
        return n / (p - gap * (n - p) / sig)

    if q >= max(zeta - 1.0, 1.0) and p > gap * (n - p) / (p * q):
        return "case-1", finite(p * q)
    if q <= min(1.0, (p + 1.0 - zeta) / (p - 1.0)) and p > gap * (n - p) / p:
        return "case-2", finite(p)
    if (p + 1.0 - zeta) / (p - 1.0) <= q <= zeta - 1.0 and p > gap * (n - p) / (zeta - gap):
        return "case-3", finite(zeta - gap)
    return "else", math.inf


REGIMES = ("exact-rn", "prop-4.6", "cartan-hadamard", "ricci", "rn-optimal")


def admissible_l_range(e: Exponents, regime: str, alpha: float | None = None) -> Interval:
    """Admissible window for the density exponent l in the given regime.

    Regimes:
      exact-rn        window (l_star, p) in which the closed-form radial
                      solution on R^n exists (clipped below at 0, where the
                      power density is defined).
      prop-4.6        conformal weighted model with unit density: [0, 2) when
                      theta_max is infinite, else (2n/(p*theta_max), 2).
      cartan-hadamard polynomial volume growth r^alpha: l > alpha/theta_max,
                      or [0, inf) when theta_max is infinite.
      ricci           non-negative Ricci with reverse doubling exponent
                      alpha > 2: l > alpha - kappa(theta_max-1)(alpha-p)/theta_max,
                      or [kappa*p - alpha(kappa-1), inf) when theta_max is infinite.
      rn-optimal      sharp window on R^n: l > (p - n*gap)/(1-gap) when
                      p >= n*gap, else l >= 0.
    """
    n, p = e.n, e.p
    gap = e.diffusion_gap
    d = derive(e)
    theta_max = d.theta_max

    if regime == "exact-rn":
        l_star = d.l_star
        if l_star >= 0:
            return Interval(l_star, p, lo_open=True, hi_open=True)
        return Interval(0.0, p, lo_open=False, hi_open=True)

    if regime == "prop-4.6":
        if math.isinf(theta_max):
            return Interval(0.0, 2.0, lo_open=False, hi_open=True)
        return Interval(2.0 * n / (p * theta_max), 2.0, lo_open=True, hi_open=True)

    if regime == "cartan-hadamard":
        if alpha is None or alpha <= 0:
            raise DomainError("cartan-hadamard regime needs a volume-growth exponent alpha > 0")
        if math.isinf(theta_max):
            return Interval(0.0, math.inf, lo_open=False, hi_open=True)
        return Interval(alpha / theta_max, math.inf, lo_open=True, hi_open=True)

    if regime == "ricci":
        if alpha is None or alpha <= 2:
            raise DomainError("ricci regime needs a reverse-doubling exponent alpha > 2")
        kappa = d.kappa
        if math.isinf(theta_max):
            return Interval(kappa * p - alpha * (kappa - 1.0), math.inf, lo_open=False, hi_open=True)
        lo = alpha - kappa * (theta_max - 1.0) * (alpha - p) / theta_max
        return Interval(lo, math.inf, lo_open=True, hi_open=True)

    if regime == "rn-optimal":
        if p >= n * gap:
            return Interval((p - n * gap) / (1.0 - gap), math.inf, lo_open=True, hi_open=True)
        return Interval(0.0, math.inf, lo_open=False, hi_open=True)

    raise DomainError(f"unknown regime {regime!r}; expected one of {REGIMES}")


def extinction_time_bound(
    phi0: float, c1: float, C_sobolev: float, sigma: float, gap: float
) -> float:
    """Extinction-time bound T = (sigma+gap)/(c*gap) * phi0^(gap/(sigma+gap)).

    c = c1 * C_sobolev^(-sigma/(sigma+gap)).  Increasing in phi0 and in
    C_sobolev; when C_sobolev is a lower bound for the true Sobolev constant,
    the returned T is a lower bound for the predicted extinction time.
    """
    if phi0 < 0:
        raise DomainError(f"initial energy must be >= 0, got {phi0}")
    if c1 <= 0:
        raise DomainError(f"energy-inequality constant must be > 0, got {c1}")
    if C_sobolev <= 0:
        raise DomainError(f"Sobolev constant must be > 0, got {C_sobolev}")
    if not 0.0 < gap < 1.0:
        raise DomainError(f"diffusion gap must lie in (0, 1), got {gap}")
    if sigma <= 0:
        raise DomainError(f"sigma must be > 0, got {sigma}")
    if phi0 == 0.0:
        return 0.0
    c = c1 * C_sobolev ** (-sigma / (sigma + gap))
    return (sigma + gap) / (c * gap) * phi0 ** (gap / (sigma + gap))
