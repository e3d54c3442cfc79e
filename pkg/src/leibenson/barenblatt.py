"""Closed-form self-similar solution on R^n with density r^(-l), and its verifiers.

The profile

    u(r, t) = (T-t)^((n-l)/kappa_l) * [C + b * r^((p-l)/(p-1)) * (T-t)^((p-l)/((p-1) kappa_l))]^(-(p-1)/gap)

with b = kappa_l^(-1/(p-1)) * gap / ((p-l) q) solves rho*du/dt = Delta_p(u^q)
for rho = r^(-l) whenever l_star < l < p < n, and vanishes identically for
t >= T.  (The exponent on kappa_l in b must be -1/(p-1): matching powers in
the flux balance forces q * (p-1)/gap * b * (p-l)/(p-1) = kappa_l^(-1/(p-1)),
and only then does the residual vanish identically; see the symbolic check in
the test suite.)  It serves as the oracle for the radial solver: this module
evaluates it, checks the PDE residual by centered finite differences, and
computes its energy integral with a certified truncation exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, DomainError
from .geometry import sphere_area
from .quadrature import integrate_radial

__all__ = ["BarenblattProfile"]


def _signed_power(g: np.ndarray, p: float):
    """|g|^(p-2) * g, extended by continuity with value 0 at g = 0 (p > 1)."""
    return np.sign(g) * np.abs(g) ** (p - 1.0)


@dataclass(frozen=True)
class BarenblattProfile:
    """Evaluable radial self-similar solution with extinction time T.

    Parameters must satisfy the fast-diffusion condition and the window
    l_star < l < p < n.  C > 0 is the free profile constant.
    """

    n: int
    p: float
    q: float
    l: float
    C: float = 1.0
    T: float = 1.0

    def __post_init__(self) -> None:
        if not self.p > 1 or not self.q > 0:
            raise DomainError("p > 1 and q > 0 required")
        if self.diffusion_gap <= 0:
            raise DomainError(
                f"fast-diffusion condition fails: 1 - q(p-1) = {self.diffusion_gap}"
            )
        if not self.n > self.p:
            raise DomainError(f"n > p required, got n={self.n}, p={self.p}")
        if not (self.l_star < self.l < self.p):
            raise DomainError(
                f"density exponent l={self.l} outside the admissible window "
                f"({self.l_star}, {self.p})"
            )
        if self.C <= 0 or self.T <= 0:
            raise DomainError("C > 0 and T > 0 required")

    @property
    def diffusion_gap(self) -> float:
        return 1.0 - self.q * (self.p - 1.0)

    @property
    def l_star(self) -> float:
        gap = self.diffusion_gap
        return (self.p - self.n * gap) / (1.0 - gap)

    @property
    def kappa_l(self) -> float:
        return (1.0 - self.diffusion_gap) * (self.l - self.l_star)

    @property
    def _bracket_coef(self) -> float:
        gap = self.diffusion_gap
        return self.kappa_l ** (-1.0 / (self.p - 1.0)) * gap / ((self.p - self.l) * self.q)

    def eval(self, r, t):
        """Solution value; vectorized in r and t, exactly 0 for t >= T."""
        r = np.asarray(r, dtype=float)
        t = np.asarray(t, dtype=float)
        gap = self.diffusion_gap
        kl = self.kappa_l
        tau = np.maximum(self.T - t, 0.0)
        r_pow = (self.p - self.l) / (self.p - 1.0)
        bracket = self.C + self._bracket_coef * r**r_pow * tau ** (r_pow / kl)
        u = tau ** ((self.n - self.l) / kl) * bracket ** (-(self.p - 1.0) / gap)
        return u if u.shape else float(u)

    __call__ = eval

    def pde_residual(self, r: float, t: float, h_r: float, h_t: float) -> float:
        """Residual rho*du/dt - r^(1-n) d/dr(r^(n-1) |d(u^q)/dr|^(p-2) d(u^q)/dr).

        Centered differences with steps h_r (space, staggered flux stencil)
        and h_t (time).  Refuses stencils that touch r <= 0, cross t = 0, or
        straddle the extinction time; a stencil entirely past extinction
        returns 0.
        """
        if h_r <= 0 or h_t <= 0:
            raise DomainError("h_r and h_t must be > 0")
        if r - h_r <= 0:
            raise DomainError(f"spatial stencil reaches r <= 0 (r={r}, h_r={h_r})")
        if t - h_t < 0:
            raise DomainError(f"time stencil reaches t < 0 (t={t}, h_t={h_t})")
        if t - h_t >= self.T:
            return 0.0
        if t + h_t > self.T:
            raise DomainError(
                f"time stencil straddles the extinction time (t={t}, h_t={h_t}, T={self.T})"
            )
        du_dt = (self.eval(r, t + h_t) - self.eval(r, t - h_t)) / (2.0 * h_t)

        def w(rr: float) -> float:
            return self.eval(rr, t) ** self.q

        g_plus = (w(r + h_r) - w(r)) / h_r
        g_minus = (w(r) - w(r - h_r)) / h_r
        r_plus = r + 0.5 * h_r
        r_minus = r - 0.5 * h_r
        nm1 = self.n - 1
        div = (
            r_plus**nm1 * _signed_power(g_plus, self.p)
            - r_minus**nm1 * _signed_power(g_minus, self.p)
        ) / (h_r * r**nm1)
        return float(r ** (-self.l) * du_dt - div)

    def energy_tail_exponent(self, sigma: float) -> float:
        """Power exponent of u^(sigma+gap) * r^(-l) * r^(n-1) as r -> infinity."""
        gap = self.diffusion_gap
        decay = (self.p - self.l) / gap
        return -(sigma + gap) * decay + self.n - 1.0 - self.l

    def energy(self, sigma: float, t: float, R_max: float) -> tuple[float, float]:
        """Truncated energy integral of u^(sigma+gap) against r^(-l) dmu.

        Returns (value, tail_exponent); the tail exponent certifies the
        truncation error at R_max.  Raises DivergenceError when the full-space
        integral diverges (tail exponent >= -1).
        """
        gap = self.diffusion_gap
        tail = self.energy_tail_exponent(sigma)
        if tail >= -1.0:
            raise DivergenceError(
                f"energy integrand decays like r^{tail:.4g}; the full-space "
                "integral diverges"
            )
        if t >= self.T:
            return 0.0, tail
        nu = sphere_area(self.n)
        s = sigma + gap

        def integrand(r: float) -> float:
            return float(self.eval(r, t)) ** s * r ** (self.n - 1.0 - self.l) * nu

        return integrate_radial(integrand, 0.0, R_max), tail
