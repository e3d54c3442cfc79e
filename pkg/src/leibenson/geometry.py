"""Radially symmetric weighted model geometries.

A model is described by its area function S(r) (the radial density of the
volume measure), a Sobolev weight w(r), a Sobolev exponent kappa, and an
optional mass density rho(r).  Four families are provided:

  euclidean         flat R^n, S(r) = nu_{n-1} r^{n-1}, weight 1.
  conformal         flat R^n rescaled by a radial conformal factor that decays
                    like c*R^(-l); carries the weight a^(-p/2).
  ch_polynomial     polynomial volume growth V(r) = r^alpha with weight 1
                    (Cartan-Hadamard-type Sobolev inequality).
  ricci_polynomial  polynomial growth with the volume-corrected weight
                    V(r)^(kappa-1) / r^(kappa*p) (non-negative Ricci type).

Every radial function carries its power-law exponents at r -> 0 and
r -> infinity so finiteness verdicts can be certified analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy import special

from .errors import DomainError, QuadratureError
from .quadrature import integrate_radial

__all__ = [
    "RadialFunction",
    "WeightedModel",
    "RadialGrid",
    "FinitenessResult",
    "sphere_area",
    "power_density",
    "capped_power_density",
    "constant_density",
    "build_euclidean",
    "build_conformal",
    "build_ch_polynomial",
    "build_ricci_polynomial",
    "cell_densities",
    "finiteness_norm",
]


@dataclass(frozen=True)
class RadialFunction:
    """A positive function of the radius with known power behavior at 0 and infinity.

    f(r) ~ C0 * r**exp0 as r -> 0 and f(r) ~ Cinf * r**exp_inf as r -> inf.
    """

    func: Callable[[np.ndarray], np.ndarray]
    exp0: float
    exp_inf: float

    def __call__(self, r):
        return self.func(np.asarray(r, dtype=float))


def sphere_area(n: int) -> float:
    """Surface measure of the unit (n-1)-sphere: 2 pi^(n/2) / Gamma(n/2)."""
    return 2.0 * math.pi ** (n / 2.0) / special.gamma(n / 2.0)


def power_density(l: float) -> RadialFunction:
    """The singular power density rho(r) = r^(-l) (exact down to the origin)."""
    if l == 0.0:
        return constant_density(1.0)
    return RadialFunction(lambda r: r ** (-l), exp0=-l, exp_inf=-l)


def capped_power_density(l: float, r_cap: float = 1.0) -> RadialFunction:
    """A density that equals r^(-l) for r >= r_cap and is smoothly capped below.

    The cap r_cap^(-l) * exp((l/2)(1 - (r/r_cap)^2)) matches value and slope
    at r_cap, so the density is C^1, bounded at the origin, and has the same
    decay exponent at infinity as the pure power.
    """
    if l < 0:
        raise DomainError(f"density exponent must be >= 0, got l={l}")
    if r_cap <= 0:
        raise DomainError(f"cap radius must be > 0, got {r_cap}")
    if l == 0.0:
        return constant_density(1.0)
    amp = r_cap ** (-l)

    def rho(r):
        r = np.asarray(r, dtype=float)
        inner = amp * np.exp((l / 2.0) * (1.0 - (r / r_cap) ** 2))
        outer = np.where(r > 0, np.maximum(r, r_cap), r_cap) ** (-l)
        return np.where(r < r_cap, inner, outer)

    return RadialFunction(rho, exp0=0.0, exp_inf=-l)


def constant_density(value: float = 1.0) -> RadialFunction:
    if value < 0:
        raise DomainError(f"density must be >= 0, got {value}")
    return RadialFunction(lambda r: np.full_like(np.asarray(r, dtype=float), value), 0.0, 0.0)


@dataclass(frozen=True)
class WeightedModel:
    """A radial weighted geometry: area function, Sobolev weight, density."""

    name: str
    S_mu: RadialFunction
    omega: RadialFunction
    kappa: float
    params: dict
    rho: RadialFunction | None = None

    def with_density(self, rho: RadialFunction) -> "WeightedModel":
        return replace(self, rho=rho)


def build_euclidean(n: int, p: float) -> WeightedModel:
    """Flat R^n: S(r) = nu_{n-1} r^(n-1), weight 1, kappa = n/(n-p)."""
    if not n > p:
        raise DomainError(f"n > p required, got n={n}, p={p}")
    nu = sphere_area(n)
    return WeightedModel(
        name="euclidean",
        S_mu=RadialFunction(lambda r: nu * r ** (n - 1), exp0=n - 1, exp_inf=n - 1),
        omega=constant_density(1.0),
        kappa=n / (n - p),
        params={"n": n, "p": p},
    )


class _ConformalMap:
    """Radial change of variables for the conformal factor a(R).

    a(R) = c * R^(-l) for R >= R0 and a continuous C^1 exponential cap below,
    so a is bounded and positive at the origin.  The geodesic radius is
    r(R) = integral of sqrt(a); both r(R) and its inverse are closed-form
    (error-function) expressions, exact to machine precision.
    """

    def __init__(self, l: float, c: float, R0: float):
        self.l = l
        self.c = c
        self.R0 = R0
        if l > 0:
            # r(R) = K * erf(sqrt(l)/2 * R/R0) on [0, R0]
            self._K = math.sqrt(c) * R0 ** (1.0 - l / 2.0) * math.exp(l / 4.0) * math.sqrt(
                math.pi / l
            )
            self.r_smooth = self._K * math.erf(math.sqrt(l) / 2.0)
        else:
            self._K = math.nan
            self.r_smooth = math.sqrt(c) * R0

    def a(self, R):
        R = np.asarray(R, dtype=float)
        l, c, R0 = self.l, self.c, self.R0
        if l == 0.0:
            return np.full_like(R, c)
        inner = c * R0 ** (-l) * np.exp((l / 2.0) * (1.0 - (R / R0) ** 2))
        outer = c * np.maximum(R, R0) ** (-l)
        return np.where(R < R0, inner, outer)

    def r_of_R(self, R):
        R = np.asarray(R, dtype=float)
        l, c, R0 = self.l, self.c, self.R0
        if l == 0.0:
            return math.sqrt(c) * R
        inner = self._K * special.erf(math.sqrt(l) / 2.0 * R / R0)
        pw = 1.0 - l / 2.0
        outer = self.r_smooth + math.sqrt(c) / pw * (np.maximum(R, R0) ** pw - R0**pw)
        return np.where(R < R0, inner, outer)

    def R_of_r(self, r):
        r = np.asarray(r, dtype=float)
        l, c, R0 = self.l, self.c, self.R0
        if l == 0.0:
            return r / math.sqrt(c)
        arg = np.clip(np.minimum(r, self.r_smooth) / self._K, 0.0, 1.0 - 1e-16)
        inner = 2.0 * R0 / math.sqrt(l) * special.erfinv(arg)
        pw = 1.0 - l / 2.0
        base = np.maximum(r - self.r_smooth, 0.0) * pw / math.sqrt(c) + R0**pw
        outer = base ** (1.0 / pw)
        return np.where(r < self.r_smooth, inner, outer)


def build_conformal(n: int, p: float, l: float, c: float, R0: float = 1.0) -> WeightedModel:
    """Conformally rescaled R^n with factor decaying like c * R^(-l), l in [0, 2).

    The model carries the Sobolev weight a^(-p/2) (expressed in the geodesic
    radius) and the area function a^((p-1)/2) * nu_{n-1} R^(n-1), which grows
    like r^(l(n-p)/(2-l) + n - 1).  With l = 0, c = 1 this is exactly the
    euclidean model.
    """
    if not n > p:
        raise DomainError(f"n > p required, got n={n}, p={p}")
    if not 0.0 <= l < 2.0:
        raise DomainError(f"conformal exponent must lie in [0, 2), got l={l}")
    if c <= 0:
        raise DomainError(f"conformal amplitude must be > 0, got c={c}")
    if R0 <= 0:
        raise DomainError(f"smoothing radius must be > 0, got R0={R0}")
    nu = sphere_area(n)
    cmap = _ConformalMap(l, c, R0)

    def S_mu(r):
        R = cmap.R_of_r(r)
        return nu * cmap.a(R) ** ((p - 1.0) / 2.0) * R ** (n - 1)

    def omega(r):
        return cmap.a(cmap.R_of_r(r)) ** (-p / 2.0)

    return WeightedModel(
        name="conformal",
        S_mu=RadialFunction(S_mu, exp0=n - 1, exp_inf=l * (n - p) / (2.0 - l) + n - 1),
        omega=RadialFunction(omega, exp0=0.0, exp_inf=l * p / (2.0 - l)),
        kappa=n / (n - p),
        params={"n": n, "p": p, "l": l, "c": c, "R0": R0, "r_smooth": cmap.r_smooth},
    )


def build_ch_polynomial(n: int, p: float, alpha: float) -> WeightedModel:
    """Polynomial volume growth V(r) = r^alpha with unit Sobolev weight."""
    if not n > p:
        raise DomainError(f"n > p required, got n={n}, p={p}")
    if alpha <= 0:
        raise DomainError(f"volume-growth exponent must be > 0, got alpha={alpha}")
    return WeightedModel(
        name="ch_polynomial",
        S_mu=RadialFunction(lambda r: alpha * r ** (alpha - 1), exp0=alpha - 1, exp_inf=alpha - 1),
        omega=constant_density(1.0),
        kappa=n / (n - p),
        params={"n": n, "p": p, "alpha": alpha},
    )


def build_ricci_polynomial(n: int, p: float, alpha: float) -> WeightedModel:
    """Polynomial growth V(r) = r^alpha, alpha > 2, with weight V^(kappa-1)/r^(kappa p)."""
    if not n > p:
        raise DomainError(f"n > p required, got n={n}, p={p}")
    if alpha <= 2:
        raise DomainError(f"reverse volume doubling needs alpha > 2, got alpha={alpha}")
    kappa = n / (n - p)
    w_exp = alpha * (kappa - 1.0) - kappa * p
    return WeightedModel(
        name="ricci_polynomial",
        S_mu=RadialFunction(lambda r: alpha * r ** (alpha - 1), exp0=alpha - 1, exp_inf=alpha - 1),
        omega=RadialFunction(lambda r: r**w_exp, exp0=w_exp, exp_inf=w_exp)
        if w_exp != 0.0
        else constant_density(1.0),
        kappa=kappa,
        params={"n": n, "p": p, "alpha": alpha},
    )


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial finite-volume grid on [0, R_max].

    cell_measures are the per-cell volume integrals of the area function,
    evaluated with the midpoint rule (the same quadrature the solver's mass
    pairing uses).
    """

    r_faces: np.ndarray
    r_centers: np.ndarray
    dr: float
    cell_measures: np.ndarray
    S_faces: np.ndarray

    @classmethod
    def build(cls, model: WeightedModel, R_max: float, cells: int) -> "RadialGrid":
        if R_max <= 0:
            raise DomainError(f"outer radius must be > 0, got {R_max}")
        if cells < 3:
            raise DomainError(f"need at least 3 cells, got {cells}")
        faces = np.linspace(0.0, R_max, cells + 1)
        centers = 0.5 * (faces[:-1] + faces[1:])
        dr = R_max / cells
        measures = model.S_mu(centers) * dr
        S_faces = np.empty(cells + 1)
        S_faces[0] = 0.0
        S_faces[1:] = model.S_mu(faces[1:])
        if np.any(measures <= 0):
            raise DomainError("area function must be strictly positive on cell centers")
        return cls(faces, centers, dr, measures, S_faces)

    @property
    def cells(self) -> int:
        return self.r_centers.size

    @property
    def R_max(self) -> float:
        return float(self.r_faces[-1])


def cell_densities(model: WeightedModel, grid: RadialGrid) -> np.ndarray:
    """Cell densities rho_i, with the first cell volume-averaged when rho is singular.

    For a density with a power singularity at the origin the first cell uses
    (integral of rho * S over the cell) / cell measure, keeping the discrete
    mass pairing consistent with the volume quadrature.
    """
    if model.rho is None:
        raise DomainError("model has no density; call with_density first")
    rho = model.rho(grid.r_centers)
    if model.rho.exp0 < 0:
        if model.rho.exp0 + model.S_mu.exp0 <= -1.0:
            raise QuadratureError(
                "density * area is non-integrable at the origin "
                f"(exponent {model.rho.exp0 + model.S_mu.exp0:.3g})"
            )
        first = integrate_radial(
            lambda r: float(model.rho(r) * model.S_mu(r)), 0.0, float(grid.r_faces[1])
        )
        rho = rho.copy()
        rho[0] = first / grid.cell_measures[0]
    return rho


@dataclass(frozen=True)
class FinitenessResult:
    """Outcome of the density-to-weight integrability probe."""

    value: float
    tail_exponent: float
    origin_exponent: float
    theta: float
    finite: bool

    def __iter__(self):
        return iter((self.value, self.tail_exponent))


def finiteness_norm(model: WeightedModel, theta: float, R_probe: float) -> FinitenessResult:
    """Probe the theta-norm of rho/omega against the weighted volume measure.

    For finite theta returns the quadrature of (rho/omega)^theta * omega * S
    over (0, R_probe] together with the analytic power exponent of the
    integrand at infinity; the norm is finite exactly when that exponent is
    below -1.  For theta = inf returns the sup of rho/omega on (0, R_probe]
    and the decay exponent of rho/omega.

    Raises QuadratureError when the integrand fails to be integrable at the
    origin (reported, not hidden).
    """
    if model.rho is None:
        raise DomainError("model has no density; call with_density first")
    if not (theta > 1.0):
        raise DomainError(f"theta must be > 1 (or inf), got {theta}")
    rho, omega, S = model.rho, model.omega, model.S_mu

    if math.isinf(theta):
        ratio_exp0 = rho.exp0 - omega.exp0
        ratio_exp_inf = rho.exp_inf - omega.exp_inf
        if ratio_exp0 < 0:
            return FinitenessResult(math.inf, ratio_exp_inf, ratio_exp0, theta, False)
        r = np.geomspace(1e-8 * R_probe, R_probe, 4096)
        sup = float(np.max(rho(r) / omega(r)))
        finite = ratio_exp_inf <= 0 and math.isfinite(sup)
        return FinitenessResult(sup, ratio_exp_inf, ratio_exp0, theta, finite)

    e0 = theta * (rho.exp0 - omega.exp0) + omega.exp0 + S.exp0
    e_inf = theta * (rho.exp_inf - omega.exp_inf) + omega.exp_inf + S.exp_inf

    def integrand(r: float) -> float:
        rr = float(rho(r))
        if rr == 0.0:
            return 0.0
        return (rr / float(omega(r))) ** theta * float(omega(r)) * float(S(r))

    if integrand(R_probe * 0.5) == 0.0 and integrand(R_probe * 0.05) == 0.0:
        # identically-zero density
        return FinitenessResult(0.0, -math.inf, e0, theta, True)
    if e0 <= -1.0:
        raise QuadratureError(
            f"integrand is non-integrable at the origin (power exponent {e0:.4g} <= -1)"
        )
    value = integrate_radial(integrand, 0.0, R_probe)
    return FinitenessResult(value, e_inf, e0, theta, e_inf < -1.0)
