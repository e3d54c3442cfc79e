"""Numerical checks of the finite-extinction proof chain on discrete solutions.

Given a recorded energy trace Phi(t) = sum_i u_i^(sigma+gap) rho_i m_i and the
gradient dissipation of v = u^(sigma/p), this module verifies, at desk scale:

  * the energy inequality  Phi(t2) - Phi(t1) + c1 * integral of dissipation <= 0,
  * the discrete Hoelder bound relating Phi to the weighted v^(p*kappa) sum,
  * lower bounds for the weighted Sobolev constant from explicit test profiles,
  * the differential inequality dPhi/dt <= -c Phi^(sigma/(sigma+gap)) and the
    closed-form comparison function it implies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateError, DomainError, RangeError
from .geometry import RadialGrid, WeightedModel, cell_densities

__all__ = [
    "EnergyTrace",
    "CaccioppoliResult",
    "BumpProfile",
    "ProbeResult",
    "OdeComparisonResult",
    "energy_Phi",
    "grad_term",
    "weighted_mass",
    "caccioppoli_check",
    "hoelder_step_check",
    "default_bump_family",
    "sobolev_probe",
    "comparison_psi",
    "ode_comparison",
]


@dataclass
class EnergyTrace:
    """Time series of the energy functional and companion diagnostics."""

    times: np.ndarray
    Phi: np.ndarray
    grad_term: np.ndarray
    sup_u: np.ndarray
    mass: np.ndarray
    outflow: np.ndarray
    clamped: np.ndarray
    sigma: float
    diffusion_gap: float

    def __post_init__(self) -> None:
        arrays = (self.times, self.Phi, self.grad_term, self.sup_u, self.mass,
                  self.outflow, self.clamped)
        n = self.times.size
        if any(a.size != n for a in arrays):
            raise DomainError("trace arrays must have equal length")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise DomainError("trace times must be strictly increasing")
        if np.any(self.Phi < 0):
            raise DomainError("energy values must be non-negative")

    def __len__(self) -> int:
        return self.times.size


def energy_Phi(model: WeightedModel, grid: RadialGrid, u: np.ndarray,
               sigma: float, gap: float) -> float:
    """Discrete energy sum_i u_i^(sigma+gap) rho_i m_i (the solver's mass pairing)."""
    rho = cell_densities(model, grid)
    return float(np.dot(np.asarray(u, dtype=float) ** (sigma + gap), rho * grid.cell_measures))


def grad_term(model: WeightedModel, grid: RadialGrid, u: np.ndarray,
              sigma: float, p: float) -> float:
    """Dissipation sum over interior faces of S(r_f) dr |delta(u^(sigma/p))/dr|^p."""
    v = np.asarray(u, dtype=float) ** (sigma / p)
    g = np.abs(np.diff(v)) / grid.dr
    return float(np.sum(grid.S_faces[1:-1] * grid.dr * g**p))


def weighted_mass(model: WeightedModel, grid: RadialGrid, u: np.ndarray) -> float:
    """Total discrete mass sum_i rho_i m_i u_i."""
    rho = cell_densities(model, grid)
    return float(np.dot(np.asarray(u, dtype=float), rho * grid.cell_measures))


@dataclass(frozen=True)
class CaccioppoliResult:
    """Outcome of the energy-inequality check over one time window."""

    lhs: float
    decay: float
    dissipation: float
    margin: float
    passed: bool


def _interp(times: np.ndarray, values: np.ndarray, t: float) -> float:
    return float(np.interp(t, times, values))


def caccioppoli_check(trace: EnergyTrace, c1: float, t1: float, t2: float,
                      tol_ineq: float = 1e-2) -> CaccioppoliResult:
    """Check Phi(t2) - Phi(t1) + c1 * time-integral of the dissipation <= 0.

    The time integral is trapezoidal on the recorded instants; endpoints are
    linearly interpolated.  Passes when lhs <= tol_ineq * Phi(t1); margin is
    lhs normalized by Phi(t1).
    """
    if not t1 < t2:
        raise RangeError(f"need t1 < t2, got ({t1}, {t2})")
    if t1 < trace.times[0] or t2 > trace.times[-1]:
        raise RangeError(
            f"window [{t1}, {t2}] not covered by the trace "
            f"[{trace.times[0]}, {trace.times[-1]}]"
        )
    phi1 = _interp(trace.times, trace.Phi, t1)
    phi2 = _interp(trace.times, trace.Phi, t2)
    inside = (trace.times > t1) & (trace.times < t2)
    ts = np.concatenate(([t1], trace.times[inside], [t2]))
    gs = np.concatenate((
        [_interp(trace.times, trace.grad_term, t1)],
        trace.grad_term[inside],
        [_interp(trace.times, trace.grad_term, t2)],
    ))
    dissipation = float(np.trapezoid(gs, ts))
    lhs = phi2 - phi1 + c1 * dissipation
    denom = max(phi1, 1e-300)
    margin = lhs / denom
    passed = lhs <= tol_ineq * phi1 + 1e-300
    return CaccioppoliResult(lhs, phi2 - phi1, dissipation, margin, passed)


def hoelder_step_check(model: WeightedModel, grid: RadialGrid, u: np.ndarray,
                       sigma: float, gap: float, theta: float,
                       kappa: float) -> tuple[float, float]:
    """Discrete Hoelder bound: Phi <= (sum v^(p*kappa) w m)^((sigma+gap)/(sigma*kappa)) * norm.

    With v = u^(sigma/p) the bulk term v^(p*kappa) is u^(sigma*kappa), so p
    drops out.  The norm is the discrete theta-norm of rho/omega against
    omega * m (or the max of rho/omega when theta is infinite, the boundary
    case sigma*kappa = sigma+gap).  Both sides use the same cell weights, so
    the inequality holds exactly up to rounding.
    """
    if sigma * kappa < sigma + gap - 1e-12:
        raise DomainError("need sigma*kappa >= sigma + gap")
    u = np.asarray(u, dtype=float)
    rho = cell_densities(model, grid)
    w = model.omega(grid.r_centers)
    m = grid.cell_measures
    lhs = float(np.dot(u ** (sigma + gap), rho * m))
    bulk = float(np.dot(u ** (sigma * kappa), w * m))
    expo = (sigma + gap) / (sigma * kappa)
    if math.isinf(theta):
        norm = float(np.max(rho / w))
    else:
        norm = float(np.dot((rho / w) ** theta, w * m)) ** (1.0 / theta)
    return lhs, bulk**expo * norm


@dataclass(frozen=True)
class BumpProfile:
    """Radial test profile (1 - (r/R)^2)_+^k used to probe the Sobolev constant."""

    R: float
    k: float

    def __call__(self, r: np.ndarray) -> np.ndarray:
        z = 1.0 - (np.asarray(r, dtype=float) / self.R) ** 2
        return np.maximum(z, 0.0) ** self.k


def default_bump_family(R_values: Sequence[float] = (0.5, 1.0, 2.0, 4.0, 8.0),
                        k_values: Sequence[float] = (1.0, 2.0, 3.0)) -> list[BumpProfile]:
    return [BumpProfile(R, k) for R in R_values for k in k_values]


@dataclass(frozen=True)
class ProbeResult:
    """Certified lower bound for the weighted Sobolev constant."""

    C_lower: float
    best: BumpProfile
    ratios: tuple[float, ...]


def sobolev_probe(model: WeightedModel, p: float, kappa: float,
                  test_family: Iterable[BumpProfile] | None = None,
                  cells: int = 1024) -> ProbeResult:
    """Max over the test family of LHS/RHS in the weighted Sobolev inequality.

    LHS = (sum v^(p*kappa) omega m)^(1/kappa), RHS = sum over faces of
    S dr |dv/dr|^p (including the outer face against the zero continuation).
    Every ratio bounds the optimal constant from below, so the max is a
    certified lower bound; it is not a sharp constant.
    """
    family = list(test_family) if test_family is not None else default_bump_family()
    if not family:
        raise DegenerateError("empty test family")
    ratios = []
    for prof in family:
        grid = RadialGrid.build(model, prof.R, cells)
        v = prof(grid.r_centers)
        w = model.omega(grid.r_centers)
        lhs = float(np.dot(v ** (p * kappa), w * grid.cell_measures)) ** (1.0 / kappa)
        v_ext = np.concatenate((v, [0.0]))
        g = np.abs(np.diff(v_ext)) / grid.dr
        rhs = float(np.sum(grid.S_faces[1:] * grid.dr * g**p))
        if rhs == 0.0:
            raise DegenerateError(f"test profile {prof} has zero gradient term")
        ratios.append(lhs / rhs)
    best_idx = int(np.argmax(ratios))
    return ProbeResult(ratios[best_idx], family[best_idx], tuple(ratios))


def comparison_psi(phi0: float, c: float, sigma: float, gap: float, t) -> np.ndarray:
    """Closed-form solution of dPsi/dt = -c Psi^(sigma/(sigma+gap)), Psi(0) = phi0.

    Psi(t) = (phi0^(gap/(sigma+gap)) - gap/(sigma+gap) * c * t)_+^((sigma+gap)/gap),
    reaching zero at T = (sigma+gap)/(c*gap) * phi0^(gap/(sigma+gap)).
    """
    t = np.asarray(t, dtype=float)
    s = sigma + gap
    core = phi0 ** (gap / s) - (gap / s) * c * t
    psi = np.maximum(core, 0.0) ** (s / gap)
    return psi if psi.shape else float(psi)


@dataclass(frozen=True)
class OdeComparisonResult:
    """Verdict of the comparison between Phi and the closed-form majorant."""

    c: float
    fitted: bool
    passed: bool
    max_ratio: float
    T_zero: float


def ode_comparison(trace: EnergyTrace, c: float | None = None,
                   rel_tol: float = 1e-6) -> OdeComparisonResult:
    """Verify Phi <= Psi for the comparison function, or fit the best rate.

    With c given, checks Phi(t_i) <= Psi(t_i) * (1 + rel_tol) + atol on every
    record.  With c = None, first fits the largest c* such that the one-sided
    difference quotients satisfy dPhi/dt <= -c* Phi^(sigma/(sigma+gap)) on the
    whole trace (intervals whose Phi has decayed to rounding noise, below
    1e-16 * Phi(0), are excluded), then verifies with c*.
    """
    if len(trace) < 3:
        raise RangeError(f"need at least 3 recorded samples, got {len(trace)}")
    sigma, gap = trace.sigma, trace.diffusion_gap
    s = sigma / (sigma + gap)
    phi = trace.Phi
    t = trace.times
    phi0 = float(phi[0])
    fitted = c is None
    if fitted:
        noise = 1e-16 * phi0
        left = phi[:-1]
        right = phi[1:]
        dt = np.diff(t)
        ok = left > noise
        if not np.any(ok):
            raise DegenerateError("trace energy is identically at rounding level")
        rates = (left[ok] - right[ok]) / dt[ok] / left[ok] ** s
        c = float(np.min(rates))
    if c <= 0:
        return OdeComparisonResult(float(c), fitted, False, math.inf,
                                   math.inf)
    psi = comparison_psi(phi0, c, sigma, gap, t)
    atol = 1e-12 * phi0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(psi > 0, phi / np.maximum(psi, 1e-300), np.where(phi <= atol, 0.0, np.inf))
    passed = bool(np.all(phi <= psi * (1.0 + rel_tol) + atol))
    T_zero = (sigma + gap) / (c * gap) * phi0 ** (gap / (sigma + gap))
    return OdeComparisonResult(float(c), fitted, passed, float(np.max(ratio)), T_zero)
