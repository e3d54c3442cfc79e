"""Radial finite-volume simulation and finite-extinction diagnostics for
the weighted doubly nonlinear diffusion rho * du/dt = Delta_p(u^q)."""

from .barenblatt import BarenblattProfile
from .diagnostics import (
    EnergyTrace,
    caccioppoli_check,
    comparison_psi,
    energy_Phi,
    grad_term,
    hoelder_step_check,
    ode_comparison,
    sobolev_probe,
    weighted_mass,
)
from .exponents import (
    DerivedConstants,
    Exponents,
    Interval,
    admissible_l_range,
    caccioppoli_constant,
    derive,
    extinction_time_bound,
    sigma_min_of,
    theta_max_cases,
    theta_of,
)
from .geometry import (
    FinitenessResult,
    RadialGrid,
    WeightedModel,
    build_ch_polynomial,
    build_conformal,
    build_euclidean,
    build_ricci_polynomial,
    capped_power_density,
    constant_density,
    finiteness_norm,
    power_density,
    sphere_area,
)
from .solver import RunResult, SolverConfig, State, flux_faces, run, stable_dt, step

__all__ = [
    "BarenblattProfile",
    "DerivedConstants",
    "EnergyTrace",
    "Exponents",
    "FinitenessResult",
    "Interval",
    "RadialGrid",
    "RunResult",
    "SolverConfig",
    "State",
    "WeightedModel",
    "admissible_l_range",
    "build_ch_polynomial",
    "build_conformal",
    "build_euclidean",
    "build_ricci_polynomial",
    "caccioppoli_check",
    "caccioppoli_constant",
    "capped_power_density",
    "comparison_psi",
    "constant_density",
    "derive",
    "energy_Phi",
    "extinction_time_bound",
    "finiteness_norm",
    "flux_faces",
    "grad_term",
    "hoelder_step_check",
    "ode_comparison",
    "power_density",
    "run",
    "sigma_min_of",
    "sobolev_probe",
    "sphere_area",
    "stable_dt",
    "step",
    "theta_max_cases",
    "theta_of",
    "weighted_mass",
]
