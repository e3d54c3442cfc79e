"""Config-driven command line front end.

Commands:

  params         derived exponent constants and the admissible density window
  simulate       evolve an initial field to extinction, write a CSV trace
  verify-exact   residual convergence table for the closed-form radial solution
  finiteness     integrability verdict for the density-to-weight ratio
  sobolev-probe  lower bound for the weighted Sobolev constant

Configuration is a plain-text file of `key = value` lines (text after `#` is
a comment), overridable with repeated `--set key=value` flags.  Exit codes:
0 success / positive verdict, 1 input or quadrature error, 2 negative
verdict, 3 horizon reached without extinction.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import diagnostics, solver
from .barenblatt import BarenblattProfile
from .errors import DegenerateError, DomainError, QuadratureError, RangeError
from .exponents import (
    Exponents,
    admissible_l_range,
    derive,
    extinction_time_bound,
    theta_max_cases,
)
from .geometry import (
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
)

__all__ = ["main", "RunConfig", "ConfigError"]

CSV_HEADER = ["t", "sup_u", "Phi", "grad_term", "mass", "outflow", "clamped"]

FAMILIES = ("euclidean", "conformal", "ch_polynomial", "ricci_polynomial")
RHO_KINDS = ("power", "capped-power", "one")


class ConfigError(ValueError):
    pass


def _parse_float(v: str) -> float:
    if v.lower() in ("inf", "infinity"):
        return math.inf
    return float(v)


def _parse_int(v: str) -> int:
    return int(v)


def _parse_str(v: str) -> str:
    return v


# key -> (parser, default); None defaults mean "unset"
KNOWN_KEYS = {
    "family": (_parse_str, "euclidean"),
    "n": (_parse_int, 3),
    "p": (_parse_float, 2.0),
    "q": (_parse_float, 0.5),
    "zeta": (_parse_float, 2.0),
    "sigma": (_parse_float, None),
    "l": (_parse_float, None),
    "c": (_parse_float, 1.0),
    "alpha": (_parse_float, None),
    "R0": (_parse_float, 1.0),
    "R_max": (_parse_float, 20.0),
    "cells": (_parse_int, 256),
    "cfl": (_parse_float, 0.4),
    "t_max": (_parse_float, 1.2),
    "ext_tol": (_parse_float, 1e-10),
    "floor_eps": (_parse_float, 1e-12),
    "outer_bc": (_parse_str, "dirichlet_zero"),
    "out_path": (_parse_str, "trace.csv"),
    "record_every": (_parse_float, None),
    "regime": (_parse_str, "exact-rn"),
    "theta": (_parse_float, None),
    "R_probe": (_parse_float, 1000.0),
    "C": (_parse_float, 1.0),
    "T": (_parse_float, 1.0),
    "stepper": (_parse_str, "explicit"),
    "sobolev_constant": (_parse_float, None),
    "rho": (_parse_str, None),
    "rho_cap_radius": (_parse_float, 1.0),
    "u0": (_parse_str, "barenblatt"),
    "probe_cells": (_parse_int, 1024),
}


@dataclass
class RunConfig:
    """Validated key-value settings for one command invocation."""

    values: dict

    def __getattr__(self, key):
        try:
            return self.values[key]
        except KeyError:
            raise AttributeError(key) from None

    def require(self, key: str):
        v = self.values.get(key)
        if v is None:
            raise ConfigError(f"config key {key!r} is required for this command")
        return v


def parse_config(text: str, overrides: list[str] = ()) -> RunConfig:
    """Parse `key = value` lines plus `--set` overrides into a RunConfig."""
    values = {k: default for k, (_, default) in KNOWN_KEYS.items()}

    def apply(key: str, raw: str, where: str) -> None:
        key = key.strip()
        raw = raw.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown config key {key!r} ({where})")
        parser, _ = KNOWN_KEYS[key]
        try:
            values[key] = parser(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {raw!r} ({where})") from exc

    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = line.split("=", 1)
        apply(key, raw, f"line {lineno}")
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        apply(key, raw, "--set")
    return RunConfig(values)


def dump_config(cfg: RunConfig) -> str:
    lines = []
    for key in sorted(KNOWN_KEYS):
        v = cfg.values[key]
        if v is None:
            continue
        lines.append(f"{key} = {v}" if isinstance(v, str) else f"{key} = {v!r}")
    return "\n".join(lines) + "\n"


def _exponents(cfg: RunConfig) -> Exponents:
    return Exponents(cfg.n, cfg.p, cfg.q, cfg.zeta, cfg.sigma)


def _build_model(cfg: RunConfig) -> WeightedModel:
    fam = cfg.family
    if fam == "euclidean":
        return build_euclidean(cfg.n, cfg.p)
    if fam == "conformal":
        return build_conformal(cfg.n, cfg.p, cfg.require("l"), cfg.c, cfg.R0)
    if fam == "ch_polynomial":
        return build_ch_polynomial(cfg.n, cfg.p, cfg.require("alpha"))
    if fam == "ricci_polynomial":
        return build_ricci_polynomial(cfg.n, cfg.p, cfg.require("alpha"))
    raise ConfigError(f"family must be one of {FAMILIES}, got {fam!r}")


def _build_density(cfg: RunConfig, default_kind: str):
    kind = cfg.rho if cfg.rho is not None else default_kind
    if kind == "one":
        return constant_density(1.0)
    l = cfg.require("l")
    if kind == "power":
        return power_density(l)
    if kind == "capped-power":
        return capped_power_density(l, cfg.rho_cap_radius)
    raise ConfigError(f"rho must be one of {RHO_KINDS}, got {kind!r}")


def _fmt(x: float) -> str:
    if x is None:
        return "n/a"
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return f"{x:.6g}"


def cmd_params(cfg: RunConfig) -> int:
    e = _exponents(cfg)
    l = cfg.values.get("l")
    d = derive(e, l)
    label, tmax_case = theta_max_cases(e)
    print("derived constants")
    print(f"  diffusion gap        = {_fmt(d.diffusion_gap)}")
    print(f"  kappa                = {_fmt(d.kappa)}")
    print(f"  sigma (used)         = {_fmt(d.sigma)}")
    print(f"  sigma_min            = {_fmt(d.sigma_min)}")
    print(f"  theta                = {_fmt(d.theta)}")
    print(f"  theta_max            = {_fmt(d.theta_max)}  [{label}]")
    print(f"  theta_opt            = {_fmt(d.theta_opt)}  (conjectural)")
    print(f"  l_star               = {_fmt(d.l_star)}")
    print(f"  kappa_l              = {_fmt(d.kappa_l)}")
    print(f"  caccioppoli constant = {_fmt(d.c_caccioppoli)}")
    interval = admissible_l_range(e, cfg.regime, cfg.values.get("alpha"))
    print(f"admissible l window [{cfg.regime}]: {interval}"
          + ("  (empty)" if interval.is_empty else ""))
    if l is not None:
        ok = interval.contains(l)
        print(f"l = {_fmt(l)}: {'admissible' if ok else 'not admissible'}")
        return 0 if ok else 2
    return 0


def _write_trace(path: str, trace: diagnostics.EnergyTrace) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for i in range(len(trace)):
            writer.writerow([
                f"{v:.17g}" for v in (
                    trace.times[i], trace.sup_u[i], trace.Phi[i],
                    trace.grad_term[i], trace.mass[i], trace.outflow[i],
                    trace.clamped[i],
                )
            ])


def cmd_simulate(cfg: RunConfig) -> int:
    model = _build_model(cfg).with_density(_build_density(cfg, "power"))
    grid = RadialGrid.build(model, cfg.R_max, cfg.cells)
    scfg = solver.SolverConfig(
        model=model, grid=grid, p=cfg.p, q=cfg.q, t_max=cfg.t_max, cfl=cfg.cfl,
        ext_tol=cfg.ext_tol, floor_eps=cfg.floor_eps, outer_bc=cfg.outer_bc,
    )
    if cfg.u0 == "barenblatt":
        prof = BarenblattProfile(cfg.n, cfg.p, cfg.q, cfg.require("l"), cfg.C, cfg.T)
        u0 = prof.eval(grid.r_centers, 0.0)
    elif cfg.u0 == "zero":
        u0 = np.zeros(grid.cells)
    else:
        raise ConfigError(f"u0 must be 'barenblatt' or 'zero', got {cfg.u0!r}")
    if cfg.stepper not in ("explicit", "implicit"):
        raise ConfigError(f"stepper must be 'explicit' or 'implicit', got {cfg.stepper!r}")

    res = solver.run(scfg, u0, sigma=cfg.sigma, record_interval=cfg.record_every,
                     method=cfg.stepper)
    _write_trace(cfg.out_path, res.trace)
    trace = res.trace

    print(f"trace: {len(trace)} records -> {cfg.out_path}")
    print(f"steps = {res.steps} ({res.method}); sup_u final = {_fmt(trace.sup_u[-1])}")
    print(f"outflow = {_fmt(res.outflow)}; clamped mass = {_fmt(res.clamped_mass)} "
          f"({res.clamp_events} events)")
    if res.extinction_time is not None:
        print(f"extinction_time = {_fmt(res.extinction_time)}")
    else:
        print(f"extinction_time = none (t_max = {_fmt(cfg.t_max)} reached)")

    if len(trace) >= 3:
        try:
            comp = diagnostics.ode_comparison(trace)
            print(f"fitted decay rate c* = {_fmt(comp.c)}; "
                  f"comparison Phi <= Psi: {'holds' if comp.passed else 'fails'}")
        except (DegenerateError, RangeError) as exc:
            print(f"fitted decay rate: unavailable ({exc})")
        d = derive(_exponents(cfg), cfg.values.get("l"))
        c1 = d.c_caccioppoli
        t_lo, t_hi = trace.times[0], trace.times[-1]
        span = t_hi - t_lo
        pairs = [(t_lo + 0.1 * span, t_lo + 0.5 * span),
                 (t_lo + 0.25 * span, t_lo + 0.75 * span),
                 (t_lo + 0.5 * span, t_lo + 0.9 * span)]
        for t1, t2 in pairs:
            chk = diagnostics.caccioppoli_check(trace, c1, t1, t2)
            print(f"energy inequality on [{_fmt(t1)}, {_fmt(t2)}]: margin = "
                  f"{chk.margin:.3e} ({'pass' if chk.passed else 'FAIL'})")
        if cfg.sobolev_constant is not None:
            T_pred = extinction_time_bound(
                float(trace.Phi[0]), c1, cfg.sobolev_constant, d.sigma, d.diffusion_gap)
            print(f"extinction-time bound (lower-bound prediction from the "
                  f"supplied probe constant) = {_fmt(T_pred)}")
    return 0 if res.extinction_time is not None else 3


def cmd_verify_exact(cfg: RunConfig) -> int:
    prof = BarenblattProfile(cfg.n, cfg.p, cfg.q, cfg.require("l"), cfg.C, cfg.T)
    h_list = (1e-2, 5e-3, 2.5e-3)
    r_lattice = np.linspace(0.2, 5.0, 20)
    t_lattice = np.linspace(0.05, 0.9, 10)
    h_max = max(h_list)
    passed = failed = zero_region = skipped = 0
    worst = math.inf
    for t in t_lattice:
        for r in r_lattice:
            if t - h_max >= prof.T:
                zero_region += 1
                continue
            if t + h_max > prof.T:
                skipped += 1
                continue
            res = [abs(prof.pde_residual(float(r), float(t), h, h)) for h in h_list]
            if max(res) < 1e-13:
                passed += 1
                continue
            if min(res) == 0.0:
                passed += 1
                continue
            order = float(np.polyfit(np.log(h_list), np.log(res), 1)[0])
            worst = min(worst, order)
            if order >= 1.0:
                passed += 1
            else:
                failed += 1
    total = passed + failed
    print(f"residual convergence on {total} lattice points "
          f"(h = {', '.join(_fmt(h) for h in h_list)})")
    if zero_region:
        print(f"  {zero_region} points lie in the identically-zero region (t >= T)")
    if skipped:
        print(f"  {skipped} points straddle the extinction time and were skipped")
    rate = passed / total if total else 1.0
    print(f"  order >= 1 at {passed}/{total} points ({100 * rate:.1f}%); "
          f"worst observed order = {_fmt(worst if math.isfinite(worst) else None)}")
    return 0 if rate >= 0.95 else 2


def cmd_finiteness(cfg: RunConfig) -> int:
    model = _build_model(cfg).with_density(_build_density(cfg, "capped-power"))
    theta = cfg.theta
    if theta is None:
        theta = derive(_exponents(cfg)).theta_max
    result = finiteness_norm(model, theta, cfg.R_probe)
    print(f"theta = {_fmt(theta)}; R_probe = {_fmt(cfg.R_probe)}")
    if math.isinf(theta):
        print(f"sup(rho/omega) on (0, R_probe] = {_fmt(result.value)}")
        print(f"asymptotic exponent of rho/omega = {_fmt(result.tail_exponent)}")
    else:
        print(f"quadrature value = {_fmt(result.value)}")
        print(f"tail exponent = {_fmt(result.tail_exponent)} "
              f"(finite iff < -1)")
    print(f"verdict: {'finite' if result.finite else 'infinite'}")
    return 0 if result.finite else 2


def cmd_sobolev_probe(cfg: RunConfig) -> int:
    model = _build_model(cfg)
    probe = diagnostics.sobolev_probe(model, cfg.p, model.kappa, cells=cfg.probe_cells)
    print(f"lower bound for the Sobolev constant: C >= {_fmt(probe.C_lower)}")
    print(f"maximizing profile: R = {_fmt(probe.best.R)}, k = {_fmt(probe.best.k)}")
    print(f"family size = {len(probe.ratios)}")
    return 0


COMMANDS = {
    "params": cmd_params,
    "simulate": cmd_simulate,
    "verify-exact": cmd_verify_exact,
    "finiteness": cmd_finiteness,
    "sobolev-probe": cmd_sobolev_probe,
}


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="leibenson",
        description="Weighted doubly nonlinear diffusion: simulation and "
                    "finite-extinction diagnostics.",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="path to a key = value config file")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key (repeatable)")
        sp.add_argument("--dump-config", action="store_true",
                        help="print the effective configuration and exit")
    args = ap.parse_args(argv)

    try:
        text = ""
        if args.config:
            with open(args.config) as fh:
                text = fh.read()
        cfg = parse_config(text, args.set)
        if args.dump_config:
            sys.stdout.write(dump_config(cfg))
            return 0
        return COMMANDS[args.command](cfg)
    except (ConfigError, DomainError, QuadratureError, RangeError,
            DegenerateError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
