import math

import numpy as np
import pytest
from scipy import integrate

from leibenson.errors import DomainError
from leibenson.exponents import (
    Exponents,
    Interval,
    admissible_l_range,
    caccioppoli_constant,
    derive,
    extinction_time_bound,
    theta_max_cases,
    theta_of,
)

REL = 1e-12


def rel_eq(a, b, tol=REL):
    if math.isinf(a) or math.isinf(b):
        return math.isinf(a) and math.isinf(b)
    return abs(a - b) <= tol * max(abs(a), abs(b), 1.0)


class TestWorkedExample:
    # (n, p, q, zeta, sigma) = (3, 2, 0.5, 1.5, 2): every derived scalar is an
    # exact rational, evaluated here independently of the library formulas.
    E = Exponents(3, 2, 0.5, 1.5, 2.0)

    def test_all_constants(self):
        d = derive(self.E, l=1.5)
        assert rel_eq(d.diffusion_gap, 0.5)
        assert rel_eq(d.kappa, 3.0)
        assert rel_eq(d.sigma_min, 2.0)
        assert rel_eq(d.theta, 12.0 / 7.0)
        assert rel_eq(d.theta_max, 12.0 / 7.0)
        assert rel_eq(d.theta_opt, 2.0)
        assert d.theta_opt_conjectural
        assert rel_eq(d.l_star, 1.0)
        assert rel_eq(d.kappa_l, 0.25)
        assert rel_eq(d.c_caccioppoli, 15.0 / 32.0)

    def test_c1_hand_product(self):
        # (sigma+gap)(sigma+gap-1) 2^-p q^(p-1) sigma^-p p^p, evaluated digit by digit
        expected = 2.5 * 1.5 * 0.25 * 0.5 * 0.25 * 4.0
        assert rel_eq(caccioppoli_constant(2.0, 0.5, 2.0), expected)
        assert expected == 15.0 / 32.0

    def test_kappa_l_requires_l(self):
        assert derive(self.E).kappa_l is None


class TestValidation:
    def test_degenerate_gap_rejected(self):
        with pytest.raises(DomainError):
            Exponents(3, 2, 1.0)  # q(p-1) = 1

    def test_dimension_not_above_p(self):
        with pytest.raises(DomainError):
            derive(Exponents(2, 2, 0.5))

    def test_sigma_below_minimum(self):
        with pytest.raises(DomainError):
            derive(Exponents(3, 2, 0.5, 1.5, 1.0))

    @pytest.mark.parametrize("kwargs", [
        dict(n=1, p=2, q=0.5),
        dict(n=3, p=1.0, q=0.5),
        dict(n=3, p=2, q=-0.1),
        dict(n=3, p=2, q=0.5, zeta=1.0),
    ])
    def test_bad_primitive_inputs(self, kwargs):
        with pytest.raises(DomainError):
            Exponents(**kwargs)


class TestThetaStructure:
    def test_strictly_decreasing_with_limit(self):
        e = Exponents(3, 2, 0.5, 1.5)
        d = derive(e)
        sigmas = np.linspace(d.sigma_min, d.sigma_min + 200.0, 400)
        thetas = [theta_of(d.kappa, d.diffusion_gap, s) for s in sigmas]
        assert rel_eq(thetas[0], d.theta_max)
        assert all(a > b for a, b in zip(thetas, thetas[1:]))
        floor = d.kappa / (d.kappa - 1.0)
        assert all(t > floor for t in thetas)
        assert theta_of(d.kappa, d.diffusion_gap, 1e9) - floor < 1e-8

    def test_infinite_endpoint_detection(self):
        # sigma_min = gap/(kappa-1) exactly: n=7, p=2, q=0.16, zeta=2
        e = Exponents(7, 2, 0.16, 2.0)
        d = derive(e)
        assert rel_eq(d.sigma_min, d.diffusion_gap / (d.kappa - 1.0))
        assert math.isinf(d.theta_max)
        label, tm = theta_max_cases(e)
        assert label == "else" and math.isinf(tm)

    def test_theta_opt_infinite_branch(self):
        # kappa < 1/(1-gap): same tuple has kappa = 1.4 < 1/0.16 = 6.25
        d = derive(Exponents(7, 2, 0.16, 2.0))
        assert math.isinf(d.theta_opt) and d.theta_opt_conjectural


def _random_valid_exponents(rng):
    n = int(rng.integers(3, 11))
    p = float(rng.uniform(1.1, min(n - 0.3, 4.0)))
    q = float(rng.uniform(0.05, 0.95)) / (p - 1.0)
    zeta = float(rng.uniform(1.05, 4.0))
    return Exponents(n, p, q, zeta)


class TestSweeps:
    def test_cases_agree_with_derive_10k(self):
        rng = np.random.default_rng(2024)
        for _ in range(10_000):
            e = _random_valid_exponents(rng)
            _, tm = theta_max_cases(e)
            assert rel_eq(tm, derive(e).theta_max, 1e-11)

    def test_conformal_window_nonempty(self):
        rng = np.random.default_rng(7)
        for _ in range(10_000):
            e = _random_valid_exponents(rng)
            assert not admissible_l_range(e, "prop-4.6").is_empty

    def test_infinite_theta_max_iff_denominator(self):
        rng = np.random.default_rng(99)
        for _ in range(2000):
            e = _random_valid_exponents(rng)
            d = derive(e)
            denom = d.kappa - 1.0 - d.diffusion_gap / d.sigma_min
            assert math.isinf(d.theta_max) == (denom <= 1e-12 * (d.kappa - 1.0))
            assert d.c_caccioppoli > 0


class TestAdmissibleRanges:
    E = Exponents(3, 2, 0.5, 1.5)

    def test_worked_windows(self):
        w = admissible_l_range(self.E, "prop-4.6")
        assert rel_eq(w.lo, 1.75) and rel_eq(w.hi, 2.0) and w.lo_open and w.hi_open
        ch = admissible_l_range(self.E, "cartan-hadamard", alpha=3.0)
        assert rel_eq(ch.lo, 1.75) and ch.unbounded_above
        ex = admissible_l_range(self.E, "exact-rn")
        assert rel_eq(ex.lo, 1.0) and rel_eq(ex.hi, 2.0)
        opt = admissible_l_range(self.E, "rn-optimal")
        assert rel_eq(opt.lo, 1.0) and opt.unbounded_above
        ric = admissible_l_range(self.E, "ricci", alpha=3.0)
        # alpha - kappa (theta_max - 1)(alpha - p)/theta_max = 3 - 3*(5/7)/(12/7)
        assert rel_eq(ric.lo, 1.75)

    def test_exact_rn_clips_at_zero(self):
        # n=5, p=2, q=0.5: l_star = -1 < 0, window becomes [0, 2)
        w = admissible_l_range(Exponents(5, 2, 0.5), "exact-rn")
        assert w.lo == 0.0 and not w.lo_open and rel_eq(w.hi, 2.0)

    def test_infinite_theta_max_branches(self):
        e = Exponents(7, 2, 0.16, 2.0)
        ch = admissible_l_range(e, "cartan-hadamard", alpha=7.0)
        assert ch.lo == 0.0 and not ch.lo_open and ch.unbounded_above
        ric = admissible_l_range(e, "ricci", alpha=7.0)
        kappa = 7.0 / 5.0
        assert rel_eq(ric.lo, kappa * 2.0 - 7.0 * (kappa - 1.0), 1e-9)
        w = admissible_l_range(e, "prop-4.6")
        assert w.lo == 0.0 and not w.lo_open and rel_eq(w.hi, 2.0)

    def test_regime_validation(self):
        with pytest.raises(DomainError):
            admissible_l_range(self.E, "cartan-hadamard")
        with pytest.raises(DomainError):
            admissible_l_range(self.E, "ricci", alpha=2.0)
        with pytest.raises(DomainError):
            admissible_l_range(self.E, "no-such-regime")

    def test_interval_membership(self):
        w = Interval(1.0, 2.0, lo_open=True, hi_open=True)
        assert not w.contains(1.0) and w.contains(1.5) and not w.contains(2.0)
        empty = Interval(2.0, 1.0)
        assert empty.is_empty and not empty.contains(1.5)
        half = Interval(0.0, math.inf, lo_open=False)
        assert half.contains(0.0) and half.unbounded_above


class TestExtinctionTimeBound:
    def test_worked_value(self):
        T = extinction_time_bound(1.0, 15.0 / 32.0, 1.0, 2.0, 0.5)
        assert rel_eq(T, 32.0 / 3.0)

    def test_zero_energy(self):
        assert extinction_time_bound(0.0, 0.5, 1.0, 2.0, 0.5) == 0.0

    def test_constant_doubling_scaling(self):
        sigma, gap = 2.0, 0.5
        T1 = extinction_time_bound(1.3, 0.4, 1.0, sigma, gap)
        T2 = extinction_time_bound(1.3, 0.4, 2.0, sigma, gap)
        assert rel_eq(T2 / T1, 2.0 ** (sigma / (sigma + gap)))

    def test_against_quadrature_of_the_decay_ode(self):
        # time to reach zero for dy/dt = -c y^s is the integral of y^-s / c
        rng = np.random.default_rng(5)
        for _ in range(20):
            phi0 = float(rng.uniform(0.1, 5.0))
            c1 = float(rng.uniform(0.1, 2.0))
            C = float(rng.uniform(0.5, 3.0))
            sigma = float(rng.uniform(2.0, 6.0))
            gap = float(rng.uniform(0.1, 0.9))
            s = sigma / (sigma + gap)
            c = c1 * C ** (-sigma / (sigma + gap))
            T_oracle = integrate.quad(lambda y: y**-s, 0.0, phi0)[0] / c
            T = extinction_time_bound(phi0, c1, C, sigma, gap)
            assert rel_eq(T, T_oracle, 1e-6)

    def test_against_ode_integration_to_first_zero(self):
        # integrate the decay ODE down to a small floor, then cover the
        # remaining stretch with the (independent) quadrature of y^-s
        sigma, gap, c1, C, phi0 = 2.0, 0.5, 15.0 / 32.0, 1.0, 1.0
        s = sigma / (sigma + gap)
        c = c1 * C ** (-sigma / (sigma + gap))
        delta = 1e-6 * phi0

        def reach_floor(t, y):
            return y[0] - delta
        reach_floor.terminal = True

        sol = integrate.solve_ivp(lambda t, y: [-c * max(y[0], 0.0) ** s],
                                  (0.0, 100.0), [phi0], rtol=1e-11, atol=1e-14,
                                  events=reach_floor)
        tail = integrate.quad(lambda y: y**-s, 0.0, delta)[0] / c
        T_ref = sol.t_events[0][0] + tail
        T = extinction_time_bound(phi0, c1, C, sigma, gap)
        assert rel_eq(T, T_ref, 1e-6)

    @pytest.mark.parametrize("kwargs", [
        dict(phi0=-1.0, c1=0.5, C_sobolev=1.0, sigma=2.0, gap=0.5),
        dict(phi0=1.0, c1=0.0, C_sobolev=1.0, sigma=2.0, gap=0.5),
        dict(phi0=1.0, c1=0.5, C_sobolev=-1.0, sigma=2.0, gap=0.5),
        dict(phi0=1.0, c1=0.5, C_sobolev=1.0, sigma=2.0, gap=1.5),
    ])
    def test_domain_errors(self, kwargs):
        gap = kwargs.pop("gap")
        with pytest.raises(DomainError):
            extinction_time_bound(kwargs.pop("phi0"), kwargs.pop("c1"),
                                  kwargs.pop("C_sobolev"), kwargs.pop("sigma"), gap)
