"""Closed forms against Monte Carlo, quadrature and finite-difference oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from xduplex import analytic
from xduplex.channel import BPSK, QPSK, Modulation, SystemParams, db_to_linear, sample_channels, symmetric_params, trial_stream
from xduplex.duplex import Mode, sinr_mode
from xduplex.errors import DomainError, PreconditionError, QuadratureError
from xduplex.specfun import q_function

X = 3.0  # threshold for a 2 bps/Hz target

# value of the FD floor for eta = 0.01, BPSK, from mpmath (30 digits)
FD_FLOOR_REF = 0.00246340608776512631
# int_0^inf sqrt(x) (e^-tx + t^2 x^2 e^(-5tx/3) / 2) e^(-x^2 - x) dx at t = 0.01, from mpmath
F_HELPER_REF = 0.318351567410415379


def mc_draw(p_t, n=1_000_000, seed=21):
    p = symmetric_params(p_t)
    return p, sample_channels(p, trial_stream(seed, 0), n)


def within(value, freq, n, k=3.0, slack=0.0):
    se = math.sqrt(freq * (1 - freq) / n)
    return abs(value - freq) <= k * se + slack


class TestTails:
    def test_fd_tail_at_zero(self):
        assert analytic.tail_fd(1, 1e-12, symmetric_params(100.0)) == pytest.approx(1.0, abs=1e-9)

    def test_fd_tail_large_x(self):
        assert analytic.tail_fd(1, 1e4, symmetric_params(100.0)) < 1e-50

    @pytest.mark.parametrize("x", [0.0, -1.0])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            analytic.tail_fd(1, x, symmetric_params(100.0))

    def test_bad_branch(self):
        with pytest.raises(ValueError):
            analytic.tail_fd(3, 1.0, symmetric_params(100.0))

    def test_fd_tail_regression(self):
        assert analytic.tail_fd(1, X, symmetric_params(100.0)) == pytest.approx(0.9011753125882831, rel=1e-12)

    def test_fd_tail_vs_mc(self):
        # At 20 dB the high-SNR form is off by about 6e-4 in absolute
        # terms (several MC standard errors at 1e6 draws).
        p, d = mc_draw(100.0)
        freq = np.mean(sinr_mode(Mode.FD_A, d, p) > X)
        assert within(analytic.tail_fd(1, X, p), freq, d.gamma.shape[1], slack=1e-3)

    def test_hd_tail_at_zero(self):
        assert analytic.tail_hd(1, 1e-12, symmetric_params(100.0)) == pytest.approx(1.0, abs=1e-9)

    def test_hd_tail_symmetric(self):
        p = symmetric_params(100.0)
        assert analytic.tail_hd(1, 2.0, p) == analytic.tail_hd(2, 2.0, p)

    def test_hd_tail_vs_mc(self):
        # x = 1 puts the HD threshold at 3; the tail is exact for AF
        p, d = mc_draw(100.0)
        freq = np.mean(sinr_mode(Mode.HD_A, d, p) > 3.0)
        assert within(analytic.tail_hd(1, 1.0, p), freq, d.gamma.shape[1])

    def test_joint_tail_vs_mc(self):
        p, d = mc_draw(1000.0)
        joint = (sinr_mode(Mode.FD_A, d, p) > X) & (sinr_mode(Mode.HD_A, d, p) > X * X + 2 * X)
        l1, l2 = analytic.joint_tail_l1_l2(1, X, p)
        assert within(l1 + l2, np.mean(joint), joint.size)

    def test_l1_vanishes_with_huge_rsi(self):
        # beta3 tends to C y here; L1 dies through 1 / (1 + eta x) and alpha
        values = []
        for lam_r in (1e4, 1e6, 1e8):
            p = SystemParams(100.0, 100.0, lambda_rsi=(lam_r, lam_r))
            values.append(analytic.joint_tail_l1_l2(1, X, p)[0] * lam_r)
        assert values[-1] < 1.0
        assert values == pytest.approx([values[-1]] * 3, rel=1e-3)

    def test_l1_vanishes_with_tiny_rsi(self):
        # here beta3 blows up instead
        p = SystemParams(100.0, 100.0, lambda_rsi=(1e-6, 1e-6))
        assert analytic.joint_tail_l1_l2(1, X, p)[0] < 1e-300

    def test_joint_tail_at_zero(self):
        # both SINRs are a.s. positive, so L1 + L2 -> 1; the second term of
        # L2 tends to exp(-1 / (eta lambda P_S)), not to one
        p = symmetric_params(100.0)
        l1, l2 = analytic.joint_tail_l1_l2(1, 1e-12, p)
        assert l1 + l2 == pytest.approx(1.0, abs=1e-9)
        assert l2 == pytest.approx(1.0 - math.exp(-1.0 / (0.01 * 100.0)), abs=1e-9)
        hi = symmetric_params(1e9)
        assert analytic.joint_tail_l1_l2(1, 1e-12, hi)[1] < 1e-6


class TestCdf:
    def test_zero_limit(self, params_30db):
        assert analytic.cdf_xd(1e-12, params_30db) < 1e-9

    def test_branch_symmetry(self, params_30db):
        for x in np.linspace(0.1, 10, 25):
            t1 = analytic.branch_terms(1, x, params_30db)
            t2 = analytic.branch_terms(2, x, params_30db)
            assert t1 == t2

    def test_inclusion_exclusion_identity(self):
        # 1 - i1 + i2 and 1 - tail_fd - tail_hd + L1 + L2 are the same algebra
        for p_t in (100.0, 1e3, 1e5):
            p = symmetric_params(p_t)
            for x in (0.1, 1.0, 3.0, 10.0):
                t = analytic.branch_terms(1, x, p)
                assert analytic.branch_cdf(1, x, p) == pytest.approx(1 - t.i1 + t.i2, rel=1e-9)

    def test_product_of_factors(self, params_30db):
        for x in np.linspace(0.5, 8, 16):
            factors = []
            for b in (1, 2):
                l1, l2 = analytic.joint_tail_l1_l2(b, x, params_30db)
                fd = analytic.tail_fd(b, x, params_30db)
                hd = analytic.tail_hd(b, x, params_30db)
                factors.append(1.0 - fd - hd + l1 + l2)
            assert analytic.cdf_xd(x, params_30db) == factors[0] * factors[1]

    def test_requires_identical_rsi(self):
        p = SystemParams(1000.0, 1000.0, lambda_rsi=(0.01, 0.02))
        with pytest.raises(PreconditionError):
            analytic.cdf_xd(X, p)
        with pytest.raises(PreconditionError):
            analytic.outage_xd(X, p)
        with pytest.raises(PreconditionError):
            analytic.ser_xd(p, BPSK)

    @pytest.mark.parametrize("db", [30, 40, 50])
    def test_monotone_in_x(self, db):
        p = symmetric_params(float(db_to_linear(db)))
        values = [analytic.cdf_xd(x, p) for x in np.linspace(0.1, 10, 200)]
        assert np.all(np.diff(values) >= 0)

    # Empirical CDF of the XD equivalent SINR at 30 dB from 1e8 trials
    # (seed 77), with standard errors; frozen as the reference.
    EMPIRICAL_30DB = {
        0.5: (3.8e-06, 1.95e-07),
        1.0: (1.686e-05, 4.11e-07),
        2.0: (9.871e-05, 9.93e-07),
        3.0: (3.0242e-04, 1.74e-06),
        5.0: (1.34395e-03, 3.66e-06),
    }

    @pytest.mark.parametrize("x", [1.0, 2.0, 3.0, 5.0])
    def test_matches_reference_empirical_cdf(self, params_30db, x):
        ref, _ = self.EMPIRICAL_30DB[x]
        assert analytic.cdf_xd(x, params_30db) == pytest.approx(ref, rel=0.10)

    @pytest.mark.xfail(strict=True, reason="the high-SNR CDF is about 18% low at x = 0.5, 30 dB")
    def test_matches_reference_empirical_cdf_low_threshold(self, params_30db):
        ref, _ = self.EMPIRICAL_30DB[0.5]
        assert analytic.cdf_xd(0.5, params_30db) == pytest.approx(ref, rel=0.10)

    def test_matches_live_empirical_cdf(self, params_30db):
        from xduplex.montecarlo import empirical_cdf

        xs = [3.0, 5.0]
        emp = empirical_cdf("xd", params_30db, xs, 1_000_000, seed=4)
        for x, f in zip(xs, emp):
            assert analytic.cdf_xd(x, params_30db) == pytest.approx(f, rel=0.10)


class TestOutage:
    def test_vanishes_at_high_power(self):
        assert analytic.outage_xd(X, symmetric_params(1e12)) < 1e-20

    def test_zero_limit(self, params_30db):
        assert analytic.outage_xd(1e-12, params_30db) < 1e-9

    @pytest.mark.xfail(
        strict=True,
        reason="the simplified outage sits 5-25% below the full CDF at 30-70 dB; "
        "dropping the K0 corrections is not a 1% approximation",
    )
    def test_within_one_percent_of_cdf(self):
        for db in (30, 40, 50):
            p = symmetric_params(float(db_to_linear(db)))
            for x in np.linspace(0.5, 5, 10):
                assert analytic.outage_xd(x, p) == pytest.approx(analytic.cdf_xd(x, p), rel=0.01)

    @pytest.mark.parametrize("db", [30, 40, 50, 60, 70])
    def test_bracketed_by_cdf(self, db):
        p = symmetric_params(float(db_to_linear(db)))
        for x in np.linspace(0.5, 5, 10):
            ratio = analytic.outage_xd(x, p) / analytic.cdf_xd(x, p)
            assert 0.75 <= ratio <= 1.0

    def test_threshold(self):
        assert analytic.outage_threshold(2.0) == 3.0
        assert analytic.high_snr_valid(100.0)
        assert not analytic.high_snr_valid(99.0)


class TestFHelper:
    def test_quadrature_oracle(self):
        assert analytic.f_helper(1.5, 1.0, 1.0, 0.01) == pytest.approx(F_HELPER_REF, abs=1e-8)

    @pytest.mark.parametrize("v,beta,gamma,t", [(1.5, 0.3, 2.0, 0.5), (2.5, 2.0, 0.1, 0.05), (2.5, 1e-3, 5.0, 1.0)])
    def test_integral_form(self, v, beta, gamma, t):
        def f(x):
            return x ** (v - 1) * (math.exp(-t * x) + 0.5 * t * t * x * x * math.exp(-5 * t * x / 3)) * math.exp(-beta * x * x - gamma * x)

        ref = integrate.quad(f, 0, np.inf, epsrel=1e-12, limit=200)[0]
        assert analytic.f_helper(v, beta, gamma, t) == pytest.approx(ref, rel=1e-9)

    def test_small_t_drops_second_term(self):
        v, beta, gamma = 1.5, 1.0, 1.0
        t = 1e-9
        first_only = (2 * beta) ** (-v / 2) * math.gamma(v) * math.exp((gamma + t) ** 2 / (8 * beta))
        from xduplex.specfun import parabolic_cylinder_d

        first_only *= parabolic_cylinder_d(-v, (gamma + t) / math.sqrt(2 * beta))
        assert analytic.f_helper(v, beta, gamma, t) == pytest.approx(first_only, rel=1e-15)

    @given(st.floats(0.0, 20.0), st.floats(0.01, 5.0))
    @settings(max_examples=50, deadline=None)
    def test_decreasing_in_gamma(self, gamma, t):
        assert analytic.f_helper(2.5, 1.0, gamma + 0.1, t) < analytic.f_helper(2.5, 1.0, gamma, t)

    def test_domain(self):
        with pytest.raises(DomainError):
            analytic.f_helper(1.5, 0.0, 1.0, 0.1)


class TestSer:
    def test_s1(self, params_30db):
        t = analytic.ser_terms(params_30db, QPSK)
        assert t.s1 == math.sqrt(math.pi / QPSK.a2)

    def test_closed_form_vs_quadrature(self, params_30db):
        closed = analytic.ser_xd(params_30db, BPSK)
        quad = analytic.ser_quadrature(lambda v: analytic.outage_xd(v, params_30db), BPSK)
        assert closed == pytest.approx(quad, rel=0.05)

    def test_distinct_branches(self):
        # eta1 != eta2 takes the direct path instead of the perturbation
        p = SystemParams(1000.0, 1000.0, (1.0, 1.05, 1.0, 1.0), (0.01, 0.01))
        assert not analytic.ser_terms(p, BPSK).degenerate
        quad = analytic.ser_quadrature(lambda v: analytic.outage_xd(v, p), BPSK)
        assert analytic.ser_xd(p, BPSK) == pytest.approx(quad, rel=0.01)

    def test_degenerate_limit_is_continuous(self, params_30db):
        assert analytic.ser_terms(params_30db, BPSK).degenerate
        near = SystemParams(1000.0, 1000.0, (1.0, 1.0001, 1.0, 1.0), (0.01, 0.01))
        assert not analytic.ser_terms(near, BPSK).degenerate
        assert analytic.ser_xd(near, BPSK) == pytest.approx(analytic.ser_xd(params_30db, BPSK), rel=1e-3)

    def test_linear_in_a1(self, params_30db):
        one = analytic.ser_xd(params_30db, BPSK)
        assert analytic.ser_xd(params_30db, Modulation(2.0, 1.0)) == pytest.approx(2 * one, rel=1e-14)

    def test_below_fd_mc(self, params_30db):
        from xduplex.montecarlo import estimate_ser

        fd = estimate_ser("fd-a", params_30db, BPSK, 100_000, seed=2)
        assert analytic.ser_xd(params_30db, BPSK) < fd.value

    def test_clamp_is_counted(self):
        # far beyond its accuracy range the closed form dips below zero
        analytic.reset_clamp_events()
        assert analytic.ser_xd(symmetric_params(1e6), BPSK) == 0.0
        assert analytic.clamp_events().get("ser_xd") == 1
        analytic.reset_clamp_events()
        assert analytic.clamp_events() == {}


class TestFloor:
    def test_reference_value(self):
        assert analytic.ser_fd_floor(0.01, BPSK) == pytest.approx(FD_FLOOR_REF, rel=1e-12)

    def test_monotone_in_eta(self):
        etas = np.geomspace(1e-4, 1.0, 30)
        values = [analytic.ser_fd_floor(e, BPSK) for e in etas]
        assert np.all(np.diff(values) > 0)

    def test_vanishes(self):
        assert analytic.ser_fd_floor(1e-9, BPSK) < 1e-8

    def test_equals_quadrature_of_limit_cdf(self):
        eta = 0.03
        quad = analytic.ser_quadrature(lambda v: eta * v / (1 + eta * v), QPSK)
        assert analytic.ser_fd_floor(eta, QPSK) == pytest.approx(quad, rel=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            analytic.ser_fd_floor(0.0, BPSK)


class TestQuadrature:
    @pytest.mark.parametrize("mod", [BPSK, QPSK, Modulation(0.7, 3.0)])
    def test_constant_one(self, mod):
        assert analytic.ser_quadrature(lambda v: 1.0, mod) == pytest.approx(mod.a1 / 2, rel=1e-10)

    def test_constant_zero(self):
        assert analytic.ser_quadrature(lambda v: 0.0, BPSK) == 0.0

    def test_exponential_cdf(self):
        # Rayleigh link with mean s: SER = (1 - sqrt(s / (1 + s))) / 2
        s = 7.0
        ref = 0.5 * (1 - math.sqrt(s / (1 + s)))
        assert analytic.ser_quadrature(lambda v: -math.expm1(-v / s), BPSK) == pytest.approx(ref, rel=1e-9)

    def test_empirical_cdf(self):
        p = symmetric_params(10.0)
        from xduplex.duplex import scheme_equivalent_sinr

        d = sample_channels(p, trial_stream(9, 0), 3000)
        g = np.sort(scheme_equivalent_sinr("xd", d, p))
        qs = q_function(np.sqrt(2 * g))
        mc, se = qs.mean(), qs.std(ddof=1) / math.sqrt(g.size)
        quad = analytic.ser_quadrature(lambda v: np.searchsorted(g, v) / g.size, BPSK, points=g)
        assert abs(quad - mc) <= 2 * se
        # the two are the same integral, so they agree far more tightly
        assert quad == pytest.approx(mc, rel=1e-6)

    def test_non_convergence(self):
        with pytest.raises(QuadratureError) as info:
            analytic.ser_quadrature(lambda v: 0.5 + 0.5 * math.sin(1e7 * v), BPSK)
        assert "interval" in info.value.diagnostics


class TestDiversity:
    def test_xd_limit(self):
        d = analytic.diversity_xd(1e6, X, symmetric_params(1.0))
        assert 1.95 <= d <= 2.0

    def test_xd_below_two(self):
        assert analytic.diversity_xd(10.0, X, symmetric_params(1.0)) < 2.0

    @pytest.mark.parametrize("p_t", np.geomspace(10, 1e5, 9))
    def test_xd_finite_difference(self, p_t):
        base = symmetric_params(1.0)
        h = 0.005  # half of the 0.01 step in ln p_t
        up = analytic.outage_xd(X, base.with_power(p_t * math.exp(h)))
        dn = analytic.outage_xd(X, base.with_power(p_t * math.exp(-h)))
        numeric = -(math.log(up) - math.log(dn)) / (2 * h)
        assert analytic.diversity_xd(p_t, X, base) == pytest.approx(numeric, abs=1e-3)

    def test_asymmetric_rejected(self):
        p = SystemParams(1.0, 1.0, lambdas=(1.0, 2.0, 1.0, 1.0))
        with pytest.raises(PreconditionError):
            analytic.diversity_xd(100.0, X, p)
        with pytest.raises(PreconditionError):
            analytic.diversity_baseline("hd-a", 100.0, X, p)

    @pytest.mark.parametrize("scheme,lo,hi", [("hd-a", 0.95, 1.0), ("hy", 0.95, 1.0), ("fd-a", 0.0, 0.05)])
    def test_baseline_limits(self, scheme, lo, hi):
        d = analytic.diversity_baseline(scheme, 1e6, X, symmetric_params(1.0))
        assert lo <= d <= hi

    @pytest.mark.parametrize("scheme,limit", [("hd-a", 1.0), ("fd-a", 0.0)])
    def test_exact_forms(self, scheme, limit):
        d = analytic.diversity_baseline(scheme, 1e8, X, symmetric_params(1.0), exact=True)
        assert d == pytest.approx(limit, abs=1e-3)

    def test_unsupported_scheme(self):
        with pytest.raises(ValueError):
            analytic.diversity_baseline("rams", 100.0, X, symmetric_params(1.0))
