import math

import numpy as np
import pytest
from hypothesis import example, given, settings, strategies as st
from scipy import integrate, stats

from idstein.approx_bounds import (SumScheme, chaos_delta, chaos_l1, chaos_rate_experiment,
                                   cpa_bounds, cpa_charfn, cpa_rate_experiment,
                                   cpa_root_gap_bound, delta_selfdecomp, delta_sizebias,
                                   delta_zerobias, distinguished_log, dw2_lower_estimate,
                                   fit_slope, gwlt_bound, kernel_K, kernel_K_k, kernel_K_nu,
                                   law_log_charfn, stable_kernel_K, stable_kernel_mass,
                                   summand_from_scipy)
from idstein.errors import DomainError, MissingKFunction
from idstein.levy_core import catalog


def gam(a=2.0, b=1.0):
    return catalog("gamma", alpha=a, beta=b)


class TestFitSlope:
    def test_exact_power_law(self):
        n = 2.0 ** np.arange(4, 10)
        out = fit_slope(n, 3.0 * n ** -0.5)
        assert out["slope"] == pytest.approx(-0.5)
        assert out["constant"] == pytest.approx(3.0)


class TestDeltas:
    def test_sizebias_mass_gap(self):
        rep = delta_sizebias(gam(2.0), gam(2.1))
        assert rep.total == pytest.approx(0.1, abs=1e-12)
        assert rep.params["dk_bound"] == pytest.approx(0.1 ** (1 / 3))

    def test_identical_laws(self):
        assert delta_sizebias(gam(), gam()).total == pytest.approx(0.0, abs=1e-14)
        assert delta_zerobias(gam(), gam()).total == pytest.approx(0.0, abs=1e-14)

    def test_zerobias_gamma_rate_change(self):
        # η = α/β², E X = α/β, Y ~ Exp(β): W1 = |1 - 1/1.2|
        rep = delta_zerobias(gam(2.0, 1.0), gam(2.0, 1.2))
        assert rep.terms["eta"] == pytest.approx(2 - 2 / 1.44, rel=1e-10)
        assert rep.terms["mean"] == pytest.approx(2 - 2 / 1.2, rel=1e-10)
        assert rep.terms["w1"] == pytest.approx(1 / 6, rel=1e-8)

    @pytest.mark.slow
    def test_zerobias_routes_agree(self):
        a = delta_zerobias(gam(2.0, 1.0), gam(2.0, 1.2), route="cdf")
        b = delta_zerobias(gam(2.0, 1.0), gam(2.0, 1.2), route="double")
        assert a.total == pytest.approx(b.total, abs=1e-7)

    def test_selfdecomp_gamma(self):
        rep = delta_selfdecomp(gam(2.0, 1.0), gam(2.0, 1.2))
        near, _ = integrate.quad(lambda u: u * 2 * (math.exp(-u) - math.exp(-1.2 * u)), 0, 1)
        assert rep.terms["far_plus"] == pytest.approx(2 * (math.exp(-1) - math.exp(-1.2) / 1.2), rel=1e-9)
        assert rep.terms["near_plus"] == pytest.approx(near, rel=1e-9)
        assert rep.terms["mean"] == pytest.approx(1 / 3, rel=1e-10)

    def test_selfdecomp_needs_k_function(self):
        with pytest.raises(MissingKFunction):
            delta_selfdecomp(catalog("poisson"), catalog("poisson"))


class TestChaos:
    def test_against_quadrature(self):
        a, b = np.array([0.5]), np.array([0.4, 0.3])
        f = lambda t: abs(np.sum(b ** 2 * np.exp(-t / (2 * b))) - np.sum(a ** 2 * np.exp(-t / (2 * a))))
        v, _ = integrate.quad(f, 0, np.inf, limit=500, epsabs=1e-14)
        assert chaos_delta(a, b) == pytest.approx(2 * v, rel=1e-9)

    @settings(max_examples=15, deadline=None)
    @example([-1.0, -1.0, -1.0, -0.5, -0.5], [1.0])
    @given(st.lists(st.floats(-1, 1).filter(lambda x: abs(x) > 1e-2), min_size=1, max_size=5),
           st.lists(st.floats(-1, 1).filter(lambda x: abs(x) > 1e-2), min_size=1, max_size=5))
    def test_metric_properties(self, a, b):
        a, b = np.array(a), np.array(b)
        assert chaos_delta(a, a) == 0.0
        assert chaos_delta(a, b) == pytest.approx(chaos_delta(b, a), rel=1e-9, abs=1e-12)
        assert chaos_delta(a, b) >= 0

    def test_l1_padding(self):
        assert chaos_l1([0.5], [0.5, 0.25]) == pytest.approx(0.25)

    def test_experiment_shape(self):
        out = chaos_rate_experiment(range(1, 5), K=30)
        assert out["delta"].shape == (4,) and out["ratio"].shape == (3,)
        assert np.all(np.diff(out["delta"]) < 0)


class TestCPA:
    def test_n_one_is_base(self):
        law = gam()
        t = np.linspace(-5, 5, 11)
        np.testing.assert_allclose(cpa_charfn(law, 1, t), law.charfn(t), atol=1e-14)

    def test_unwrapped_log_matches_closed_form(self):
        law = gam(3.0, 1.0)
        t = np.linspace(0, 30, 61)
        np.testing.assert_allclose(distinguished_log(law.charfn, t), law_log_charfn(law)(t), atol=1e-10)

    def test_converges(self):
        law = catalog("sas", alpha=1.5)
        t = np.linspace(-4, 4, 81)
        e128 = np.max(np.abs(cpa_charfn(law, 128, t) - law.charfn(t)))
        e1024 = np.max(np.abs(cpa_charfn(law, 1024, t) - law.charfn(t)))
        assert e1024 < e128

    @settings(max_examples=20, deadline=None)
    @given(n=st.integers(1, 500), t=st.floats(-10, 10))
    def test_root_gap_bound(self, n, t):
        law = gam()
        L = law_log_charfn(law)(np.array([t]))[0]
        gap = abs(np.exp(L / n) - 1 - L / n)
        assert gap <= cpa_root_gap_bound(law, n, t) ** 2 + 1e-15 or \
            abs(np.exp(L / n) - 1) <= cpa_root_gap_bound(law, n, t) + 1e-15

    def test_bound_exponents(self):
        law = gam()
        assert cpa_bounds(law, 64, "L1").params["exponent"] == pytest.approx(1 / 3)
        sas = catalog("sas", alpha=1.5)
        assert cpa_bounds(sas, 64, "sas").params["exponent"] == pytest.approx(2 / 3)
        assert cpa_bounds(sas, 64, "stable").params["exponent"] == pytest.approx(1 / 2.5)

    def test_lattice_rejected(self):
        with pytest.raises(DomainError):
            cpa_rate_experiment(catalog("poisson"), [16, 32])


class TestKernels:
    @pytest.mark.parametrize("N", [1.0, 8.0])
    def test_fubini_stable(self, N):
        nu = catalog("stable", alpha=1.5, c1=1.0, c2=1.0).nu
        mass = sum(integrate.quad(lambda t: kernel_K(nu, t, N), a, b, limit=200)[0]
                   for a, b in [(-N, 0), (0, N)])
        assert mass == pytest.approx(stable_kernel_mass(N, 1.5, 1.0, 1.0), rel=1e-8)
        assert stable_kernel_mass(N, 1.5, 1.0, 1.0) == pytest.approx(nu.integrate(lambda u: u * u, -N, N), rel=1e-8)

    @pytest.mark.parametrize("N", [1.0, 8.0])
    def test_fubini_gamma(self, N):
        nu = gam().nu
        mass = integrate.quad(lambda t: kernel_K(nu, t, N), 0, N, limit=200)[0]
        assert mass == pytest.approx(nu.integrate(lambda u: u * u, 0, N), rel=1e-8)

    def test_stable_closed_form(self):
        nu = catalog("stable", alpha=1.5, c1=2.0, c2=0.5).nu
        t = np.array([-3.0, -0.5, 0.2, 1.0, 4.0])
        np.testing.assert_allclose(stable_kernel_K(t, 5.0, 1.5, 2.0, 0.5), kernel_K_nu(nu, t, 5.0), rtol=1e-9)

    def test_kernel_vanishes_outside(self):
        assert kernel_K(gam().nu, 9.0, 8.0) == 0.0

    def test_summand_kernel_exponential(self):
        # E[bZ 1{t ≤ bZ ≤ N}] for Z ~ Exp(1)
        law = summand_from_scipy(stats.expon())
        b, t, N = 0.5, 0.3, 2.0
        v, _ = integrate.quad(lambda z: b * z * math.exp(-z), t / b, N / b)
        assert kernel_K_k(law, b, t, N) == pytest.approx(v, rel=1e-10)


class TestGWLT:
    def scheme(self, n=64):
        return SumScheme(summand_from_scipy(stats.expon(), "expon"), 2.0 / n, 0.0, n)

    def test_scheme_validation(self):
        with pytest.raises(DomainError):
            SumScheme(None, 0.0, 0.0, 3)
        with pytest.raises(DomainError):
            SumScheme(None, 1.0, 0.0, 0)

    def test_null_array(self):
        assert self.scheme(64).null_array(0.5) < self.scheme(16).null_array(0.5)

    def test_peaked_summand_sampled_exactly(self):
        dist = stats.gamma(2.0 / 64)
        s = summand_from_scipy(dist).sampler(np.random.default_rng(0), 50_000)
        assert stats.kstest(s, dist.cdf).pvalue > 1e-3

    def test_exact_row_has_small_lower_estimate(self):
        sch = SumScheme(summand_from_scipy(stats.gamma(2.0 / 64)), 1.0, 0.0, 64)
        low = dw2_lower_estimate(sch, gam(), 50_000, 0)
        assert low["value"] < 5 * low["stderr"] + 1e-3

    def test_sample_mean(self):
        s = self.scheme().sample(np.random.default_rng(0), 20_000)
        assert s.mean() == pytest.approx(2.0, abs=0.05)

    @pytest.mark.slow
    def test_identity_case_kernel_vanishes(self):
        # gamma(2/n) increments sum exactly to gamma(2): the kernel term is O(1/n)
        target = gam()
        vals = []
        for n in (16, 64):
            sch = SumScheme(summand_from_scipy(stats.gamma(2.0 / n), "g"), 1.0, 0.0, n)
            vals.append(gwlt_bound(sch, target, 8.0).terms["kernel"])
        assert vals[1] < vals[0] / 3

    @pytest.mark.slow
    def test_bound_dominates_lower_estimate(self):
        sch = self.scheme()
        rep = gwlt_bound(sch, gam(), 8.0)
        low = dw2_lower_estimate(sch, gam(), 20_000, 1)
        assert np.isfinite(rep.total) and rep.total > low["value"] > 0
