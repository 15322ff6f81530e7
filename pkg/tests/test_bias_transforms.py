import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from idstein.bias_transforms import (BiasLaw, equilibrium_residual, mixed_residual,
                                     mixed_transform, size_bias_pair, size_bias_residual,
                                     zero_bias, zero_bias_residual)
from idstein.errors import AssumptionViolated
from idstein.levy_core import catalog, sas_unit_c
from idstein.stein_ops import dictionary

D = dictionary()


class TestSizeBias:
    def test_gamma_pair_is_exponential(self):
        pair = size_bias_pair(catalog("gamma", alpha=2.0, beta=1.0))
        assert pair["m0_plus"] == pytest.approx(2.0, rel=1e-12)
        assert pair["Yminus"] is None
        x = np.linspace(0.01, 10, 9)
        np.testing.assert_allclose(pair["Yplus"].cdf(x), 1 - np.exp(-x), atol=1e-8)

    def test_poisson_pair_is_unit_atom(self):
        pair = size_bias_pair(catalog("poisson", lam=1.5))
        assert pair["m0_plus"] == pytest.approx(1.5)
        assert pair["Yplus"].atoms == ((1.0, pytest.approx(1.0)),)

    def test_m0_difference_is_mean(self):
        for name in ("gamma", "texp", "cp", "nbin0", "laplace"):
            law = catalog(name)
            pair = size_bias_pair(law)
            assert pair["m0_plus"] - pair["m0_minus"] == pytest.approx(law.mean, abs=1e-9)

    def test_stable_rejected(self):
        with pytest.raises(AssumptionViolated):
            size_bias_pair(catalog("sas"))

    def test_sampler_matches_cdf(self):
        y = size_bias_pair(catalog("texp", alpha=1.0, beta=2.0))["Yplus"]
        s = y.sampler(np.random.default_rng(1), 100_000)
        assert stats.kstest(s, y.cdf).pvalue > 1e-3

    @pytest.mark.parametrize("name", ["gamma", "poisson", "nbin0"])
    def test_residual(self, name):
        law = catalog(name)
        pair = size_bias_pair(law)
        for f in D[::4]:
            r = size_bias_residual(law, f, 100_000, 5, pair)
            assert abs(r["estimate"]) <= 4 * r["stderr"]


class TestZeroBias:
    def test_texp_closed_form_density(self):
        a, b = 1.0, 2.0
        zb = zero_bias(catalog("texp", alpha=a, beta=b))
        fy = lambda t: a * a * b * b / (a * a + b * b) * np.where(t > 0, np.exp(-a * t) / a, np.exp(b * t) / b)
        x = np.array([-3, -1, -0.2, 0.1, 0.5, 2, 5.0])
        np.testing.assert_allclose(zb["Y"].pdf(x), fy(x), atol=1e-9)
        assert zb["total"] == pytest.approx(1 / a ** 2 + 1 / b ** 2)

    @settings(max_examples=10, deadline=None)
    @given(a=st.floats(0.5, 4.0), b=st.floats(0.5, 4.0))
    def test_gamma_total_and_mass(self, a, b):
        zb = zero_bias(catalog("gamma", alpha=a, beta=b))
        assert zb["total"] == pytest.approx(a / b ** 2, rel=1e-10)
        assert abs(zb["Y"].mass_defect) < 1e-8

    def test_gamma_zero_bias_law(self):
        # eta_+(v)/∫u²ν = β e^{-βv}: Y ~ Exp(β)
        y = zero_bias(catalog("gamma", alpha=3.0, beta=2.0))["Y"]
        x = np.linspace(0.05, 5, 7)
        np.testing.assert_allclose(y.cdf(x), 1 - np.exp(-2 * x), atol=1e-8)

    def test_stable_rejected(self):
        with pytest.raises(AssumptionViolated):
            zero_bias(catalog("sas"))

    def test_gaussian_rejected(self):
        with pytest.raises(AssumptionViolated):
            zero_bias(catalog("normal"))

    @pytest.mark.parametrize("name", ["gamma", "texp"])
    def test_residual(self, name):
        law = catalog(name)
        zb = zero_bias(law)
        for f in D[::4]:
            r = zero_bias_residual(law, f, 100_000, 6, zb)
            assert abs(r["estimate"]) <= 4 * r["stderr"]


class TestMixed:
    def test_sas_masses(self):
        c = sas_unit_c(1.5)
        mt = mixed_transform(catalog("sas", alpha=1.5))
        assert mt["quad_mass"] == pytest.approx(2 * c / 0.5, rel=1e-10)
        assert mt["m"] == pytest.approx(2 * c / 0.5, rel=1e-10)
        assert abs(mt["U"].mass_defect) < 1e-8

    def test_residual(self):
        law = catalog("sas", alpha=1.5)
        mt = mixed_transform(law)
        for f in D[::4]:
            r = mixed_residual(law, f, 100_000, 8, mt)
            assert abs(r["estimate"]) <= 4 * r["stderr"]

    def test_equilibrium(self):
        law = catalog("gamma")
        r = equilibrium_residual(law, D[16], 100_000, 3)
        for v in r.values():
            assert abs(v["estimate"]) <= 4 * v["stderr"]


class TestBiasLaw:
    def test_atoms_merge_and_moments(self):
        law = BiasLaw("mix", 1.0, atoms=((0.0, 0.25), (0.0, 0.25)),
                      density=lambda x: np.where((x > 0) & (x < 1), 0.5, 0.0), support=(0.0, 1.0))
        assert law.atom_mass == pytest.approx(0.5)
        assert law.expect(lambda x: x) == pytest.approx(0.25, abs=1e-10)
        assert law.cdf(0.5) == pytest.approx(0.75, abs=1e-10)
        assert law.quantile(0.75) == pytest.approx(0.5, abs=1e-8)
