import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from idstein.errors import DomainError, MissingDerivative
from idstein.levy_core import catalog
from idstein.stein_ops import (TestFunction, apply_Agen, c2_dictionary, cp_operator, dictionary,
                               fourier_moment, fractional_laplacian,
                               fractional_laplacian_derivative_form, gamma_operator,
                               identity_residual, laplace_operator, lipschitz_extension,
                               marchaud_minus, marchaud_plus, nbin0_expectation_forms,
                               nbin0_operator, nbin_expectation_forms, nbin_operator,
                               poisson_operator, stable_operator)

D = dictionary()
XS = [-1.3, 0.0, 0.7, 2.5]


class TestDictionary:
    def test_sizes(self):
        assert len(D) == 20 and len(c2_dictionary()) == 20

    @settings(max_examples=40, deadline=None)
    @given(x=st.floats(-20, 20), k=st.integers(0, 19))
    def test_derivative_matches_finite_difference(self, x, k):
        f = D[k]
        if any(abs(x - kk) < 1e-3 for kk in f.kinks):
            return
        h = 1e-6
        fd = (f(np.array([x + h])) - f(np.array([x - h])))[0] / (2 * h)
        assert fd == pytest.approx(float(f.derivative(np.array([x]))[0]), abs=1e-6)

    @settings(max_examples=40, deadline=None)
    @given(x=st.floats(-50, 50), y=st.floats(-50, 50), k=st.integers(0, 19))
    def test_certified_constants(self, x, y, k):
        f = D[k]
        fx, fy = float(f(np.array([x]))[0]), float(f(np.array([y]))[0])
        assert abs(fx) <= f.sup_bound + 1e-12
        assert abs(fx - fy) <= f.lip_bound * abs(x - y) + 1e-12

    def test_c2_dictionary_bounds(self):
        x = np.linspace(-20, 20, 4001)
        for f in c2_dictionary():
            assert np.max(np.abs(f(x))) <= 1 + 1e-12
            assert np.max(np.abs(f.derivative(x))) <= 1 + 1e-12
            assert np.max(np.abs(f.second_derivative(x))) <= 1 + 1e-12

    def test_lipschitz_extension(self):
        z = np.array([0.0, 1.0, 3.0])
        v = np.array([0.0, 0.5, -1.0])
        f = lipschitz_extension(z, v, 1.0)
        np.testing.assert_allclose(f(z), v)
        x = np.linspace(-5, 5, 1001)
        assert np.max(np.abs(np.diff(f(x))) / np.diff(x)) <= 1 + 1e-12

    def test_missing_derivative(self):
        with pytest.raises(MissingDerivative):
            TestFunction(np.abs, 1.0).derivative_function()


class TestFractionalOperators:
    # symbols: D^β_± e^{iax} = (±ia)^β e^{iax}, Δ^{α/2} e^{iax} = -|a|^α e^{iax}
    @pytest.mark.parametrize("beta", [0.3, 0.5, 0.8])
    def test_marchaud_on_sine(self, beta):
        f, x = D[2], 0.3
        assert marchaud_plus(f, x, beta) == pytest.approx(
            2 ** beta * math.sin(2 * x + beta * math.pi / 2), abs=1e-7)
        assert marchaud_minus(f, x, beta) == pytest.approx(
            2 ** beta * math.sin(2 * x - beta * math.pi / 2), abs=1e-7)

    @pytest.mark.parametrize("alpha", [1.2, 1.5, 1.8])
    def test_fractional_laplacian_on_cosine(self, alpha):
        f, x = D[7], 0.3
        expect = -2 ** alpha * math.cos(2 * x)
        assert fractional_laplacian(f, x, alpha) == pytest.approx(expect, abs=1e-9)
        assert fractional_laplacian_derivative_form(f, x, alpha) == pytest.approx(expect, abs=1e-9)

    def test_domain(self):
        with pytest.raises(DomainError):
            marchaud_plus(D[0], 0.0, 1.2)
        with pytest.raises(DomainError):
            fractional_laplacian(D[0], 0.0, 2.5)


class TestGenericOperator:
    def test_fourier_moment_gamma(self):
        a = 0.7
        expect = 2 * (1 / (1 - 1j * a) - (1 - math.exp(-1)))
        assert fourier_moment(catalog("gamma").nu, a) == pytest.approx(expect, abs=1e-12)

    @pytest.mark.parametrize("k", [0, 9, 13, 16])
    def test_poisson(self, k):
        law = catalog("poisson", lam=1.0)
        for x in XS:
            assert apply_Agen(D[k], x, law) == pytest.approx(float(poisson_operator(D[k], x, 1.0)), abs=1e-10)

    @pytest.mark.parametrize("k", [0, 9, 13, 16])
    def test_nbin(self, k):
        for name, op in [("nbin0", nbin0_operator), ("nbin", nbin_operator)]:
            law = catalog(name, r=2.0, p=0.5)
            for x in XS:
                assert apply_Agen(D[k], x, law) == pytest.approx(float(op(D[k], x, 2.0, 0.5)), abs=1e-9)

    @pytest.mark.parametrize("k", [1, 10, 14, 17])
    def test_cp_gamma_laplace(self, k):
        cp, gam, lap = catalog("cp"), catalog("gamma"), catalog("laplace")
        for x in XS:
            assert apply_Agen(D[k], x, cp) == pytest.approx(cp_operator(D[k], x, cp.nu), abs=1e-9)
            assert apply_Agen(D[k], x, gam) == pytest.approx(gamma_operator(D[k], x, 2.0, 1.0), abs=1e-9)
            assert apply_Agen(D[k], x, lap) == pytest.approx(laplace_operator(D[k], x), abs=1e-9)

    @pytest.mark.parametrize("k", [3, 11, 18])
    def test_stable(self, k):
        law = catalog("stable", alpha=1.5, c1=2.0, c2=1.0, mean=2.0)
        for x in XS:
            assert apply_Agen(D[k], x, law) == pytest.approx(stable_operator(D[k], x, 1.5, 2.0, 1.0), abs=1e-8)

    def test_rule_and_adaptive_agree(self):
        law = catalog("texp", alpha=1.0, beta=2.0)
        for f in D[::4]:
            r = apply_Agen(f, np.array(XS), law, method="rule")
            a = np.array([apply_Agen(f, x, law, method="adaptive") for x in XS])
            np.testing.assert_allclose(r, a, atol=1e-8)

    def test_gaussian_part_needs_derivative(self):
        f = lipschitz_extension([0.0], [0.0])
        with pytest.raises(MissingDerivative):
            apply_Agen(f, 0.0, catalog("normal"))

    def test_normal_operator(self):
        # (x - m) f(x) - σ² f'(x)
        law = catalog("normal", mean=0.5, sd=2.0)
        f = D[1]
        for x in XS:
            assert apply_Agen(f, x, law) == pytest.approx((x - 0.5) * math.sin(x) - 4 * math.cos(x), abs=1e-12)


class TestExpectationForms:
    @pytest.mark.parametrize("k", range(0, 20, 3))
    def test_nbin_geometric_rewrites(self, k):
        lhs, rhs = nbin0_expectation_forms(D[k], 2.0, 0.5)
        assert lhs == pytest.approx(rhs, abs=1e-12)
        lhs, rhs = nbin_expectation_forms(D[k], 2.0, 0.5)
        assert lhs == pytest.approx(rhs, abs=1e-12)


class TestIdentityResidual:
    @pytest.mark.parametrize("name", ["poisson", "gamma", "laplace"])
    def test_small_sample(self, name):
        law = catalog(name)
        for f in D[::5]:
            r = identity_residual(law, f, n=50_000, seed=2)
            assert abs(r["estimate"]) <= 4 * r["stderr"]

    def test_detects_wrong_law(self):
        x = catalog("gamma", alpha=2.5).sampler(np.random.default_rng(0), 200_000)
        r = identity_residual(catalog("gamma", alpha=2.0), D[16], samples=x)
        assert abs(r["estimate"]) > 6 * r["stderr"]
