import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from idstein.errors import DomainError, InfiniteMean, InvalidTriplet, RepresentationUnavailable
from idstein.levy_core import (CATALOG, LevyMeasure, LevyTriplet, catalog, charfn_from_triplet,
                               convert_representation, from_representation, idpareto_scale,
                               levy_exponent, mean_of, rng_stream, sample, sas_unit_c,
                               stable_constants)

LAWS = [
    ("poisson", dict(lam=1.0)), ("nbin0", dict(r=2.0, p=0.5)), ("nbin", dict(r=2.0, p=0.5)),
    ("cp", dict(rate=1.0)), ("gamma", dict(alpha=2.0, beta=1.0)), ("laplace", {}),
    ("texp", dict(alpha=1.0, beta=2.0)), ("sas", dict(alpha=1.5)),
    ("stable", dict(alpha=1.5, c1=2.0, c2=1.0, mean=1.0)), ("dickman", {}),
    ("chaos2", dict(lambdas=(0.5, -0.3))), ("normal", dict(mean=0.5, sd=2.0)),
]
T = np.array([-3.0, -0.7, 0.4, 1.0, 2.5])


class TestCharacteristicFunctions:
    @pytest.mark.parametrize("name,kw", LAWS, ids=[n for n, _ in LAWS])
    def test_closed_form_matches_levy_khintchine(self, name, kw):
        law = catalog(name, **kw)
        np.testing.assert_allclose(charfn_from_triplet(law.triplet, T), law.charfn(T), atol=1e-10)

    @pytest.mark.parametrize("name,kw", LAWS, ids=[n for n, _ in LAWS])
    def test_unit_at_origin_and_hermitian(self, name, kw):
        law = catalog(name, **kw)
        assert abs(law.charfn(np.array([0.0]))[0] - 1.0) < 1e-14
        np.testing.assert_allclose(law.charfn(-T), np.conj(law.charfn(T)), atol=1e-14)

    def test_poisson_closed_form(self):
        law = catalog("poisson", lam=2.0)
        np.testing.assert_allclose(law.charfn(T), np.exp(2.0 * (np.exp(1j * T) - 1.0)), rtol=1e-14)

    def test_gamma_closed_form(self):
        law = catalog("gamma", alpha=2.0, beta=3.0)
        np.testing.assert_allclose(law.charfn(T), (1 - 1j * T / 3.0) ** -2.0, rtol=1e-14)

    def test_sas_unit_constant_gives_exp_minus_abs_power(self):
        law = catalog("sas", alpha=1.5)
        np.testing.assert_allclose(law.charfn(T), np.exp(-np.abs(T) ** 1.5), rtol=1e-12)
        assert law.params["c"] == pytest.approx(sas_unit_c(1.5))

    def test_levy_exponent_is_log_charfn(self):
        law = catalog("gamma", alpha=2.0, beta=1.0)
        psi = levy_exponent(law.triplet, 1.3)
        assert np.exp(psi) == pytest.approx(complex(law.charfn(np.array([1.3]))[0]), abs=1e-12)

    def test_dickman_density_sup(self):
        assert catalog("dickman").density_sup == pytest.approx(math.exp(-np.euler_gamma))


class TestMeansAndMoments:
    # frozen: NBin(2, 0.5) is 1 + NBin0, so E X = 1 + rq/p = 3
    def test_nbin_mean(self):
        assert catalog("nbin", r=2.0, p=0.5).mean == 3.0

    @pytest.mark.parametrize("name,kw", [l for l in LAWS if l[0] not in ("sas", "stable")],
                             ids=[n for n, _ in LAWS if n not in ("sas", "stable")])
    def test_sample_mean(self, name, kw):
        law = catalog(name, **kw)
        x = sample(law, 200_000, seed=3).values
        assert abs(x.mean() - law.mean) < 5 * x.std() / math.sqrt(x.size)

    def test_center_equals_mean(self):
        for name, kw in LAWS[:8]:
            law = catalog(name, **kw)
            assert law.triplet.center == pytest.approx(law.mean, abs=1e-10)

    def test_gamma_second_moment_split(self):
        nu = catalog("gamma", alpha=2.0, beta=1.0).nu
        assert nu.total_second_moment == pytest.approx(2.0, rel=1e-12)

    def test_infinite_mean_raises(self):
        law = dataclasses.replace(catalog("gamma"), mean=math.inf)
        with pytest.raises(InfiniteMean):
            mean_of(law)


class TestRepresentations:
    @settings(max_examples=25, deadline=None)
    @given(a=st.floats(0.2, 5.0), b=st.floats(0.2, 5.0))
    def test_roundtrip_drift_and_center(self, a, b):
        tr = catalog("gamma", alpha=a, beta=b).triplet
        for rep in ("drift", "center", "standard"):
            loc, nu, s2 = convert_representation(tr, rep)
            back = from_representation(loc, nu, s2, rep)
            assert back.b == pytest.approx(tr.b, rel=1e-10, abs=1e-12)

    def test_gamma_drift_is_zero(self):
        assert catalog("gamma").triplet.drift == pytest.approx(0.0, abs=1e-14)

    def test_stable_has_no_drift(self):
        with pytest.raises(RepresentationUnavailable):
            convert_representation(catalog("sas").triplet, "drift")

    def test_invalid_triplets(self):
        with pytest.raises(InvalidTriplet):
            LevyMeasure(atoms=((0.0, 1.0),))
        with pytest.raises(InvalidTriplet):
            LevyMeasure(atoms=((1.0, -1.0),))
        with pytest.raises(InvalidTriplet):
            LevyTriplet(0.0, -1.0, LevyMeasure())
        with pytest.raises(DomainError):
            catalog("stable", alpha=2.5)

    def test_idpareto_has_no_triplet(self):
        with pytest.raises(RepresentationUnavailable):
            catalog("idpareto").nu

    def test_catalog_names(self):
        assert {"poisson", "gamma", "sas", "chaos2", "idpareto"} <= set(CATALOG)
        with pytest.raises(KeyError):
            catalog("nope")


class TestStableConstants:
    def test_symmetric_has_no_drift_term(self):
        k = stable_constants(1.5, 1.0, 1.0)
        assert k["drift_term"] == 0.0
        assert k["c1_alpha"] == k["c2_alpha"]

    def test_scale_matches_levy_density(self):
        law = catalog("stable", alpha=1.7, c1=1.0, c2=1.0)
        sigma = law.meta["scale"]
        t = np.array([0.5, 2.0])
        np.testing.assert_allclose(np.abs(law.charfn(t)), np.exp(-(sigma * t) ** 1.7), rtol=1e-12)


class TestIDPareto:
    def test_scale_formula(self):
        a = 1.5
        c = (1 - a) / (2 * special.gamma(2 - a) * math.cos(a * math.pi / 2))
        assert idpareto_scale(a) == pytest.approx((2 * c) ** (1 / a))

    @pytest.mark.parametrize("s", [1e-3, 1e-2, 0.1])
    def test_small_argument_expansion(self, s):
        law = catalog("idpareto", alpha=1.5)
        one_minus = law.meta["one_minus_charfn"](np.array([s]))[0]
        assert abs(one_minus - s ** 1.5) <= 2.0 * s * s

    @pytest.mark.parametrize("t", [0.3, 2.0, 7.0])
    def test_charfn_against_density(self, t):
        law = catalog("idpareto", alpha=1.5)
        v, _ = integrate.quad(lambda x: 2 * law.density(x), 0, np.inf, weight="cos", wvar=t, limlst=200)
        assert law.charfn(t).real == pytest.approx(v, abs=1e-8)

    def test_cdf_density_consistent(self):
        law = catalog("idpareto", alpha=1.5)
        v, _ = integrate.quad(law.density, -np.inf, 0.8)
        assert law.cdf(0.8) == pytest.approx(v, rel=1e-9)


class TestRandomStreams:
    def test_reproducible(self):
        a = rng_stream(7, 1, 2).normal(size=5)
        b = rng_stream(7, 1, 2).normal(size=5)
        np.testing.assert_array_equal(a, b)

    def test_keys_differ(self):
        a = rng_stream(7, 1).normal(size=5)
        b = rng_stream(7, 2).normal(size=5)
        assert not np.allclose(a, b)

    def test_sample_record(self):
        s = sample(catalog("gamma"), 10, seed=4)
        assert s.values.shape == (10,) and s.seed == 4 and s.law_name == "gamma"
        with pytest.raises(ValueError):
            sample(catalog("gamma"), 0, seed=1)
