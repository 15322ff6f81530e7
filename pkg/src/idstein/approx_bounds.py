"""Quantitative approximation bounds and rate experiments.

Three families are covered:

* Δ-type discrepancies between two infinitely divisible laws built from
  their size-bias, zero-bias or k-function representations;
* compound Poisson approximation (CPA) and the Pareto to stable
  attraction experiment, measured in Kolmogorov distance;
* the six-term bound for row sums ``S_n = b_n Σ Z_k + c_n`` against a
  self-decomposable target.

Absolute constants in the bounds are never asserted: they are carried
as explicit multipliers (default 1) and reported as such.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize

from .bias_transforms import BiasLaw, size_bias_pair, zero_bias
from .errors import (AssumptionViolated, DomainError, FitFailure, MissingKFunction,
                     PhaseUnwrapFailure, RepresentationUnavailable)
from .fourier_metrics import BoundReport, invert_cdf, kolmogorov_distance, w1_distance
from .levy_core import IDLaw, LevyMeasure, idpareto_scale, rng_stream
from .quadrature import DEFAULT_QUAD, QuadratureConfig, quad
from .stein_ops import c2_dictionary


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------

def fit_slope(n, d) -> dict:
    """Least-squares fit of ``log d = intercept + slope * log n``."""
    n, d = np.asarray(n, dtype=float), np.asarray(d, dtype=float)
    ok = (n > 0) & (d > 0) & np.isfinite(d)
    if ok.sum() < 2:
        raise FitFailure("need two positive points for a log-log fit")
    slope, intercept = np.polyfit(np.log(n[ok]), np.log(d[ok]), 1)
    return dict(slope=float(slope), intercept=float(intercept), constant=float(math.exp(intercept)))


def _w1_bias(a: Optional[BiasLaw], b: Optional[BiasLaw], cfg) -> float:
    """W1 between two bias laws; a missing law is read as δ0."""
    if a is None and b is None:
        return 0.0
    point = BiasLaw("delta0", 0.0, ((0.0, 1.0),))
    a, b = a or point, b or point
    pts = sorted({loc for loc, _ in a.atoms} | {loc for loc, _ in b.atoms})
    return w1_distance(a.cdf, b.cdf, cfg, points=pts)


def _law_nu_mean(law):
    """``(ν, E X)`` from an :class:`IDLaw` or a ``(LevyMeasure, mean)`` pair."""
    if isinstance(law, IDLaw):
        return law.nu, float(law.mean)
    nu, mean = law
    return nu, float(mean)


# ---------------------------------------------------------------------------
# Δ discrepancies
# ---------------------------------------------------------------------------

def delta_sizebias(law_n: IDLaw, law_inf: IDLaw, C: float = 1.0, p: float = 1.0,
                   cfg: QuadratureConfig = DEFAULT_QUAD) -> BoundReport:
    """Size-bias discrepancy between two laws.

    .. math::

        Δ = |m_{0,n}^+ - m_{0,∞}^+| + |m_{0,n}^- - m_{0,∞}^-|
            + m_{0,∞}^+ W_1(Y_n^+, Y_∞^+) + m_{0,∞}^- W_1(Y_n^-, Y_∞^-)

    with the comonotone coupling.  The Kolmogorov bound ``C Δ^{1/(p+2)}``
    is stored in ``params['dk_bound']``.
    """
    a, b = size_bias_pair(law_n), size_bias_pair(law_inf)
    terms = {
        "mass_plus": abs(a["m0_plus"] - b["m0_plus"]),
        "mass_minus": abs(a["m0_minus"] - b["m0_minus"]),
        "w1_plus": b["m0_plus"] * _w1_bias(a["Yplus"], b["Yplus"], cfg) if b["m0_plus"] else 0.0,
        "w1_minus": b["m0_minus"] * _w1_bias(a["Yminus"], b["Yminus"], cfg) if b["m0_minus"] else 0.0,
    }
    rep = BoundReport(terms, dict(C=C, p=p, exponent=1.0 / (p + 2.0)))
    rep.params["dk_bound"] = C * rep.total ** (1.0 / (p + 2.0))
    return rep


def _zb_cdf_double(nu: LevyMeasure, total: float, cfg):
    """CDF of the zero-bias law as the double integral over ν."""
    neg2 = nu.integrate(lambda v: v * v, -np.inf, 0.0, cfg)

    def F(t):
        if t < 0:
            return nu.integrate(lambda v: -v * (t - v), -np.inf, t, cfg) / total
        return (nu.integrate(lambda v: v * min(v, t), 0.0, np.inf, cfg) + neg2) / total

    return F


def _w1_double(nu_a, tot_a, nu_b, tot_b, cfg) -> float:
    Fa, Fb = _zb_cdf_double(nu_a, tot_a, cfg), _zb_cdf_double(nu_b, tot_b, cfg)
    g = lambda t: abs(Fa(t) - Fb(t))
    pts = sorted({0.0, -1.0, 1.0, *[loc for loc, _ in nu_a.atoms + nu_b.atoms]})
    out = sum(quad(g, lo, hi, cfg) for lo, hi in zip(pts[:-1], pts[1:]))
    return out + quad(g, -np.inf, pts[0], cfg) + quad(g, pts[-1], np.inf, cfg)


def delta_zerobias(law_n: IDLaw, law_inf: IDLaw, route: str = "cdf", C: float = 1.0,
                   p: float = 1.0, cfg: QuadratureConfig = DEFAULT_QUAD) -> BoundReport:
    """Zero-bias discrepancy ``|η_n - η_∞| + |E X_n - E X_∞| + W_1(Y_n, Y_∞)``.

    Parameters
    ----------
    route : {"cdf", "double"}
        ``"cdf"`` integrates the difference of the tabulated zero-bias
        CDFs; ``"double"`` writes each CDF as an integral of ν against
        ``v (v ∧ t)`` and integrates the difference directly.
    """
    a, b = zero_bias(law_n), zero_bias(law_inf)
    if route == "cdf":
        w1 = _w1_bias(a["Y"], b["Y"], cfg)
    elif route == "double":
        w1 = _w1_double(law_n.nu, a["total"], law_inf.nu, b["total"], cfg)
    else:
        raise DomainError(f"unknown route {route!r}")
    terms = dict(eta=abs(a["total"] - b["total"]), mean=abs(law_n.mean - law_inf.mean), w1=w1)
    rep = BoundReport(terms, dict(C=C, p=p, exponent=1.0 / (p + 3.0), route=route))
    rep.params["dk_bound"] = C * rep.total ** (1.0 / (p + 3.0))
    return rep


def delta_selfdecomp(law_n, law_inf, C: float = 1.0, p: float = 1.0,
                     cfg: QuadratureConfig = DEFAULT_QUAD) -> BoundReport:
    """Discrepancy between two self-decomposable laws through their k-functions.

    Each law is an :class:`IDLaw` or a ``(LevyMeasure, mean)`` pair whose
    measure carries ``k_function`` ψ with ``ν(du) = ψ(u)/|u| du``.  The
    ψ differences are weighted by ``|u|`` on ``[-1, 1]`` and unweighted
    outside.
    """
    (nu_a, mean_a), (nu_b, mean_b) = _law_nu_mean(law_n), _law_nu_mean(law_inf)
    if nu_a.k_function is None or nu_b.k_function is None:
        raise MissingKFunction("both Lévy measures need a k-function")
    d = lambda u: abs(float(nu_a.k_function(u)) - float(nu_b.k_function(u)))
    terms = dict(mean=abs(mean_a - mean_b),
                 near_plus=quad(lambda u: u * d(u), 0.0, 1.0, cfg),
                 far_plus=quad(d, 1.0, np.inf, cfg),
                 near_minus=quad(lambda u: -u * d(u), -1.0, 0.0, cfg),
                 far_minus=quad(d, -np.inf, -1.0, cfg))
    rep = BoundReport(terms, dict(C=C, p=p, exponent=1.0 / (p + 2.0)))
    rep.params["dk_bound"] = C * rep.total ** (1.0 / (p + 2.0))
    return rep


def _cancel_common(a, b):
    # drop coefficients present in both multisets; their terms cancel exactly
    ca, cb = Counter(a.tolist()), Counter(b.tolist())
    common = ca & cb
    return np.array(list((ca - common).elements())), np.array(list((cb - common).elements()))


def chaos_delta(lam_n: Sequence[float], lam_inf: Sequence[float]) -> float:
    """Closed-form Δ between two second-chaos laws.

    .. math:: 2\\int_0^\\infty \\Big|\\sum_k λ_{∞,k}^2 e^{-t/(2λ_{∞,k})}
              - \\sum_k λ_{n,k}^2 e^{-t/(2λ_{n,k})}\\Big| dt

    The sign changes of the exponential sum are bracketed on a geometric
    grid and located by Brent's method; each signed piece is integrated
    exactly.  Negative coefficients contribute the mirrored term on the
    negative half-line.
    """
    lam_n, lam_inf = np.asarray(lam_n, dtype=float), np.asarray(lam_inf, dtype=float)
    total = 0.0
    for sgn in (1.0, -1.0):
        a, b = _cancel_common(sgn * lam_inf[sgn * lam_inf > 0], sgn * lam_n[sgn * lam_n > 0])
        if a.size == 0 and b.size == 0:
            continue
        lam = np.concatenate([a, b])
        coef = np.concatenate([a * a, -b * b])
        D = lambda t: float(np.sum(coef * np.exp(-t / (2.0 * lam))))
        prim = lambda t: float(np.sum(-2.0 * lam * coef * np.exp(-t / (2.0 * lam))))
        grid = np.concatenate([[0.0], np.geomspace(1e-4 * lam.min(), 200.0 * lam.max(), 4000)])
        vals = np.array([D(t) for t in grid])
        cuts = [0.0]
        for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
            cuts.append(optimize.brentq(D, grid[i], grid[i + 1], xtol=1e-300, rtol=1e-15))
        cuts.append(np.inf)
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            top = 0.0 if np.isinf(hi) else prim(hi)
            total += abs(top - prim(lo))
    return 2.0 * total


def chaos_l1(lam_n: Sequence[float], lam_inf: Sequence[float]) -> float:
    """``Σ_k |λ_{n,k} - λ_{∞,k}|`` with zero padding."""
    a, b = np.asarray(lam_n, dtype=float), np.asarray(lam_inf, dtype=float)
    m = max(a.size, b.size)
    a, b = np.pad(a, (0, m - a.size)), np.pad(b, (0, m - b.size))
    return float(np.abs(a - b).sum())


def chaos_rate_experiment(n_grid=range(1, 11), K: int = 60, rescale: bool = True) -> dict:
    """Δ for truncations of ``λ_{∞,k} = 2^{-k}`` (k ≥ 1).

    With ``rescale`` both sequences are normalised to ``Σλ² = 1/2``.
    Returns per-n arrays of the closed-form Δ, the ℓ¹ distance and the
    ratios of consecutive Δ values.
    """
    lam_inf = 2.0 ** -np.arange(1, K + 1)
    norm = lambda l: l / math.sqrt(2.0 * np.sum(l * l)) if rescale else l
    ns = np.array(list(n_grid))
    deltas, l1 = [], []
    for n in ns:
        ln = norm(lam_inf[:n])
        deltas.append(chaos_delta(ln, norm(lam_inf)))
        l1.append(chaos_l1(ln, norm(lam_inf)))
    deltas = np.array(deltas)
    return dict(n=ns, delta=deltas, l1=np.array(l1), ratio=deltas[1:] / deltas[:-1])


# ---------------------------------------------------------------------------
# Compound Poisson approximation
# ---------------------------------------------------------------------------

def distinguished_log(charfn: Callable, t, step: float = 0.05, max_halvings: int = 14):
    """Continuous logarithm of ``φ`` along ``[0, t]``.

    The phase is accumulated on a grid from 0, halving the step until
    every increment is below π/2 and a further halving reproduces the
    same branch.

    Raises
    ------
    PhaseUnwrapFailure
        If ``φ`` vanishes on the path or no step passes the test.
    """
    t = np.asarray(t, dtype=float)
    at = np.abs(t).ravel()
    top = float(at.max()) if at.size else 0.0

    def attempt(h):
        grid = np.union1d(np.arange(0.0, top, h), at)
        grid = np.union1d(grid, [0.0])
        v = np.asarray(charfn(grid), dtype=complex)
        if np.any(np.abs(v) == 0) or not np.all(np.isfinite(v)):
            raise PhaseUnwrapFailure("characteristic function vanishes on the path")
        inc = np.angle(v[1:] / v[:-1])
        phase = np.concatenate([[np.angle(v[0])], np.angle(v[0]) + np.cumsum(inc)])
        idx = np.searchsorted(grid, at)
        return float(np.max(np.abs(inc), initial=0.0)), np.log(np.abs(v[idx])) + 1j * phase[idx]

    h = step
    for _ in range(max_halvings):
        worst, val = attempt(h)
        if worst < 0.5 * math.pi:
            worst2, val2 = attempt(0.5 * h)
            if np.allclose(val.imag, val2.imag, atol=1e-8):
                val = np.where(t.ravel() < 0, np.conj(val), val)
                return val.reshape(t.shape) if t.ndim else complex(val[0])
        h *= 0.5
    raise PhaseUnwrapFailure(f"phase increments stay above pi/2 down to step {h:g}")


def law_log_charfn(law: IDLaw) -> Optional[Callable]:
    """Closed-form distinguished logarithm of ``φ`` when the catalog has one."""
    pr = law.params
    if law.name in ("stable", "sas"):
        from scipy import special
        al, c1, c2 = stable_params(law)
        mu = float(pr.get("mean", 0.0))
        g = special.gamma(-al)
        cosv, sinv = math.cos(0.5 * math.pi * al), math.sin(0.5 * math.pi * al)

        def log_stable(t):
            t = np.asarray(t, dtype=float)
            at = np.abs(t) ** al
            return 1j * mu * t + g * at * ((c1 + c2) * cosv - 1j * np.sign(t) * (c1 - c2) * sinv)
        return log_stable
    if law.name == "gamma":
        return lambda t: -pr["alpha"] * np.log(1.0 - 1j * np.asarray(t, dtype=float) / pr["beta"])
    if law.name == "normal":
        return lambda t: 1j * pr["mean"] * np.asarray(t) - 0.5 * (pr["sd"] * np.asarray(t, dtype=float)) ** 2
    return None


def cpa_charfn(base: IDLaw, n: int, t, step: float = 0.05, unwrap: bool = False):
    """``φ_n(t) = exp(n(φ(t)^{1/n} - 1))`` with the distinguished logarithm.

    The logarithm comes from :func:`law_log_charfn` when available (it
    stays finite where ``φ`` underflows) and from phase unwrapping
    otherwise or when ``unwrap`` is set.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    if n == 1:
        return base.charfn(t)
    closed = None if unwrap else law_log_charfn(base)
    L = closed(t) if closed is not None else distinguished_log(base.charfn, t, step)
    return np.exp(n * np.expm1(L / n))


def cpa_root_gap_bound(base: IDLaw, n: int, t):
    """Right side of ``|φ^{1/n}(t) - 1| ≤ (|t|/n)(|b_0| + ∫|u|ν)``."""
    nu = base.nu
    absm = nu.abs_moment_small + nu.abs_moment_tail
    if not np.isfinite(absm):
        raise AssumptionViolated("∫|u|ν(du) is infinite")
    return np.abs(np.asarray(t, dtype=float)) / n * (abs(base.triplet.drift) + absm)


def stable_params(law: IDLaw):
    """``(α, c1, c2)`` of a catalog stable or SαS law."""
    al = _stable_alpha(law)
    pr = law.params
    return al, float(pr.get("c1", pr.get("c"))), float(pr.get("c2", pr.get("c")))


def _stable_alpha(base: IDLaw) -> float:
    if base.name not in ("stable", "sas"):
        raise AssumptionViolated(f"{base.name} is not a stable law")
    return float(base.params["alpha"])


def cpa_bounds(base: IDLaw, n: int, variant: str = "L1", p: float = 1.0,
               C: float = 1.0) -> BoundReport:
    """Structural CPA bound on ``d_K(X_n, X)``.

    ============  =====================================  ================
    variant       structural term                        exponent of 1/n
    ============  =====================================  ================
    ``L1``        (|b_0| + ∫|u|ν)^{2/(p+2)}              1/(p+2)
    ``L2``        (|E X| + ∫u²ν)^{2/(p+4)}               1/(p+4)
    ``stable``    1                                      1/(α+1)
    ``sas``       1                                      1/α
    ============  =====================================  ================

    ``C`` is the unknown absolute constant, reported not asserted.
    """
    if variant == "L1":
        nu = base.nu
        absm = nu.abs_moment_small + nu.abs_moment_tail
        if not np.isfinite(absm) or base.triplet.sigma2 > 0:
            raise AssumptionViolated("L1 variant needs ∫|u|ν < ∞ and no Gaussian part")
        e, s = 1.0 / (p + 2.0), (abs(base.triplet.drift) + absm) ** (2.0 / (p + 2.0))
    elif variant == "L2":
        nu = base.nu
        sec = nu.total_second_moment
        if not np.isfinite(sec) or base.triplet.sigma2 > 0:
            raise AssumptionViolated("L2 variant needs a finite second moment and no Gaussian part")
        e, s = 1.0 / (p + 4.0), (abs(base.mean) + sec) ** (2.0 / (p + 4.0))
    elif variant == "stable":
        e, s = 1.0 / (_stable_alpha(base) + 1.0), 1.0
    elif variant == "sas":
        al = _stable_alpha(base)
        nu = base.nu
        if base.name != "sas" and not (abs(nu.tail_plus_fn(1.0) - nu.tail_minus_fn(-1.0)) < 1e-12
                                       and base.mean == 0):
            raise AssumptionViolated("the improved rate needs a symmetric stable law")
        e, s = 1.0 / al, 1.0
    else:
        raise DomainError(f"unknown variant {variant!r}")
    terms = dict(structural=C * s * float(n) ** (-e))
    return BoundReport(terms, dict(variant=variant, exponent=e, p=p, C=C, n=int(n)),
                       notes=["C is an unknown absolute constant (default 1)"])


def cpa_rate_experiment(base: IDLaw, n_grid=2 ** np.arange(4, 11), grid=None,
                        cfg: QuadratureConfig = DEFAULT_QUAD) -> dict:
    """Measured ``d_K`` between ``base`` and its CPA for each n.

    The atom ``e^{-n}`` of the compound Poisson law at 0 is handled
    exactly.  Returns the table, the fitted log-log slope and the
    fitted constant.
    """
    if base.lattice or base.law_atoms:
        raise DomainError("CPA experiment needs a law without atoms")
    ns = np.asarray(list(n_grid), dtype=int)
    d = np.array([kolmogorov_distance(lambda t, n=n: cpa_charfn(base, int(n), t), base.charfn,
                                      grid, cfg, atoms_a=((0.0, math.exp(-n)),)) for n in ns])
    return dict(n=ns, dK=d, **fit_slope(ns, d))


# ---------------------------------------------------------------------------
# Pareto to stable
# ---------------------------------------------------------------------------

def pareto_to_stable_experiment(alpha: float = 1.5, n_grid=2 ** np.arange(4, 13), grid=None,
                                cfg: QuadratureConfig = DEFAULT_QUAD, law: IDLaw | None = None) -> dict:
    """``d_K`` between normalised Pareto sums and the SαS law ``e^{-|t|^α}``.

    The Pareto scale is ``λ = (2c)^{1/α}`` so that ``φ_1(s) = 1 - |s|^α + O(s²)``.
    For each n the sum ``n^{-1/α} Σ ξ_k`` has characteristic function
    ``φ_1(t n^{-1/α})^n`` with ``φ_1`` evaluated by oscillatory quadrature.
    ``n = 1`` is compared through the closed-form CDF instead, since
    ``φ_1`` decays only like ``s^{-2}``.

    Returns
    -------
    dict
        ``n``, ``dK``, ``slope``, ``intercept``, ``constant``,
        ``predicted`` (``-(2/α - 1)``) and ``lam``.
    """
    from .levy_core import catalog

    law = law or catalog("idpareto", alpha=alpha)
    target = lambda t: np.exp(-np.abs(np.asarray(t, dtype=float)) ** alpha)
    grid = np.linspace(-10.0, 10.0, 801) if grid is None else np.asarray(grid, dtype=float)
    ns = np.asarray(list(n_grid), dtype=int)
    out = []
    for n in ns:
        if n == 1:
            diff = np.abs(law.cdf(grid) - invert_cdf(target, grid, cfg))
            out.append(float(diff.max()))
            continue
        s = float(n) ** (-1.0 / alpha)
        om = law.meta.get("one_minus_charfn")
        if om is not None:
            fn = lambda t, n=n, s=s: np.exp(n * np.log1p(-om(np.asarray(t, dtype=float) * s)))
        else:
            fn = lambda t, n=n, s=s: np.asarray(law.charfn(np.asarray(t, dtype=float) * s)) ** n
        out.append(kolmogorov_distance(fn, target, grid, cfg))
    d = np.array(out)
    fit = fit_slope(ns, d) if ns.size > 1 else {}
    return dict(n=ns, dK=d, predicted=-(2.0 / alpha - 1.0), lam=idpareto_scale(alpha), **fit)


# ---------------------------------------------------------------------------
# Truncation kernels
# ---------------------------------------------------------------------------

def kernel_K_nu(nu: LevyMeasure, t, N: float, cfg: QuadratureConfig = DEFAULT_QUAD):
    """``K_ν(t, N)``: ``∫_{[t,N]} u ν(du)`` for ``0 ≤ t ≤ N`` and
    ``∫_{[-N,t]} (-u) ν(du)`` for ``-N ≤ t < 0``, zero outside."""
    def one(x):
        if x > N or x < -N:
            return 0.0
        if x >= 0:
            return nu.integrate(lambda u: u, max(x, 0.0), N, cfg) if x > 0 else \
                nu.integrate(lambda u: u, 0.0, N, cfg)
        return nu.integrate(lambda u: -u, -N, x, cfg)

    t = np.asarray(t, dtype=float)
    out = np.array([one(float(x)) for x in t.ravel()])
    return out.reshape(t.shape) if t.ndim else float(out[0])


def kernel_K(nu: LevyMeasure, t, N: float, cfg: QuadratureConfig = DEFAULT_QUAD):
    """``K_ν(t, N)`` from the closed-form tails ``η_±`` when ν carries them,
    by quadrature (:func:`kernel_K_nu`) otherwise.  Always ``≥ 0``."""
    if nu.tail_plus is None or nu.tail_minus is None:
        return kernel_K_nu(nu, t, N, cfg)
    at_n = sum(N * m for loc, m in nu.atoms if loc == N)
    at_mn = sum(N * m for loc, m in nu.atoms if loc == -N)

    def one(x):
        if x > N or x < -N:
            return 0.0
        if x >= 0:
            return nu.tail_plus_fn(x) - nu.tail_plus_fn(N) + at_n
        return nu.tail_minus_fn(x) - nu.tail_minus_fn(-N) + at_mn

    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.array([one(float(x)) for x in t.ravel()])
    return out.reshape(t.shape) if t.ndim else float(out[0])


def stable_kernel_K(t, N: float, alpha: float, c1: float, c2: float):
    """Closed form of ``K_ν(t, N)`` for ``ν(du) = c_{1,2}|u|^{-1-α}du``, ``1 < α < 2``.

    Positive side ``c1 (t^{1-α} - N^{1-α})/(α-1)``; negative side
    ``c2 (N^{1-α} - |t|^{1-α})/(1-α)``.
    """
    t = np.asarray(t, dtype=float)
    a = np.abs(t)
    with np.errstate(divide="ignore"):
        core = (a ** (1.0 - alpha) - N ** (1.0 - alpha)) / (alpha - 1.0)
    out = np.where(t >= 0, c1 * core, c2 * core)
    return np.where(a <= N, out, 0.0)


def stable_kernel_mass(N: float, alpha: float, c1: float, c2: float) -> float:
    """``∫_{-N}^N K_ν(t,N) dt = (c1 + c2) N^{2-α}/(2-α)``."""
    return (c1 + c2) * N ** (2.0 - alpha) / (2.0 - alpha)


def _law_expect(law, g, lo=-np.inf, hi=np.inf, cfg=DEFAULT_QUAD) -> float:
    """``E[g(Z) 1{lo ≤ Z ≤ hi}]`` for a law with ``atoms`` and ``pdf``."""
    total = sum(p * g(loc) for loc, p in law.atoms if lo <= loc <= hi)
    if law.density is None:
        return total
    a, b = max(lo, law.support[0]), min(hi, law.support[1])
    if a >= b:
        return total
    cuts = sorted({a, b, *[c for c in (0.0, *law.breaks) if a < c < b]})
    dens = lambda z: g(z) * float(law.pdf(np.array([z]))[0])
    for x, y in zip(cuts[:-1], cuts[1:]):
        total += quad(dens, x, y, cfg)
    return total


def kernel_K_k(law, b: float, t, N: float, cfg: QuadratureConfig = DEFAULT_QUAD):
    """``K_k(t,N) = E[W 1{|W| ≤ N}(1{0 ≤ t ≤ W} - 1{W ≤ t ≤ 0})]`` with ``W = b Z``."""
    def one(x):
        if x > N or x < -N:
            return 0.0
        if x >= 0:
            return b * _law_expect(law, lambda z: z, x / b, N / b, cfg)
        return -b * _law_expect(law, lambda z: z, -N / b, x / b, cfg)

    t = np.asarray(t, dtype=float)
    out = np.array([one(float(x)) for x in t.ravel()])
    return out.reshape(t.shape) if t.ndim else float(out[0])


# ---------------------------------------------------------------------------
# Row sums and the six-term bound
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ScipySummand(BiasLaw):
    """A :class:`BiasLaw` whose sampler, CDF and quantile come from a frozen
    ``scipy.stats`` law, so that sharply peaked densities are sampled exactly."""

    dist: object = None

    def sampler(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.asarray(self.dist.rvs(size=n, random_state=rng), dtype=float)

    def cdf(self, x):
        return self.dist.cdf(np.asarray(x, dtype=float))

    def quantile(self, q: float) -> float:
        return float(self.dist.ppf(q))


def summand_from_scipy(dist, name: str = "summand") -> ScipySummand:
    """Wrap a frozen continuous ``scipy.stats`` law as a summand law."""
    lo, hi = dist.support()
    return ScipySummand(name, 1.0, (), density=dist.pdf, support=(float(lo), float(hi)), dist=dist)


@dataclass
class SumScheme:
    """Row sum ``S_n = b_n Σ_{k≤n} Z_{n,k} + c_n``.

    Parameters
    ----------
    summand : law, optional
        Law of ``Z_1`` for iid rows.  Any object with ``atoms``,
        ``density``/``pdf``, ``support``, ``breaks`` and ``sampler``
        (for instance :class:`~idstein.bias_transforms.BiasLaw`).
    b_n, c_n : float
    n : int
    rows : callable, optional
        ``k -> law of Z_{n,k}`` for triangular arrays; overrides
        ``summand``.
    """

    summand: object
    b_n: float
    c_n: float
    n: int
    rows: Optional[Callable] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.b_n > 0:
            raise DomainError("b_n must be positive")
        if self.n < 1:
            raise DomainError("n must be at least 1")

    @property
    def iid(self) -> bool:
        return self.rows is None

    def groups(self):
        """``[(law, multiplicity), ...]`` covering the row."""
        if self.iid:
            return [(self.summand, self.n)]
        return [(self.rows(k), 1) for k in range(self.n)]

    def null_array(self, eps: float) -> float:
        """``max_k P(|b_n Z_{n,k}| > ε)``."""
        out = 0.0
        for law, _ in self.groups():
            inside = _law_expect(law, lambda z: 1.0, -eps / self.b_n, eps / self.b_n)
            out = max(out, 1.0 - inside)
        return out

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        s = np.zeros(size)
        for law, m in self.groups():
            for _ in range(m):
                s += law.sampler(rng, size)
        return self.b_n * s + self.c_n


def gwlt_bound(scheme: SumScheme, target: IDLaw, N: float, variant: str = "finiteVar",
               beta: float | None = None, gamma: float | None = None, C: float = 1.0,
               cfg: QuadratureConfig = DEFAULT_QUAD) -> BoundReport:
    """Six-term upper bound on the smooth Wasserstein distance ``d_{W_2}(S_n, X)``.

    Terms (``W_k = b_n Z_{n,k}``):

    ``centering``
        ``|E X - c_n - b_n Σ E Z_k|``
    ``moment``
        ``(b_n/n) Σ E|Z_k| · ∫|u|ν(du)``; for ``variant="holder"`` it is
        ``C (b_n^{q}/n) Σ E|Z_k|^{q}`` with ``q = β/(β+γ)``.
    ``product``
        ``½ b_n² Σ |E Z_k| E|Z_k|``
    ``nu_tail``
        ``2 ∫_{|u|>N} |u| ν(du)``
    ``summand_tail``
        ``2 b_n Σ E|Z_k| 1{|W_k| > N}``
    ``kernel``
        ``½ Σ ∫_{-N}^{N} |K_ν(t,N)/n - K_k(t,N)| dt``

    For stable targets ``β = 2 - α`` and ``γ = α - 1`` by default.
    """
    if not target.self_decomposable:
        raise AssumptionViolated(f"{target.name} is not self-decomposable")
    if not np.isfinite(target.mean):
        raise AssumptionViolated("target needs a finite mean")
    try:
        nu = target.nu
    except RepresentationUnavailable as exc:
        raise AssumptionViolated(str(exc)) from None
    b, n = scheme.b_n, scheme.n
    groups = scheme.groups()

    ez = [(_law_expect(law, lambda z: z, cfg=cfg), _law_expect(law, abs, cfg=cfg), m)
          for law, m in groups]
    sum_ez = sum(m * e for e, _, m in ez)
    sum_abs = sum(m * a for _, a, m in ez)
    params = dict(variant=variant, N=N, n=n, b_n=b, c_n=scheme.c_n)

    if variant == "finiteVar":
        absm = nu.abs_moment_small + nu.abs_moment_tail
        if not np.isfinite(absm):
            raise AssumptionViolated("∫|u|ν is infinite; use variant='holder'")
        moment = b / n * sum_abs * absm
    elif variant == "holder":
        if beta is None or gamma is None:
            al = _stable_alpha(target)
            beta, gamma = 2.0 - al, al - 1.0
        q = beta / (beta + gamma)
        moment = C * b ** q / n * sum(m * _law_expect(law, lambda z: abs(z) ** q, cfg=cfg)
                                       for law, m in groups)
        params.update(beta=beta, gamma=gamma, q=q, C=C)
    else:
        raise DomainError(f"unknown variant {variant!r}")

    k_nu = lambda t: kernel_K(nu, t, N, cfg)

    kernel = 0.0
    for law, m in groups:
        k_k = lambda t, law=law: kernel_K_k(law, b, t, N, cfg)
        g = lambda t: abs(k_nu(t) / n - k_k(t))
        pts = {0.0, -N, N}
        j = b
        while j < N:
            pts |= {j, -j}
            j *= 2.0
        pts |= {b * loc for loc, _ in law.atoms if -N < b * loc < N}
        pts |= {loc for loc, _ in nu.atoms if -N < loc < N}
        pts = sorted(pts)
        kernel += m * sum(quad(g, x, y, cfg) for x, y in zip(pts[:-1], pts[1:]))

    terms = dict(
        centering=abs(target.mean - scheme.c_n - b * sum_ez),
        moment=moment,
        product=0.5 * b * b * sum(m * abs(e) * a for e, a, m in ez),
        nu_tail=2.0 * (nu.integrate(abs, N, np.inf, cfg) + nu.integrate(abs, -np.inf, -N, cfg)
                       - sum(abs(loc) * w for loc, w in nu.atoms if abs(loc) == N)),
        summand_tail=2.0 * b * sum(
            m * (_law_expect(law, abs, N / b, np.inf, cfg) + _law_expect(law, abs, -np.inf, -N / b, cfg)
                 - sum(abs(loc) * w for loc, w in law.atoms if abs(b * loc) == N))
            for law, m in groups),
        kernel=0.5 * kernel,
    )
    return BoundReport(terms, params)


def dw2_lower_estimate(scheme: SumScheme, target: IDLaw, n_samples: int = 10 ** 5,
                       seed: int = 0) -> dict:
    """Monte Carlo lower estimate of ``d_{W_2}(S_n, X)``.

    Maximises ``|mean h(S_n) - mean h(X)|`` over the C² dictionary (all
    functions have ``|h|, |h'|, |h''| ≤ 1``).
    """
    s = scheme.sample(rng_stream(seed, 20, 0), n_samples)
    x = target.sampler(rng_stream(seed, 21, 0), n_samples)
    best = dict(value=0.0, stderr=0.0, name=None)
    for h in c2_dictionary():
        a, c = h(s), h(x)
        diff = abs(a.mean() - c.mean())
        if diff > best["value"]:
            se = math.sqrt(a.var(ddof=1) / n_samples + c.var(ddof=1) / n_samples)
            best = dict(value=float(diff), stderr=se, name=h.name)
    return best
