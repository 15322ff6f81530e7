"""Ornstein-Uhlenbeck type semigroup of a self-decomposable law and the
solution of the associated Stein equation.

For a self-decomposable target ``X`` the semigroup acts by

.. math:: P_t h(x) = \\mathbb E\\, h(e^{-t}x + Y_t),\\qquad
          \\mathbb E e^{iξY_t} = φ(ξ)/φ(e^{-t}ξ),

and the Stein equation

.. math:: (\\mathbb E X - x) f'(x) + \\int (f'(x+u) - f'(x))\\,u\\,ν(du) = h(x) - \\mathbb E h(X)

is solved by ``f_h = -∫_0^∞ (P_t h - E h(X)) dt``.  Test functions are
Gaussian bumps (or sums of them) so that every ``P_t h`` is a Fourier
integral against an entire transform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import stats

from .approx_bounds import kernel_K, law_log_charfn
from .errors import (AssumptionViolated, FitFailure, GridTooCoarse, NearZeroModulus,
                     NoMuTSampler, TailBudgetExceeded)
from .io import write_table
from .levy_core import IDLaw, LevyMeasure, rng_stream
from .quadrature import DEFAULT_QUAD, QuadratureConfig, panel_rule
from .stein_ops import TestFunction

__all__ = ["SemigroupTarget", "FourierTest", "SteinSolution", "bump", "constant",
           "pt_apply", "pt_as_test", "expectation", "generator_apply", "solve_stein",
           "stein_residual", "kernel_K", "holder_exponent", "mu_t_w1"]


# ---------------------------------------------------------------------------
# Targets
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SemigroupTarget:
    """A self-decomposable law with its semigroup ingredients.

    Attributes
    ----------
    law : IDLaw
    log_charfn : callable, optional
        Distinguished logarithm of ``φ``; keeps the ratio finite where
        ``φ`` underflows.
    """

    law: IDLaw
    log_charfn: Optional[Callable] = None

    @classmethod
    def from_law(cls, law: IDLaw) -> "SemigroupTarget":
        if not law.self_decomposable:
            raise AssumptionViolated(f"{law.name} is not self-decomposable")
        return cls(law, law_log_charfn(law))

    @property
    def mean(self) -> float:
        return float(self.law.mean)

    def ratio_charfn(self, xi, time: float):
        """``φ(ξ)/φ(e^{-time} ξ)``, the characteristic function of ``Y_time``."""
        xi = np.asarray(xi, dtype=float)
        if time == 0:
            return np.ones_like(xi, dtype=complex)
        if self.log_charfn is not None:
            return np.exp(self.log_charfn(xi) - self.log_charfn(math.exp(-time) * xi))
        num = np.asarray(self.law.charfn(xi), dtype=complex)
        den = np.asarray(self.law.charfn(math.exp(-time) * xi), dtype=complex)
        if np.any(np.abs(den) < 1e-300):
            raise NearZeroModulus("φ(e^{-t}ξ) underflows; supply a log characteristic function")
        return num / den

    def mu_t_levy(self, u, time: float):
        """Lévy density ``(ψ(u) - ψ(e^{time} u))/|u|`` of ``Y_time``."""
        psi = self.law.nu.k_function
        if psi is None:
            raise NoMuTSampler(f"{self.law.name}: no k-function")
        u = np.asarray(u, dtype=float)
        return (psi(u) - psi(math.exp(time) * u)) / np.abs(u)

    def mu_t_sampler(self, time: float) -> Callable:
        """``(rng, n) -> draws of Y_time``.

        Exact for gamma (compound Poisson with rate ``α t`` and jumps
        ``Exp(β e^{s})``, ``s ~ U(0, t)``) and for stable laws (a rescaled
        copy of the target plus the deterministic shift).

        Raises
        ------
        NoMuTSampler
        """
        law, t = self.law, float(time)
        if law.name == "gamma":
            a, b = law.params["alpha"], law.params["beta"]

            def draw(rng, n):
                k = rng.poisson(a * t, n)
                s = rng.uniform(0.0, t, k.sum())
                jumps = rng.exponential(1.0 / (b * np.exp(s)))
                idx = np.repeat(np.arange(n), k)
                return np.bincount(idx, weights=jumps, minlength=n)
            return draw
        if law.name in ("stable", "sas"):
            al = float(law.params["alpha"])
            scale = (1.0 - math.exp(-al * t)) ** (1.0 / al)
            shift = (1.0 - math.exp(-t) - scale) * self.mean

            def draw(rng, n):
                return scale * law.sampler(rng, n) + shift
            return draw
        raise NoMuTSampler(f"no sampler for the semigroup laws of {law.name}")


# ---------------------------------------------------------------------------
# Fourier-representable test functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FourierTest:
    """``h = const + (1/2π)∫ ĥ(ξ) e^{iξx} dξ`` with ``ĥ`` negligible beyond ``width``.

    Attributes
    ----------
    hat : callable
        Vectorised ``ξ -> ĥ(ξ)``.
    width : float
        ``|ĥ(ξ)|`` is below ``1e-17`` relative for ``|ξ| > width``.
    reach : float
        ``h - const`` is negligible outside ``[-reach, reach]``; sets the
        oscillation scale of ``ĥ``.
    const : float
    test : TestFunction, optional
        The same function in space, with derivatives.
    """

    hat: Callable
    width: float
    reach: float
    const: float = 0.0
    test: Optional[TestFunction] = None
    name: str = "h"

    def __call__(self, x):
        if self.test is None:
            raise AssumptionViolated(f"{self.name}: no spatial form")
        return self.test(x)


def _bump_parts(terms):
    def f(x, k=0):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for a, m, s in terms:
            z = (x - m) / s
            e = a * np.exp(-0.5 * z * z)
            poly = (1.0, -z / s, (z * z - 1.0) / s ** 2, (3.0 * z - z ** 3) / s ** 3)[k]
            out = out + poly * e
        return out
    return f


def bump(m: float = 0.0, s: float = 1.0, amp: float = 1.0, terms=None) -> FourierTest:
    """Gaussian bump ``amp·exp(-(x-m)²/(2s²))`` or a sum of ``(amp, m, s)`` terms.

    A single bump with ``amp ≤ 1`` and ``s ≥ 1`` has ``|h|, |h'|, |h''| ≤ 1``.
    """
    terms = tuple(terms) if terms is not None else ((amp, m, s),)

    def hat(xi):
        xi = np.asarray(xi, dtype=float)
        out = np.zeros_like(xi, dtype=complex)
        for a, mm, ss in terms:
            out = out + a * ss * math.sqrt(2 * math.pi) * np.exp(-0.5 * (ss * xi) ** 2 - 1j * mm * xi)
        return out

    part = _bump_parts(terms)
    smin = min(s for _, _, s in terms)
    sup = sum(abs(a) for a, _, _ in terms)
    lip = sum(abs(a) * math.exp(-0.5) / s for a, _, s in terms)
    sec = sum(abs(a) / s ** 2 for a, _, s in terms)
    name = "+".join(f"{a}*bump({m},{s})" for a, m, s in terms)
    tf = TestFunction(part, lip, sup, lambda x: part(x, 1), lambda x: part(x, 2), name=name,
                      second_bound=sec, third_derivative=lambda x: part(x, 3))
    reach = max(abs(m) for _, m, _ in terms) + 1.0
    return FourierTest(hat, 9.0 / smin, reach, 0.0, tf, name)


def constant(c: float) -> FourierTest:
    tf = TestFunction(lambda x: np.full_like(np.asarray(x, dtype=float), c), 0.0, abs(c),
                      lambda x: np.zeros_like(np.asarray(x, dtype=float)),
                      lambda x: np.zeros_like(np.asarray(x, dtype=float)), name=f"const({c})",
                      second_bound=0.0, third_derivative=lambda x: np.zeros_like(np.asarray(x, dtype=float)))
    return FourierTest(lambda xi: np.zeros_like(np.asarray(xi, dtype=float), dtype=complex),
                       0.0, 0.0, float(c), tf, f"const({c})")


def _xi_rule(h: FourierTest, zmax: float, order: int = 16):
    if h.width == 0:
        return np.empty(0), np.empty(0)
    width = min(0.25, 2.0 / (zmax + h.reach + 1.0))
    n = int(math.ceil(h.width / width))
    edges = np.concatenate([-np.linspace(h.width, 0.0, n + 1)[:-1], np.linspace(0.0, h.width, n + 1)])
    return panel_rule(edges, order)


def pt_apply(target: SemigroupTarget, h, x, t: float, method: str = "fourier",
             n: int = 10 ** 5, seed: int = 0):
    """``P_t h(x)``.

    Parameters
    ----------
    h : FourierTest or TestFunction
        Fourier route needs a :class:`FourierTest`; the Monte Carlo route
        (``method="mc"``) accepts any vectorised function.
    method : {"fourier", "mc"}

    Raises
    ------
    NoMuTSampler
        Monte Carlo route for a law without a ``Y_t`` sampler.
    """
    x = np.asarray(x, dtype=float)
    if method == "mc":
        y = target.mu_t_sampler(t)(rng_stream(seed, 30, 0), n)
        out = np.array([np.mean(h(math.exp(-t) * xx + y)) for xx in x.ravel()])
        return out.reshape(x.shape) if x.ndim else float(out[0])
    if not isinstance(h, FourierTest):
        raise NoMuTSampler("the Fourier route needs a FourierTest")
    if t == 0 and h.test is not None:
        return h.test(x) if x.ndim else float(h.test(x))
    z = math.exp(-t) * x.ravel()
    xi, w = _xi_rule(h, float(np.max(np.abs(z), initial=0.0)))
    if xi.size == 0:
        out = np.full(z.shape, h.const)
    else:
        spec = w * h.hat(xi) * target.ratio_charfn(xi, t)
        out = h.const + np.array([(np.exp(1j * xi * zz) * spec).sum().real for zz in z]) / (2 * math.pi)
    return out.reshape(x.shape) if x.ndim else float(out[0])


def pt_as_test(target: SemigroupTarget, h: FourierTest, t: float) -> FourierTest:
    """``P_t h`` as a :class:`FourierTest`: ``ĥ_t(η) = e^t ĥ(e^t η) r_t(e^t η)``."""
    et = math.exp(t)
    return FourierTest(lambda eta: et * h.hat(et * np.asarray(eta)) * target.ratio_charfn(et * np.asarray(eta), t),
                       h.width / et, h.reach, h.const, None, f"P_{t}({h.name})")


def expectation(target: SemigroupTarget, h: FourierTest) -> float:
    """``E h(X) = const + (1/2π)∫ ĥ(ξ) φ(ξ) dξ``."""
    xi, w = _xi_rule(h, 0.0)
    if xi.size == 0:
        return h.const
    phi = np.exp(target.log_charfn(xi)) if target.log_charfn else np.asarray(target.law.charfn(xi))
    return h.const + float((w * h.hat(xi) * phi).sum().real) / (2 * math.pi)


def generator_apply(target: SemigroupTarget, f: TestFunction, x, cfg: QuadratureConfig = DEFAULT_QUAD):
    """``(E X - x) f'(x) + ∫ (f'(x+u) - f'(x)) u ν(du)`` by adaptive quadrature."""
    if f.derivative is None:
        raise AssumptionViolated(f"{f.name}: needs a derivative")
    nu = target.law.nu
    if not np.isfinite(nu.abs_moment_tail):
        raise AssumptionViolated("∫_{|u|>1}|u|ν(du) is infinite")
    d1 = lambda y: float(f.derivative(np.array([y]))[0])
    x = np.asarray(x, dtype=float)
    out = []
    for xx in x.ravel():
        fx = d1(xx)
        out.append((target.mean - xx) * fx + nu.integrate(lambda u: (d1(xx + u) - fx) * u, cfg=cfg))
    out = np.array(out)
    return out.reshape(x.shape) if x.ndim else float(out[0])


# ---------------------------------------------------------------------------
# Distance of the semigroup laws to the target
# ---------------------------------------------------------------------------

def mu_t_w1(target: SemigroupTarget, t: float, n: int = 4 * 10 ** 5, seed: int = 0) -> float:
    """``W_1(μ_t, μ_X)`` where ``μ_t`` is the law of ``Y_t``.

    Closed form for symmetric stable targets (a scale change plus the
    mean shift).  Otherwise the empirical distance between ``n`` exact
    draws of ``Y_t`` and of ``X`` (statistical error of order
    ``n^{-1/2}``); the characteristic function of ``μ_t`` decays too
    slowly for Fourier inversion when ``μ_t`` has an atom.
    """
    law = target.law
    if law.name == "sas" or (law.name == "stable" and law.params["c1"] == law.params["c2"]):
        al = float(law.params["alpha"])
        e_abs = 2.0 * law.meta["scale"] * math.gamma(1.0 - 1.0 / al) / math.pi
        scale = (1.0 - math.exp(-al * t)) ** (1.0 / al)
        return e_abs * (1.0 - scale) + abs(target.mean) * math.exp(-t)
    y = target.mu_t_sampler(t)(rng_stream(seed, 31, 0), n)
    x = law.sampler(rng_stream(seed, 32, 0), n)
    return float(stats.wasserstein_distance(y, x))


# ---------------------------------------------------------------------------
# Stein solution
# ---------------------------------------------------------------------------

def _hermite(z0, dz, y, dy, q):
    """Cubic Hermite interpolation on a uniform grid."""
    pos = (q - z0) / dz
    i = np.clip(np.floor(pos).astype(int), 0, y.size - 2)
    s = pos - i
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y[i] + h10 * dz * dy[i] + h01 * y[i + 1] + h11 * dz * dy[i + 1]


def _time_rule(t0: float, ratio: float, T: float, order: int = 6):
    edges = np.concatenate([[0.0], t0 * ratio ** np.arange(int(math.ceil(math.log(T / t0) / math.log(ratio))) + 1)])
    edges[-1] = max(edges[-1], T)
    return panel_rule(edges, order)


@dataclass(frozen=True, eq=False)
class SteinSolution:
    """Tabulated solution of the Stein equation.

    Attributes
    ----------
    x : ndarray
        Uniform grid.
    f, f_prime, f_second : ndarray
        ``f_h``, ``f_h'`` and ``f_h''`` on ``x``.
    time_truncation : float
        ``T*`` of the time integral.
    tail_bound : float
        Bound on the neglected ``∫_{T*}^∞`` part at ``|x| = 1``.
    mean_h : float
        ``E h(X)``.
    """

    target: SemigroupTarget
    h: FourierTest
    x: np.ndarray
    f: np.ndarray
    f_prime: np.ndarray
    f_second: np.ndarray
    time_truncation: float
    tail_bound: float
    mean_h: float
    meta: dict = field(default_factory=dict)

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    def fprime(self, y):
        """``f_h'`` anywhere: Hermite inside the table, ``c/|y|`` decay outside."""
        y = np.asarray(y, dtype=float)
        lo, hi = self.x[0], self.x[-1]
        inside = _hermite(lo, self.dx, self.f_prime, self.f_second, np.clip(y, lo, hi))
        with np.errstate(divide="ignore", invalid="ignore"):
            right = self.f_prime[-1] * hi / y
            left = self.f_prime[0] * lo / y
        return np.where(y > hi, right, np.where(y < lo, left, inside))

    def to_csv(self, path, grid=None):
        grid = np.linspace(-5.0, 5.0, 201) if grid is None else np.asarray(grid, dtype=float)
        f = _hermite(self.x[0], self.dx, self.f, self.f_prime, grid)
        res = stein_residual(self, grid, pointwise=True)
        meta = dict(h=self.h.name, target=repr(self.target.law), time_truncation=self.time_truncation,
                    tail_bound=self.tail_bound, mean_h=self.mean_h, **self.meta)
        return write_table(path, dict(x=grid, f_h=f, f_h_prime=self.fprime(grid), residual=res), meta)


def _tail_constant(target: SemigroupTarget) -> float:
    return 3.0 * math.exp(1.0 / 3.0) * mu_t_w1(target, 1.0)


def solve_stein(target: SemigroupTarget, h: FourierTest, dz: float = 0.02, size: int = 2 ** 18,
                t0: float = 1e-3, ratio: float = 1.15, budget: float = 1e-6,
                t_cap: float = 120.0, order: int = 6) -> SteinSolution:
    """Solve the Stein equation for ``h`` by time quadrature of the semigroup.

    ``P_t h^{(k)}`` is computed for ``k = 0..3`` on a uniform grid by FFT,
    evaluated at ``e^{-t}x`` by cubic Hermite interpolation, and
    integrated in time by Gauss-Legendre panels on a geometric grid from
    ``t0``.  ``T*`` makes the bound ``3 C e^{-T*/3}`` on the neglected
    tail smaller than ``budget``, where ``C`` is three times
    ``e^{1/3} W_1(μ_1, μ_X)``.

    Raises
    ------
    TailBudgetExceeded
        If ``T*`` would exceed ``t_cap``.
    """
    if not np.isfinite(target.mean):
        raise AssumptionViolated("target needs a finite mean")
    mean_h = expectation(target, h)
    if h.width == 0:
        x = (np.arange(size) - size // 2) * dz
        zero = np.zeros(size)
        return SteinSolution(target, h, x, zero, zero.copy(), zero.copy(), 0.0, 0.0, mean_h)
    C = _tail_constant(target)
    T = 3.0 * math.log(max(3.0 * C / budget, 1.0))
    if T > t_cap:
        raise TailBudgetExceeded(f"time truncation {T:.1f} exceeds the cap {t_cap}")
    T = max(T, 30.0)
    z = (np.arange(size) - size // 2) * dz
    xi = 2.0 * math.pi * (np.arange(size) - size // 2) / (size * dz)
    dxi = xi[1] - xi[0]
    hat = h.hat(xi)
    keep = np.abs(z) <= 0.5 * z[-1]
    x = z[keep]
    f, f1, f2 = np.zeros(x.size), np.zeros(x.size), np.zeros(x.size)
    ts, ws = _time_rule(t0, ratio, T, order)
    ik = [np.ones_like(xi), 1j * xi, -(xi ** 2), -1j * xi ** 3, xi ** 4]
    for t, w in zip(ts, ws):
        spec = hat * target.ratio_charfn(xi, t)
        G = [np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(spec * m))).real * size * dxi / (2 * math.pi)
             for m in ik]
        q = math.exp(-t) * x
        f -= w * (_hermite(z[0], dz, G[0], G[1], q) - (mean_h - h.const))
        f1 -= w * math.exp(-t) * _hermite(z[0], dz, G[1], G[2], q)
        f2 -= w * math.exp(-2 * t) * _hermite(z[0], dz, G[2], G[3], q)
    tail = math.exp(-T) + 3.0 * C * math.exp(-T / 3.0)
    return SteinSolution(target, h, x, f, f1, f2, T, tail, mean_h,
                         meta=dict(C=C, dz=dz, size=size, t0=t0, ratio=ratio, nodes=int(ts.size)))


def stein_residual(solution: SteinSolution, grid, pointwise: bool = False):
    """Residual of the Stein equation on ``grid``.

    .. math:: |(E X - x) f_h'(x) + ∫ (f_h'(x+u) - f_h'(x)) u ν(du) - h(x) + E h(X)|

    The non-local term uses the fixed Gauss-Legendre rule of ν plus its
    atoms.  Returns the maximum, or the signed values when ``pointwise``.

    Raises
    ------
    GridTooCoarse
        When ``grid`` leaves the tabulated range.
    """
    grid = np.asarray(grid, dtype=float)
    sol = solution
    if grid.min() < sol.x[0] or grid.max() > sol.x[-1]:
        raise GridTooCoarse("evaluation grid leaves the tabulated range")
    nu = sol.target.law.nu
    u, w = nu.rule
    if nu.atoms:
        u = np.concatenate([u, [loc for loc, _ in nu.atoms]])
        w = np.concatenate([w, [m for _, m in nu.atoms]])
    fx = sol.fprime(grid)
    nonlocal_ = np.array([np.sum(w * u * (sol.fprime(g + u) - f0)) for g, f0 in zip(grid, fx)])
    h = sol.h.test(grid) if sol.h.test is not None else np.full(grid.shape, sol.h.const)
    res = (sol.target.mean - grid) * fx + nonlocal_ - h + sol.mean_h
    return res if pointwise else float(np.max(np.abs(res)))


# ---------------------------------------------------------------------------
# Regularity of the non-local part
# ---------------------------------------------------------------------------

def holder_exponent(nu: LevyMeasure, small=np.geomspace(1e-4, 1e-1, 13),
                    large=np.geomspace(10.0, 1e3, 13), tol: float = 0.05) -> dict:
    """Regularity class of the non-local operator.

    Lipschitz (``case="finite"``, exponent 1) when ``∫_{|u|≤1}|u|ν`` is
    finite.  Otherwise ``γ`` is fitted from ``∫_{|u|>R}|u|ν ≈ C_1 R^{-γ}``
    on ``large`` and ``β`` from ``∫_{|u|≤R}u²ν ≈ C_2 R^β`` on ``small``;
    the exponent is ``β/(β+γ)``.

    Raises
    ------
    FitFailure
        If either power law does not fit within ``tol`` in log scale or
        an exponent is not positive.
    """
    if np.isfinite(nu.abs_moment_small):
        return dict(case="finite", exponent=1.0)
    tails = np.array([nu.tail_plus_fn(R) + nu.tail_minus_fn(-R) for R in large])
    balls = np.array([nu.integrate(lambda u: u * u, -R, R) for R in small])

    def fit(r, v):
        A = np.vstack([np.log(r), np.ones_like(r)]).T
        coef, *_ = np.linalg.lstsq(A, np.log(v), rcond=None)
        err = float(np.max(np.abs(A @ coef - np.log(v))))
        return float(coef[0]), float(math.exp(coef[1])), err

    gslope, C1, e1 = fit(large, tails)
    beta, C2, e2 = fit(small, balls)
    gamma = -gslope
    if max(e1, e2) > tol or gamma <= 0 or beta <= 0:
        raise FitFailure("tail or small-ball moments are not power laws on the fitting ranges")
    return dict(case="holder", exponent=beta / (beta + gamma), beta=beta, gamma=gamma, C1=C1, C2=C2)
