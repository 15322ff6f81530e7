"""Comparing laws through their characteristic functions.

Gil-Pelaez CDF inversion, Kolmogorov and Wasserstein-1 distances, the
generalised Dawson functional and Esseen-type smoothing bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .errors import (DomainError, NearZeroModulus, QuadratureFailure, SlowDecay,
                     TailDivergence)
from .io import write_table
from .levy_core import IDLaw
from .quadrature import DEFAULT_QUAD, QuadratureConfig, gauss_legendre, quad

__all__ = [
    "CharFnGrid", "BoundReport", "ESSEEN_C1", "ESSEEN_C2", "MOLLIFIER_C",
    "invert_cdf", "gil_pelaez", "law_cdf", "kolmogorov_distance", "kolmogorov_report",
    "w1_distance", "dawson_functional", "dawson_envelope", "law_log_modulus", "esseen_bound",
    "esseen_optimal_T", "smoothing_transfers",
]

ESSEEN_C1 = 1.0 / math.pi
ESSEEN_C2 = 24.0 / math.pi
# Gaussian mollifier: ||h - h_eps|| <= eps and ||h_eps''|| <= MOLLIFIER_C / eps
MOLLIFIER_C = 2.0 / math.pi


# ---------------------------------------------------------------------------
# Containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CharFnGrid:
    """Characteristic-function values on a grid symmetric about 0."""

    ts: np.ndarray
    values: np.ndarray
    source: str = ""

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        vals = np.asarray(self.values, dtype=complex)
        if ts.shape != vals.shape or ts.ndim != 1:
            raise DomainError("ts and values must be 1-d arrays of equal length")
        if np.any(np.diff(ts) <= 0) or not np.allclose(ts, -ts[::-1], rtol=0, atol=1e-12):
            raise DomainError("ts must be increasing and symmetric about 0")
        if np.max(np.abs(vals - np.conj(vals[::-1]))) > 1e-10:
            raise DomainError("values violate Hermitian symmetry")
        zero = np.flatnonzero(ts == 0)
        if zero.size and abs(vals[zero[0]] - 1) > 1e-10:
            raise DomainError("value at t = 0 must be 1")
        object.__setattr__(self, "ts", ts)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_charfn(cls, charfn: Callable, T: float, n: int = 2001, source: str = ""):
        ts = np.linspace(-T, T, n)
        half = np.asarray(charfn(ts[n // 2:]), dtype=complex)
        vals = np.concatenate([np.conj(half[1:][::-1]) if n % 2 else np.conj(half[::-1]), half])
        if n % 2:
            vals[n // 2] = 1.0
        return cls(ts, vals, source)

    def to_csv(self, path):
        return write_table(path, dict(t=self.ts, re=self.values.real, im=self.values.imag),
                           dict(source=self.source))


@dataclass(eq=False)
class BoundReport:
    """Named nonnegative terms of an upper bound; ``total`` is their sum."""

    terms: dict
    params: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def total(self) -> float:
        return float(sum(self.terms.values()))

    def as_dict(self):
        return dict(terms=dict(self.terms), params=dict(self.params), total=self.total,
                    notes=list(self.notes))


# ---------------------------------------------------------------------------
# Gil-Pelaez inversion
# ---------------------------------------------------------------------------

_GP_ORDER = 16


def _decay_point(fn, tol: float, t_max: float, t_min: float = 1.0):
    """Smallest probe ``T`` after which ``|fn(t)| / t < tol`` on a geometric probe grid."""
    probes = np.geomspace(1e-3, t_max, 600)
    mags = np.abs(np.asarray(fn(probes), dtype=complex)) / probes
    bad = np.flatnonzero(mags >= tol)
    if bad.size and bad[-1] == probes.size - 1:
        raise SlowDecay(f"|φ(t)|/t is still {mags[-1]:.3g} at t = {t_max}")
    T = probes[bad[-1] + 1] if bad.size else probes[0]
    return max(float(T), t_min)


def _gp_nodes(T: float, xmax: float):
    """Gauss-Legendre nodes on (0, T), resolving oscillation at frequency ``xmax``."""
    width = min(0.5, 0.5 * math.pi / max(1.0, xmax))
    x, w = gauss_legendre(_GP_ORDER)
    first = np.geomspace(1e-12, width, 40)
    edges = np.concatenate([[0.0], first, np.arange(2, int(math.ceil(T / width)) + 1) * width])
    lo, hi = edges[:-1, None], edges[1:, None]
    return (lo + (hi - lo) * x).ravel(), ((hi - lo) * w).ravel()


@dataclass(eq=False)
class _Inversion:
    """Cached charfn values on Gil-Pelaez nodes; evaluates ``∫ Im(e^{-itx}g(t))/t dt``."""

    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    truncation: float

    @classmethod
    def build(cls, fn, xmax, cfg, tol):
        T = _decay_point(fn, tol, cfg.t_max)
        t, w = _gp_nodes(T, xmax)
        vals = np.asarray(fn(t), dtype=complex)
        # truncation estimate: ∫_T^{2T} |g|/t
        tt, ww = _gp_nodes(T, 1.0)
        tt = T + tt[tt < T]
        ww = ww[: tt.size]
        trunc = float(np.sum(ww * np.abs(np.asarray(fn(tt), dtype=complex)) / tt)) / math.pi
        return cls(t, w, vals / t, trunc)

    def integral(self, x, chunk: int = 256):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty(x.size)
        for s in range(0, x.size, chunk):
            ph = np.exp(-1j * np.outer(x[s:s + chunk], self.nodes))
            out[s:s + chunk] = (ph * self.values).imag @ self.weights
        return out


def gil_pelaez(charfn: Callable, x, cfg: QuadratureConfig = DEFAULT_QUAD,
               atoms=(), tol: float = 1e-13) -> dict:
    """Gil-Pelaez inversion with diagnostics.

    Returns
    -------
    dict
        ``cdf`` (array), ``truncation`` (estimated contribution of the
        neglected tail ``t > T``) and ``T``.
    """
    x = np.asarray(x, dtype=float)
    atom_mass = sum(p for _, p in atoms)

    def g(t):
        val = np.asarray(charfn(t), dtype=complex)
        for loc, p in atoms:
            val = val - p * np.exp(1j * loc * np.asarray(t))
        return val

    inv = _Inversion.build(g, float(np.max(np.abs(x))) if x.size else 1.0, cfg, tol)
    F = 0.5 * (1.0 - atom_mass) - inv.integral(x.ravel()) / math.pi
    for loc, p in atoms:
        F = F + np.where(x.ravel() >= loc, p, 0.0)
    return dict(cdf=np.clip(F, 0.0, 1.0).reshape(x.shape), truncation=inv.truncation,
                T=float(inv.nodes[-1]))


def invert_cdf(charfn: Callable, x, quad_cfg: QuadratureConfig = DEFAULT_QUAD,
               atoms=(), tol: float = 1e-13):
    """CDF at ``x`` from the characteristic function.

    Uses :math:`F(x) = \\tfrac12 - \\tfrac1\\pi\\int_0^\\infty
    \\mathrm{Im}(e^{-itx}\\varphi(t))/t\\,dt`; known atoms of the law are
    removed from ``φ`` first and added back as jumps.

    Raises
    ------
    SlowDecay
        If ``|φ(t)|/t`` has not fallen below ``tol`` by ``quad_cfg.t_max``.

    Examples
    --------
    >>> float(invert_cdf(lambda t: np.exp(-np.abs(t)), 1.0))  # Cauchy
    0.75
    """
    out = gil_pelaez(charfn, x, quad_cfg, atoms, tol)["cdf"]
    return float(out) if np.ndim(x) == 0 else out


def law_cdf(law: IDLaw, cfg: QuadratureConfig = DEFAULT_QUAD) -> Callable:
    """Closed-form CDF when available, otherwise Gil-Pelaez inversion."""
    if law.cdf is not None:
        return law.cdf
    if law.pmf is not None:
        def cdf(x):
            x = np.asarray(x, dtype=float)
            top = int(np.ceil(np.max(x))) if x.size else 0
            k = np.arange(min(0, top), max(top, 0) + 1, dtype=float)
            cum = np.cumsum(law.pmf(k))
            idx = np.clip(np.floor(x) - k[0], -1, k.size - 1).astype(int)
            return np.where(idx >= 0, cum[np.maximum(idx, 0)], 0.0)
        return cdf
    return lambda x: invert_cdf(law.charfn, x, cfg, law.law_atoms)


# ---------------------------------------------------------------------------
# Kolmogorov distance
# ---------------------------------------------------------------------------

def kolmogorov_report(charfn_a: Callable, charfn_b: Callable, grid=None,
                      cfg: QuadratureConfig = DEFAULT_QUAD, tol: float = 1e-13,
                      atoms_a=(), atoms_b=()) -> dict:
    """:math:`\\sup_x |F_a(x) - F_b(x)|` from the two characteristic functions.

    The difference of CDFs is inverted directly from ``φ_a - φ_b``.  The
    supremum is taken over ``grid`` and then refined by bounded Brent
    search around the three largest local maxima.

    Parameters
    ----------
    atoms_a, atoms_b : sequence of (location, mass)
        Point masses of either law.  Their Fourier terms are removed
        before inversion and the jumps added back exactly; left limits at
        the atoms are included in the supremum.

    Returns
    -------
    dict
        ``value``, ``argmax``, ``grid_error`` (gain from refinement) and
        ``truncation``.
    """
    grid = np.linspace(-10.0, 10.0, 801) if grid is None else np.asarray(grid, dtype=float)
    atoms_a, atoms_b = tuple(atoms_a), tuple(atoms_b)
    signed = [(loc, p) for loc, p in atoms_a] + [(loc, -p) for loc, p in atoms_b]
    m = sum(p for _, p in signed)

    def diff(t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(charfn_a(t), dtype=complex) - np.asarray(charfn_b(t), dtype=complex)
        for loc, p in signed:
            out = out - p * np.exp(1j * loc * t)
        return out

    inv = _Inversion.build(diff, float(np.max(np.abs(grid))) + 1.0, cfg, tol)

    def signed_D(x, left=False):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        jump = np.zeros_like(x)
        for loc, p in signed:
            jump += p * ((x > loc) if left else (x >= loc))
        return -0.5 * m - inv.integral(x) / math.pi + jump

    D = lambda x: np.abs(signed_D(x))
    vals = D(grid)
    coarse = float(vals.max())
    best, where = coarse, float(grid[int(np.argmax(vals))])
    for loc, _ in signed:
        v = float(np.abs(signed_D(loc, left=True))[0])
        if v > best:
            best, where = v, float(loc)
    peaks = [i for i in range(vals.size)
             if vals[i] >= vals[max(i - 1, 0)] and vals[i] >= vals[min(i + 1, vals.size - 1)]]
    peaks = sorted(peaks, key=lambda i: -vals[i])[:3]
    for i in peaks:
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
        if hi <= lo:
            continue
        res = optimize.minimize_scalar(lambda z: -D(np.array([z]))[0], bounds=(lo, hi),
                                       method="bounded", options=dict(xatol=1e-10))
        if -res.fun > best:
            best, where = float(-res.fun), float(res.x)
    return dict(value=best, argmax=where, grid_error=best - coarse, truncation=inv.truncation)


def kolmogorov_distance(charfn_a: Callable, charfn_b: Callable, grid=None,
                        cfg: QuadratureConfig = DEFAULT_QUAD, tol: float = 1e-13,
                        atoms_a=(), atoms_b=()) -> float:
    """Kolmogorov distance between two laws given by their characteristic functions.

    See :func:`kolmogorov_report` for the diagnostics.
    """
    return kolmogorov_report(charfn_a, charfn_b, grid, cfg, tol, atoms_a, atoms_b)["value"]


# ---------------------------------------------------------------------------
# Wasserstein-1
# ---------------------------------------------------------------------------

def w1_distance(cdf_a: Callable, cdf_b: Callable, cfg: QuadratureConfig = DEFAULT_QUAD,
                points=(), center: float = 0.0) -> float:
    """:math:`W_1 = \\int |F_a - F_b|\\,dx` by adaptive quadrature.

    The integral is split at ``center``, at ``center ± 1`` and at
    ``points`` (jumps of either CDF); both half-lines are integrated to
    infinity.

    Raises
    ------
    TailDivergence
        If the tail integrals cannot be certified (no finite first moment).
    """
    g = lambda x: abs(float(np.asarray(cdf_a(np.array([x])))[0])
                      - float(np.asarray(cdf_b(np.array([x])))[0]))
    cuts = sorted({center - 1.0, center, center + 1.0, *map(float, points)})
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        total += quad(g, lo, hi, cfg)
    try:
        total += quad(g, -np.inf, cuts[0], cfg) + quad(g, cuts[-1], np.inf, cfg)
    except QuadratureFailure as exc:
        raise TailDivergence(f"W1 tail integral not certified: {exc}") from None
    return total


# ---------------------------------------------------------------------------
# Dawson functional
# ---------------------------------------------------------------------------

def law_log_modulus(law: IDLaw) -> Callable:
    """``t -> log|φ(t)|`` in closed form for the standard catalog laws."""
    p = law.params
    if law.name == "normal":
        return lambda t: -0.5 * (p["sd"] * np.asarray(t)) ** 2
    if law.name == "gamma":
        return lambda t: -0.5 * p["alpha"] * np.log1p((np.asarray(t) / p["beta"]) ** 2)
    if law.name in ("texp", "laplace"):
        a, b = p.get("alpha", 1.0), p.get("beta", 1.0)
        return lambda t: (-0.5 * np.log1p((np.asarray(t) / a) ** 2)
                          - 0.5 * np.log1p((np.asarray(t) / b) ** 2))
    if law.name in ("stable", "sas"):
        sigma = law.meta["scale"]
        al = p["alpha"]
        return lambda t: -np.abs(sigma * np.asarray(t)) ** al
    return lambda t: np.log(np.abs(np.asarray(law.charfn(t), dtype=complex)))


def dawson_functional(charfn: Optional[Callable], t, cfg: QuadratureConfig = DEFAULT_QUAD,
                      log_modulus: Optional[Callable] = None):
    """Generalised Dawson functional :math:`L(\\varphi)(t)=|\\varphi(t)|
    \\int_0^{|t|} ds/|\\varphi(s)|`.

    Evaluated as :math:`\\int_0^{|t|}\\exp(g(t)-g(s))\\,ds` with
    ``g = log|φ|`` so that fast-decaying ``φ`` does not overflow.

    Raises
    ------
    NearZeroModulus
        If ``|φ|`` underflows and no ``log_modulus`` is supplied.
    """
    if log_modulus is None:
        def log_modulus(s):
            m = np.abs(np.asarray(charfn(s), dtype=complex))
            if np.any(m < 1e-300):
                raise NearZeroModulus("|φ| underflows; pass log_modulus")
            return np.log(m)
    scalar = np.ndim(t) == 0
    ts = np.abs(np.atleast_1d(np.asarray(t, dtype=float)))
    out = np.empty(ts.size)
    for i, tt in enumerate(ts):
        if tt == 0:
            out[i] = 0.0
            continue
        gt = float(log_modulus(np.array([tt]))[0])
        fn = lambda s: math.exp(gt - float(log_modulus(np.array([s]))[0]))
        out[i] = quad(fn, 0.0, tt, cfg)
    return float(out[0]) if scalar else out.reshape(np.shape(t))


def dawson_envelope(log_modulus: Callable, alpha: float, T: float = 50.0, n: int = 201,
                    cfg: QuadratureConfig = DEFAULT_QUAD) -> dict:
    """Smallest ``C'`` with ``L(t) <= C'|t|/(1+|t|^α)`` on ``(0, T]``.

    The ratio is scanned on a grid and its maximum refined by a bounded
    Brent search between the neighbouring grid points.

    Returns
    -------
    dict
        ``C`` and the maximiser ``t_star``.
    """
    env = lambda t: t / (1.0 + t ** alpha)
    ratio = lambda t: dawson_functional(None, t, cfg, log_modulus) / env(t)
    ts = np.linspace(0.0, T, n)[1:]
    r = np.array([ratio(t) for t in ts])
    k = int(np.argmax(r))
    lo, hi = ts[max(k - 1, 0)] if k > 0 else ts[0] * 1e-3, ts[min(k + 1, ts.size - 1)]
    res = optimize.minimize_scalar(lambda t: -ratio(t), bounds=(lo, hi), method="bounded",
                                   options=dict(xatol=1e-10))
    if -res.fun >= r[k]:
        return dict(C=float(-res.fun), t_star=float(res.x))
    return dict(C=float(r[k]), t_star=float(ts[k]))


# ---------------------------------------------------------------------------
# Esseen smoothing
# ---------------------------------------------------------------------------

def _eps_integral(epsilon_fn, T, cfg):
    f = lambda s: (float(epsilon_fn(np.array([s]))[0]) + float(epsilon_fn(np.array([-s]))[0])) / s
    # dyadic pieces so that localised ε is not missed on long ranges
    cuts = [0.0] + [c for c in 2.0 ** np.arange(-4, 60) if c < T] + [T]
    return sum(quad(f, a, b, cfg) for a, b in zip(cuts[:-1], cuts[1:]))


def esseen_bound(epsilon_fn: Callable, T: float, density_sup: float,
                 cfg: QuadratureConfig = DEFAULT_QUAD) -> BoundReport:
    """Esseen smoothing bound on the Kolmogorov distance.

    :math:`C_1\\int_{-T}^T \\varepsilon(t)/|t|\\,dt + C_2\\|h\\|_\\infty/T`
    with ``ε(t) = |φ_a(t) - φ_b(t)|``, ``C1 = 1/π`` and ``C2 = 24/π``.
    """
    if not T > 0:
        raise DomainError("T must be positive")
    if density_sup < 0 or not np.isfinite(density_sup):
        raise DomainError("density_sup must be finite and nonnegative")
    integral = _eps_integral(epsilon_fn, T, cfg)
    return BoundReport(
        terms=dict(fourier=ESSEEN_C1 * integral, smoothing=ESSEEN_C2 * density_sup / T),
        params=dict(T=T, density_sup=density_sup, C1=ESSEEN_C1, C2=ESSEEN_C2),
        notes=["total = C1 * ∫_{-T}^{T} ε(t)/|t| dt + C2 * density_sup / T"])


def esseen_optimal_T(epsilon_fn: Callable, density_sup: float, bounds=(1e-3, 1e4),
                     cfg: QuadratureConfig = DEFAULT_QUAD) -> BoundReport:
    """Esseen bound minimised over ``T`` (bounded Brent search in ``log T``)."""
    obj = lambda lt: esseen_bound(epsilon_fn, math.exp(lt), density_sup, cfg).total
    res = optimize.minimize_scalar(obj, bounds=tuple(map(math.log, bounds)), method="bounded",
                                   options=dict(xatol=1e-6))
    rep = esseen_bound(epsilon_fn, math.exp(res.x), density_sup, cfg)
    rep.notes.append("T chosen by minimising the bound over log T")
    return rep


def smoothing_transfers(dw2: float, density_sup: float, w1: float) -> dict:
    """Transfer inequalities between smooth Wasserstein, W1 and Kolmogorov.

    ``dw1_from_dw2`` is :math:`2\\sqrt{2C\\,d_{W_2}}` with the Gaussian
    mollifier constant ``C = 2/π`` (valid while ``ε* = sqrt(C d/2) < C``),
    and ``dk_from_w1`` is :math:`\\sqrt{2\\|h\\|_\\infty W_1}`.
    """
    if not 0 <= dw2 < 1:
        raise DomainError("dw2 must lie in [0, 1)")
    if w1 < 0 or density_sup < 0:
        raise DomainError("w1 and density_sup must be nonnegative")
    return dict(dw1_from_dw2=2.0 * math.sqrt(2.0 * MOLLIFIER_C * dw2),
                dk_from_w1=math.sqrt(2.0 * density_sup * w1),
                mollifier_C=MOLLIFIER_C)
