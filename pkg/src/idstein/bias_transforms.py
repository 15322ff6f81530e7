"""Additive size-bias pairs, extended zero-bias laws and the mixed
transform of an infinitely divisible law.

Each transform is returned as a :class:`BiasLaw`: a finite list of atoms
plus a normalised density, with a tabulated CDF, a seeded inverse-CDF
sampler and CSV export.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import AssumptionViolated, MissingDerivative, NumericalFailure
from .io import write_table
from .levy_core import IDLaw, LevyMeasure, rng_stream
from .quadrature import gauss_legendre
from .stein_ops import TestFunction, _mean_se, draw

__all__ = [
    "BiasLaw", "size_bias_pair", "zero_bias", "mixed_transform",
    "size_bias_residual", "zero_bias_residual", "mixed_residual",
    "equilibrium_residual",
]

_ORDER = 20
_RATIO = 1.05
_TINY = 1e-30
_TAIL_EPS = 1e-20
_MASS_TOL = 1e-8


# ---------------------------------------------------------------------------
# Half-line integration
# ---------------------------------------------------------------------------

def _half_edges(a, b, breaks, h):
    """Cell edges on ``(a, b)`` with ``0 <= a``, geometric in ``s``.

    The lower end is clipped at ``_TINY`` and an infinite upper end is cut
    where ``s h(s)`` drops below ``_TAIL_EPS``.
    """
    lo = max(a, _TINY)
    if np.isfinite(b):
        hi = b
    else:
        hi = max(2.0, 2.0 * lo)
        while hi < 1e300 and float(hi * h(np.array([hi]))[0]) > _TAIL_EPS:
            hi *= 2.0
    if lo >= hi:
        return np.empty(0)
    n = max(1, int(math.ceil(math.log(hi / lo) / math.log(_RATIO))))
    edges = np.geomspace(lo, hi, n + 1)
    inner = [c for c in breaks if lo < c < hi]
    return np.unique(np.concatenate([edges, inner]))


class _HalfLine:
    """Cellwise Gauss-Legendre integration of ``h`` on a half-line."""

    def __init__(self, h, a, b, breaks=()):
        self.h = h
        self.edges = _half_edges(a, b, breaks, h)
        x, w = gauss_legendre(_ORDER)
        lo, hi = self.edges[:-1, None], self.edges[1:, None]
        self.nodes = lo + (hi - lo) * x
        self.weights = (hi - lo) * w

    def cell_integrals(self, weight=None):
        vals = self.h(self.nodes)
        if weight is not None:
            vals = vals * weight(self.nodes)
        return np.sum(vals * self.weights, axis=1)

    def partial(self, lo, hi, weight=None, chunk=1 << 14):
        """``∫_lo^hi weight(s) h(s) ds`` elementwise, for ``lo, hi`` inside one cell."""
        x, w = gauss_legendre(_ORDER)
        lo, hi = np.broadcast_arrays(np.asarray(lo, float), np.asarray(hi, float))
        out = np.empty(lo.shape)
        flat_lo, flat_hi, flat_out = lo.ravel(), hi.ravel(), out.reshape(-1)
        for s in range(0, flat_lo.size, chunk):
            a, b = flat_lo[s:s + chunk, None], flat_hi[s:s + chunk, None]
            nodes = a + (b - a) * x
            vals = self.h(nodes)
            if weight is not None:
                vals = vals * weight(nodes)
            flat_out[s:s + chunk] = np.sum(vals * (b - a) * w, axis=1)
        return out

    def suffix(self, weight=None):
        """``∫_{e_k}^{top}`` for every edge ``e_k``."""
        cells = self.cell_integrals(weight)
        return np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]])

    def tail(self, v, suffix, weight=None):
        """``∫_v^{top} weight·h`` for ``v > 0`` given :meth:`suffix`."""
        v = np.asarray(v, dtype=float)
        e = self.edges
        if e.size == 0:
            return np.zeros(v.shape)
        k = np.searchsorted(e, v, side="right")
        out = np.zeros(v.shape)
        inside = k < e.size
        vk = v[inside]
        kk = k[inside]
        out[inside] = suffix[kk] + self.partial(vk, e[kk], weight)
        return out


def _side_density(nu: LevyMeasure, side: float):
    """``s -> nu(side*s)`` on ``s > 0`` (zero outside the support)."""
    lo, hi = nu.support

    def h(s):
        u = side * np.asarray(s, dtype=float)
        inside = (u > lo) & (u < hi) if nu.density is not None else np.zeros(u.shape, bool)
        if not inside.any():
            return np.zeros(u.shape)
        return np.where(inside, nu.density(np.where(inside, u, side)), 0.0)
    return h


def _side_range(nu: LevyMeasure, side: float):
    lo, hi = nu.support
    if nu.density is None:
        return 0.0, 0.0
    if side > 0:
        return max(lo, 0.0), max(hi, 0.0)
    return max(-hi, 0.0), max(-lo, 0.0)


def _side_breaks(nu: LevyMeasure, side: float, extra=()):
    pts = {1.0, *[abs(c) for c in nu.support if np.isfinite(c) and c * side > 0], *extra}
    pts |= {abs(loc) for loc, _ in nu.atoms if loc * side > 0}
    return tuple(sorted(pts))


def _side_atoms(nu: LevyMeasure, side: float):
    return [(abs(loc), m) for loc, m in nu.atoms if loc * side > 0]


class _EtaSide:
    """``eta(v) = ∫_{|v|}^{top} s nu(side s) ds`` (plus atoms) for one side."""

    def __init__(self, nu: LevyMeasure, side: float, top: float = np.inf):
        self.side = side
        a, b = _side_range(nu, side)
        b = min(b, top)
        self.top = top
        self.line = _HalfLine(_side_density(nu, side), a, b, _side_breaks(nu, side))
        self.atoms = [(s, m) for s, m in _side_atoms(nu, side) if s <= top]
        self._suffix = self.line.suffix(lambda s: s)

    def __call__(self, v):
        s = np.abs(np.asarray(v, dtype=float))
        out = self.line.tail(s, self._suffix, lambda x: x)
        for loc, m in self.atoms:
            out = out + np.where(s <= loc, loc * m, 0.0)
        return np.where(s < self.top, out, 0.0)

    def total(self):
        """``∫_0^{top} s nu(side s) ds``."""
        return float(self._suffix[0]) + sum(loc * m for loc, m in self.atoms)


# ---------------------------------------------------------------------------
# BiasLaw
# ---------------------------------------------------------------------------

def _merge_atoms(atoms):
    acc = {}
    for loc, p in atoms:
        if p > 0:
            acc[float(loc)] = acc.get(float(loc), 0.0) + float(p)
    return tuple(sorted(acc.items()))


@dataclass(frozen=True, eq=False)
class BiasLaw:
    """A probability law made of atoms and a density.

    Parameters
    ----------
    name : str
    normalizer : float
        Constant multiplying the expectation in the corresponding identity.
    atoms : tuple of (location, probability)
    density : callable, optional
        Vectorised normalised density of the continuous part.
    support : (float, float)
        Interval carrying ``density``.
    breaks : tuple of float
        Points where ``density`` is not smooth (0 is implicit).
    """

    name: str
    normalizer: float
    atoms: tuple = ()
    density: Optional[Callable] = None
    support: tuple = (0.0, 0.0)
    breaks: tuple = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "atoms", _merge_atoms(self.atoms))

    @property
    def atom_mass(self) -> float:
        """Probability of the atom at 0."""
        return sum(p for loc, p in self.atoms if loc == 0.0)

    @property
    def atom_total(self) -> float:
        return sum(p for _, p in self.atoms)

    def pdf(self, x):
        """Density of the continuous part (0 outside the support)."""
        x = np.asarray(x, dtype=float)
        if self.density is None:
            return np.zeros(x.shape)
        lo, hi = self.support
        inside = (x > lo) & (x < hi) & (x != 0)
        mid = 0.5 * (max(lo, -1.0) + min(hi, 1.0))
        if mid == 0.0:
            mid = 0.5 * min(hi, 1.0)
        safe = np.where(inside, x, mid)
        return np.where(inside, self.density(safe), 0.0)

    # -- tabulation -----------------------------------------------------------
    @cached_property
    def _sides(self):
        """Half-line tables ``(sign, line, cumulative from 0 outward)``."""
        out = []
        if self.density is None:
            return out
        lo, hi = self.support
        for sign in (-1.0, 1.0):
            a = max(lo * sign, 0.0) if sign > 0 else max(-hi, 0.0)
            b = hi if sign > 0 else -lo
            if b <= 0:
                continue
            brk = sorted({abs(c) for c in self.breaks if c * sign > 0})
            line = _HalfLine(lambda s, sg=sign: self.pdf(sg * np.asarray(s)), a, b, brk)
            cells = line.cell_integrals()
            out.append((sign, line, np.concatenate([[0.0], np.cumsum(cells)])))
        return out

    @cached_property
    def ac_mass(self) -> float:
        """Numerical integral of the density."""
        return float(sum(cum[-1] for _, _, cum in self._sides))

    @property
    def mass_defect(self) -> float:
        return self.atom_total + self.ac_mass - 1.0

    def check(self, tol: float = _MASS_TOL):
        """Raise :class:`NumericalFailure` unless the law has total mass 1."""
        if abs(self.mass_defect) > tol:
            raise NumericalFailure(
                f"{self.name}: total mass off by {self.mass_defect:.3e}", term="mass")
        return self

    def _ac_cdf(self, x):
        """Continuous part of the CDF (unnormalised)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for sign, line, cum in self._sides:
            s = x * sign
            e = line.edges
            # mass of this side on (0, s] for the positive side, [−s, 0) else
            k = np.clip(np.searchsorted(e, s, side="right") - 1, 0, e.size - 2)
            sc = np.clip(s, e[0], e[-1])
            inner = cum[k] + line.partial(e[k], sc)
            inner = np.where(s <= e[0], 0.0, inner)
            if sign > 0:
                out += np.where(x > 0, inner, 0.0)
            else:
                total = cum[-1]
                out += np.where(x < 0, total - inner, total)
        return out

    def cdf(self, x):
        """:math:`P(Y \\le x)`."""
        x = np.asarray(x, dtype=float)
        out = self._ac_cdf(x)
        for loc, p in self.atoms:
            out = out + np.where(x >= loc, p, 0.0)
        return out

    @cached_property
    def _inverse(self):
        xs, fs = [], []
        for sign, line, cum in self._sides:
            if sign < 0:
                xs.append(-line.edges[::-1])
                fs.append(cum[-1] - cum[::-1])
            else:
                xs.append(line.edges)
                fs.append(self._neg_mass + cum)
        if not xs:
            return None
        x, f = np.concatenate(xs), np.concatenate(fs)
        keep = np.concatenate([[True], np.diff(f) > 1e-300])
        x, f = x[keep], f[keep]
        return PchipInterpolator(f, x, extrapolate=False), f[0], f[-1]

    @cached_property
    def _neg_mass(self):
        return float(sum(cum[-1] for sign, _, cum in self._sides if sign < 0))

    def _ac_quantile(self, u):
        """Inverse of the continuous CDF part at levels in ``[0, ac_mass]``."""
        interp, f0, f1 = self._inverse
        return interp(np.clip(u, f0, f1))

    def sampler(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """``n`` draws: Bernoulli atom selection, then inverse-CDF."""
        probs = np.array([p for _, p in self.atoms] + [self.ac_mass])
        probs = probs / probs.sum()
        comp = rng.choice(probs.size, size=n, p=probs)
        out = np.empty(n)
        for j, (loc, _) in enumerate(self.atoms):
            out[comp == j] = loc
        cont = comp == len(self.atoms)
        if cont.any():
            u = rng.uniform(size=int(cont.sum())) * self.ac_mass
            out[cont] = self._ac_quantile(u)
        return out

    def expect(self, g) -> float:
        """:math:`\\mathbb E g(Y)` for a vectorised ``g`` by quadrature."""
        val = sum(p * float(g(np.array([loc]))[0]) for loc, p in self.atoms)
        for sign, line, _ in self._sides:
            val += float(np.sum(line.cell_integrals(lambda s, sg=sign: g(sg * s))))
        return val

    def table(self, grid=None):
        """``(x, density, cdf)`` on ``grid`` (default: 801 quantile-spaced points)."""
        if grid is None:
            lo, hi = self.quantile(1e-4), self.quantile(1 - 1e-4)
            if lo == hi:
                lo, hi = lo - 1.0, hi + 1.0
            grid = np.linspace(lo, hi, 801)
        grid = np.asarray(grid, dtype=float)
        return grid, self.pdf(grid), self.cdf(grid)

    def quantile(self, q: float) -> float:
        """Generalised inverse of :meth:`cdf` at one level, by bisection."""
        ends = [loc for loc, _ in self.atoms]
        for sign, line, _ in self._sides:
            ends.append(sign * line.edges[-1])
            ends.append(sign * line.edges[0])
        lo, hi = min(ends) - 1e-12, max(ends)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if float(self.cdf(np.array([mid]))[0]) >= q:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 1e-14 * max(1.0, abs(hi)):
                break
        return hi

    def to_csv(self, path, grid=None):
        """Write ``x, density, cdf``; atoms and normaliser go to the JSON sidecar."""
        x, d, c = self.table(grid)
        meta = dict(name=self.name, normalizer=self.normalizer,
                    atoms=[list(a) for a in self.atoms], support=list(self.support))
        return write_table(path, dict(x=x, density=d, cdf=c), meta)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def _triplet_without_gaussian(law: IDLaw):
    if law.triplet is None:
        raise AssumptionViolated(f"{law.name}: no Lévy triplet available")
    if law.triplet.sigma2 > 0:
        raise AssumptionViolated(f"{law.name}: Gaussian component present")
    return law.triplet


def _tilted_density(nu: LevyMeasure, lo: float, hi: float, scale: float):
    """``u -> |u| nu(u) / scale`` restricted to ``(lo, hi)``."""
    def dens(u):
        u = np.asarray(u, dtype=float)
        inside = (u > max(lo, nu.support[0])) & (u < min(hi, nu.support[1])) & (u != 0)
        safe = np.where(inside, u, 0.5 * (max(lo, nu.support[0]) + min(hi, nu.support[1])))
        return np.where(inside, np.abs(u) * nu.density(safe), 0.0) / scale
    return dens


def _signed_breaks(nu: LevyMeasure):
    pts = {-1.0, 1.0, *[c for c in nu.support if np.isfinite(c)], *[loc for loc, _ in nu.atoms]}
    pts.discard(0.0)
    return tuple(sorted(pts))


def _tilted_law(name, nu, lo, hi, scale, atom0):
    """Probability law ``atom0/scale δ0 + |u| 1_{(lo,hi)} nu(du)/scale``."""
    atoms = [(0.0, atom0 / scale)]
    atoms += [(loc, abs(loc) * m / scale) for loc, m in nu.atoms if lo < loc < hi]
    dens = None
    support = (0.0, 0.0)
    if nu.density is not None:
        s_lo, s_hi = max(lo, nu.support[0]), min(hi, nu.support[1])
        if s_lo < s_hi:
            dens = _tilted_density(nu, lo, hi, scale)
            support = (s_lo, s_hi)
    return BiasLaw(name, scale, tuple(atoms), dens, support, _signed_breaks(nu)).check()


def _clean(x, ref):
    return 0.0 if abs(x) <= 1e-13 * max(1.0, abs(ref)) else x


def size_bias_pair(law: IDLaw) -> dict:
    """Additive size-bias pair ``(Y+, Y-)`` of ``law``.

    The pair satisfies :math:`\\mathbb E Xf(X)=m_0^+\\mathbb E f(X+Y^+)
    - m_0^-\\mathbb E f(X+Y^-)` for bounded Lipschitz ``f``.  When one of
    :math:`m_0^\\pm` vanishes the matching law is ``None`` and its term
    drops out.

    Returns
    -------
    dict
        ``m0_plus``, ``m0_minus``, ``Yplus``, ``Yminus`` and ``b0``.

    Raises
    ------
    AssumptionViolated
        If small jumps are not absolutely summable, the mean is infinite,
        a Gaussian part is present or both :math:`m_0^\\pm` vanish.
    """
    tr = _triplet_without_gaussian(law)
    nu = tr.nu
    if not np.isfinite(nu.abs_moment_small):
        raise AssumptionViolated(f"{law.name}: ∫_{{|u|≤1}}|u|ν(du) diverges")
    if not np.isfinite(nu.abs_moment_tail):
        raise AssumptionViolated(f"{law.name}: infinite mean")
    b0 = _clean(tr.drift, tr.b)
    bp, bm = max(b0, 0.0), max(-b0, 0.0)
    m_plus = bp + _EtaSide(nu, 1.0).total()
    m_minus = bm + _EtaSide(nu, -1.0).total()
    if m_plus <= 0 and m_minus <= 0:
        raise AssumptionViolated(f"{law.name}: m0+ and m0- both vanish")
    yp = _tilted_law("size_bias_plus", nu, 0.0, np.inf, m_plus, bp) if m_plus > 0 else None
    ym = _tilted_law("size_bias_minus", nu, -np.inf, 0.0, m_minus, bm) if m_minus > 0 else None
    return dict(m0_plus=m_plus, m0_minus=m_minus, Yplus=yp, Yminus=ym, b0=b0)


def _eta_law(name, parts, scale, breaks):
    """Law with density ``eta(v)/scale`` where ``parts`` maps sign to eta."""
    plus, minus = parts.get(1.0), parts.get(-1.0)
    hi = _reach(plus)
    lo = -_reach(minus)

    def dens(v):
        v = np.asarray(v, dtype=float)
        out = np.zeros(v.shape)
        if plus is not None:
            out = out + np.where(v > 0, plus(np.where(v > 0, v, 1.0)), 0.0)
        if minus is not None:
            out = out + np.where(v < 0, minus(np.where(v < 0, v, -1.0)), 0.0)
        return out / scale

    return BiasLaw(name, scale, (), dens, (lo, hi), breaks).check()


def _reach(eta):
    if eta is None:
        return 0.0
    top = eta.line.edges[-1] if eta.line.edges.size else 0.0
    top = max([top, *[loc for loc, _ in eta.atoms]])
    return min(top, eta.top)


def zero_bias(law: IDLaw) -> dict:
    """Extended zero-bias law ``Y`` of ``law``.

    ``Y`` has density :math:`\\eta(v)/\\int u^2\\nu(du)` with
    :math:`\\eta = \\eta_+ 1_{v>0} + \\eta_- 1_{v<0}`, so that
    :math:`\\mathrm{Cov}(X, f(X)) = (\\int u^2\\nu)\\,\\mathbb E f'(X+Y)`.

    Returns
    -------
    dict
        ``total``, ``Y``, and the one-sided split ``total_plus``,
        ``total_minus``, ``Yplus``, ``Yminus`` (``None`` for an empty side).
    """
    tr = _triplet_without_gaussian(law)
    nu = tr.nu
    if nu.is_zero:
        raise AssumptionViolated(f"{law.name}: Lévy measure vanishes")
    if not np.isfinite(nu.second_moment_tail):
        raise AssumptionViolated(f"{law.name}: infinite second moment")
    total = nu.total_second_moment
    parts = {s: _EtaSide(nu, s) for s in (1.0, -1.0)}
    breaks = _signed_breaks(nu)
    out = dict(total=total, Y=_eta_law("zero_bias", parts, total, breaks))
    for sign, key in ((1.0, "plus"), (-1.0, "minus")):
        a, b = (0.0, np.inf) if sign > 0 else (-np.inf, 0.0)
        side_total = nu.integrate(lambda u: u * u, a, b)
        out[f"total_{key}"] = side_total
        out[f"Y{key}"] = (_eta_law(f"zero_bias_{key}", {sign: parts[sign]}, side_total, breaks)
                          if side_total > 0 else None)
    return out


def mixed_transform(law: IDLaw) -> dict:
    """Mixed zero/size-bias transform for laws with a finite first moment.

    Splits jumps at ``|u| = 1``: small jumps give the law ``U`` with density
    :math:`(\\eta_+ 1_{(0,1)} + \\eta_- 1_{(-1,0)})/\\int_{-1}^1u^2\\nu`
    (with ``eta`` truncated at 1), large jumps give ``V+`` and ``V-``.

    Returns
    -------
    dict
        ``quad_mass``, ``U``, ``m``, ``m_plus``, ``m_minus``, ``Vplus``,
        ``Vminus``.
    """
    tr = _triplet_without_gaussian(law)
    nu = tr.nu
    m_plus = nu.tail_plus_fn(1.0) - sum(m for loc, m in nu.atoms if loc == 1.0)
    m_minus = nu.tail_minus_fn(-1.0) - sum(m for loc, m in nu.atoms if loc == -1.0)
    m = m_plus + m_minus
    if not np.isfinite(m) or m <= 0:
        raise AssumptionViolated(f"{law.name}: need 0 < ∫_{{|u|>1}}|u|ν(du) < ∞")
    quad_mass = nu.second_moment_small
    if not quad_mass > 0:
        raise AssumptionViolated(f"{law.name}: no small jumps")
    parts = {s: _EtaSide(nu, s, top=1.0) for s in (1.0, -1.0)}
    u_law = _eta_law("mixed_U", parts, quad_mass, _signed_breaks(nu))
    vp = _tilted_law("mixed_Vplus", nu, 1.0, np.inf, m, m_minus)
    vm = _tilted_law("mixed_Vminus", nu, -np.inf, -1.0, m, m_plus)
    return dict(quad_mass=quad_mass, U=u_law, m=m, m_plus=m_plus, m_minus=m_minus,
                Vplus=vp, Vminus=vm)


# ---------------------------------------------------------------------------
# Monte Carlo residuals
# ---------------------------------------------------------------------------

def _derivative(f: TestFunction):
    if f.derivative is None:
        raise MissingDerivative(f"{f.name}: derivative required")
    return f.derivative


def _result(vals):
    est, se = _mean_se(vals)
    return dict(estimate=est, stderr=se, n=int(np.size(vals)))


def size_bias_residual(law: IDLaw, f: TestFunction, n: int = 10 ** 6, seed: int = 0,
                       pair: Optional[dict] = None) -> dict:
    """:math:`\\mathbb E[Xf(X) - m_0^+f(X+Y^+) + m_0^-f(X+Y^-)]` with its joint stderr."""
    pair = size_bias_pair(law) if pair is None else pair
    x = draw(law, n, seed, 0)
    vals = x * f(x)
    if pair["Yplus"] is not None:
        vals = vals - pair["m0_plus"] * f(x + draw(pair["Yplus"], n, seed, 1))
    if pair["Yminus"] is not None:
        vals = vals + pair["m0_minus"] * f(x + draw(pair["Yminus"], n, seed, 2))
    return _result(vals)


def zero_bias_residual(law: IDLaw, f: TestFunction, n: int = 10 ** 6, seed: int = 0,
                       zb: Optional[dict] = None) -> dict:
    """:math:`\\mathbb E[(X-\\mathbb EX)f(X) - (\\int u^2\\nu) f'(X+Y)]`."""
    zb = zero_bias(law) if zb is None else zb
    df = _derivative(f)
    x = draw(law, n, seed, 0)
    y = draw(zb["Y"], n, seed, 1)
    return _result((x - law.mean) * f(x) - zb["total"] * df(x + y))


def mixed_residual(law: IDLaw, f: TestFunction, n: int = 10 ** 6, seed: int = 0,
                   mt: Optional[dict] = None) -> dict:
    """Residual of the mixed identity, one joint draw per sample."""
    mt = mixed_transform(law) if mt is None else mt
    df = _derivative(f)
    x = draw(law, n, seed, 0)
    u = draw(mt["U"], n, seed, 1)
    vp = draw(mt["Vplus"], n, seed, 2)
    vm = draw(mt["Vminus"], n, seed, 3)
    vals = ((x - law.mean) * f(x) - mt["quad_mass"] * df(x + u)
            - mt["m"] * f(x + vp) + mt["m"] * f(x + vm))
    return _result(vals)


def equilibrium_residual(law: IDLaw, f: TestFunction, n: int = 10 ** 6, seed: int = 0,
                         pair: Optional[dict] = None) -> dict:
    """Residuals of :math:`\\mathbb E f(X) - f(0) = \\mathbb E Xf'(UX)` and of its
    size-bias form with ``U`` uniform on [0, 1].

    Returns
    -------
    dict
        ``direct`` and ``size_bias`` residual dicts.
    """
    df = _derivative(f)
    pair = size_bias_pair(law) if pair is None else pair
    x = draw(law, n, seed, 0)
    rng = rng_stream(seed, 4, 0)
    u = rng.uniform(size=x.size)
    f0 = float(f(np.array([0.0]))[0])
    direct = f(x) - f0 - x * df(u * x)
    sb = f(x) - f0
    if pair["Yplus"] is not None:
        sb = sb - pair["m0_plus"] * df(u * (x + draw(pair["Yplus"], n, seed, 1)))
    if pair["Yminus"] is not None:
        sb = sb + pair["m0_minus"] * df(u * (x + draw(pair["Yminus"], n, seed, 2)))
    return dict(direct=_result(direct), size_bias=_result(sb))
