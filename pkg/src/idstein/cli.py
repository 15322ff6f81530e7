"""Command line experiment runner.

Every subcommand reads its parameters from flags and/or a JSON file
(``--config``), validates them against a fixed schema, runs one
experiment and writes a CSV table with a JSON sidecar.

Exit codes: 0 on success, 2 for an invalid configuration, 3 for a
numerical failure (the failing term is named on stderr).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy
from scipy import stats

from . import __version__
from . import approx_bounds as ab
from . import bias_transforms as bt
from . import fourier_metrics as fm
from . import semigroup_stein as sg
from . import stein_ops as so
from .errors import ConfigInvalid, IDSteinError, NumericalFailure
from .io import write_table
from .levy_core import CATALOG, catalog
from .quadrature import QuadratureConfig

# ---------------------------------------------------------------------------
# schema
# ---------------------------------------------------------------------------


def _count(v):
    f = float(v)
    if f != int(f) or f < 1:
        raise ValueError("expected a positive integer")
    return int(f)


def _law(v):
    if isinstance(v, str):
        v = dict(name=v)
    if not isinstance(v, dict) or "name" not in v:
        raise ValueError("law must be a name or {name, params}")
    if set(v) - {"name", "params"}:
        raise ValueError(f"unknown law fields {sorted(set(v) - {'name', 'params'})}")
    if v["name"] not in CATALOG:
        raise ValueError(f"unknown law {v['name']!r}")
    params = v.get("params", {}) or {}
    if not isinstance(params, dict):
        raise ValueError("law params must be an object")
    return dict(name=v["name"], params=params)


def _grid(v):
    if isinstance(v, str):
        if ".." in v:
            lo, hi = (_count(s) for s in v.split(".."))
            k = np.arange(int(math.log2(lo)), int(math.log2(hi)) + 1)
            out = [int(2 ** j) for j in k if lo <= 2 ** j <= hi]
        else:
            out = [_count(s) for s in v.split(",") if s.strip()]
    else:
        out = [_count(s) for s in v]
    if not out:
        raise ValueError("empty n grid")
    return out


def _choice(*opts):
    def check(v):
        if v not in opts:
            raise ValueError(f"expected one of {opts}")
        return v
    return check


def _positive(v):
    f = float(v)
    if not f > 0:
        raise ValueError("expected a positive number")
    return f


def _flag(v):
    if isinstance(v, bool):
        return v
    if str(v).lower() in ("1", "true", "yes"):
        return True
    if str(v).lower() in ("0", "false", "no"):
        return False
    raise ValueError("expected a boolean")


_COMMON = dict(seed=(int, 0), out=(str, None))
_OPTIONAL = {"seed", "out", "b_n"}

SCHEMA = {
    "catalog": dict(law=(_law, None), T=(_positive, 20.0), points=(_count, 401)),
    "identity-check": dict(law=(_law, None), n=(_count, 10 ** 6)),
    "bias-check": dict(law=(_law, None), kind=(_choice("size", "zero", "mixed", "equilibrium"), "size"),
                       n=(_count, 10 ** 6)),
    "dawson": dict(law=(_law, None), T=(_positive, 50.0), points=(_count, 201)),
    "rates": dict(law_n=(_law, None), law_inf=(_law, None),
                  kind=(_choice("sizebias", "zerobias", "selfdecomp"), "sizebias"),
                  p=(_positive, 1.0), C=(_positive, 1.0)),
    "cpa": dict(law=(_law, None), n_grid=(_grid, "16..1024"),
                variant=(_choice("L1", "L2", "stable", "sas"), "sas"), p=(_positive, 1.0)),
    "pareto-stable": dict(alpha=(float, 1.5), n_grid=(_grid, "16..4096")),
    "chaos-rates": dict(n_max=(_count, 10), K=(_count, 60), rescale=(_flag, True)),
    "semigroup": dict(law=(_law, None), m=(float, 0.5), s=(_positive, 1.0), amp=(float, 1.0),
                      x_min=(float, -5.0), x_max=(float, 5.0), points=(_count, 101)),
    "gwlt": dict(target=(_law, None), summand=(dict, dict(dist="expon", params={})),
                 b_n=(_positive, None), c_n=(float, 0.0), n=(_count, 64), N=(_positive, 8.0),
                 variant=(_choice("finiteVar", "holder"), "finiteVar"), samples=(_count, 10 ** 5)),
}


def validate(command: str, raw: dict) -> dict:
    """Check ``raw`` against the schema of ``command`` and fill defaults.

    Raises
    ------
    ConfigInvalid
        Unknown command or field, missing required field, bad value.
    """
    if command not in SCHEMA:
        raise ConfigInvalid(f"unknown command {command!r}")
    schema = dict(SCHEMA[command], **_COMMON)
    extra = set(raw) - set(schema)
    if extra:
        raise ConfigInvalid(f"unknown fields for {command}: {sorted(extra)}")
    out = {}
    for key, (conv, default) in schema.items():
        if key in raw and raw[key] is not None:
            try:
                out[key] = conv(raw[key])
            except (TypeError, ValueError) as exc:
                raise ConfigInvalid(f"{key}: {exc}") from None
        elif default is None and key not in _OPTIONAL:
            raise ConfigInvalid(f"missing required field {key!r}")
        else:
            out[key] = conv(default) if default is not None and conv is _grid else default
    return out


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def _quad_cfg() -> QuadratureConfig:
    limit = os.environ.get("IDSTEIN_QUAD_LIMIT")
    return QuadratureConfig(limit=int(limit)) if limit else QuadratureConfig()


def _threads() -> int:
    return max(1, int(os.environ.get("IDSTEIN_THREADS", "1")))


def _pmap(fn, items):
    with ThreadPoolExecutor(_threads()) as pool:
        return list(pool.map(fn, items))


def _make(spec):
    try:
        return catalog(spec["name"], **spec["params"])
    except TypeError as exc:
        raise ConfigInvalid(f"{spec['name']}: {exc}") from None


# ---------------------------------------------------------------------------
# commands; each returns (columns, meta)
# ---------------------------------------------------------------------------

def _cmd_catalog(c):
    law = _make(c["law"])
    t = np.linspace(-c["T"], c["T"], c["points"])
    phi = np.asarray(law.charfn(t), dtype=complex)
    meta = dict(law=repr(law), mean=law.mean, beta_star=law.beta_star,
                self_decomposable=law.self_decomposable)
    if law.triplet is not None:
        nu = law.nu
        meta.update(sigma2=law.triplet.sigma2, b=law.triplet.b, abs_small=nu.abs_moment_small,
                    abs_tail=nu.abs_moment_tail, second_moment=nu.total_second_moment)
    return dict(t=t, re=phi.real, im=phi.imag), meta


def _residual_table(rows):
    names = [r[0] for r in rows]
    est = np.array([r[1]["estimate"] for r in rows])
    se = np.array([r[1]["stderr"] for r in rows])
    z = np.where(se > 0, est / np.where(se > 0, se, 1.0), 0.0)
    ok = np.abs(est) <= 4.0 * se
    cols = dict(function=np.array(names), estimate=est, stderr=se, z=z, within_4se=ok.astype(int))
    return cols, dict(all_within_4se=bool(ok.all()))


def _cmd_identity(c):
    law = _make(c["law"])
    rows = [(f.name, so.identity_residual(law, f, c["n"], c["seed"])) for f in so.dictionary()]
    return _residual_table(rows)


def _cmd_bias(c):
    law = _make(c["law"])
    kind = c["kind"]
    if kind == "size":
        pre = bt.size_bias_pair(law)
        fn = lambda f: bt.size_bias_residual(law, f, c["n"], c["seed"], pre)
    elif kind == "zero":
        pre = bt.zero_bias(law)
        fn = lambda f: bt.zero_bias_residual(law, f, c["n"], c["seed"], pre)
    elif kind == "mixed":
        pre = bt.mixed_transform(law)
        fn = lambda f: bt.mixed_residual(law, f, c["n"], c["seed"], pre)
    else:
        pre = bt.size_bias_pair(law)
        fn = lambda f: bt.equilibrium_residual(law, f, c["n"], c["seed"], pre)["size_bias"]
    rows = [(f.name, fn(f)) for f in so.dictionary()]
    return _residual_table(rows)


def _cmd_dawson(c):
    law = _make(c["law"])
    t = np.linspace(0.0, c["T"], c["points"])
    cfg = _quad_cfg()
    lm = None
    try:
        lm = fm.law_log_modulus(law)
    except IDSteinError:
        pass
    L = np.array([fm.dawson_functional(law.charfn, s, cfg, log_modulus=lm) for s in t])
    return dict(t=t, L=L), dict(law=repr(law))


def _cmd_rates(c):
    a, b = _make(c["law_n"]), _make(c["law_inf"])
    fn = dict(sizebias=ab.delta_sizebias, zerobias=ab.delta_zerobias,
              selfdecomp=ab.delta_selfdecomp)[c["kind"]]
    rep = fn(a, b, C=c["C"], p=c["p"], cfg=_quad_cfg())
    cols = {k: [v] for k, v in rep.terms.items()}
    cols.update(total=[rep.total], dk_bound=[rep.params["dk_bound"]])
    return cols, dict(params=rep.params, laws=[repr(a), repr(b)])


def _cmd_cpa(c):
    law = _make(c["law"])
    ns = c["n_grid"]
    cfg = _quad_cfg()
    if law.lattice or law.law_atoms:
        raise ConfigInvalid("cpa needs a law without atoms")
    d = _pmap(lambda n: fm.kolmogorov_distance(lambda t: ab.cpa_charfn(law, n, t), law.charfn,
                                               cfg=cfg, atoms_a=((0.0, math.exp(-n)),)), ns)
    bound = [ab.cpa_bounds(law, n, c["variant"], c["p"]).total for n in ns]
    fit = ab.fit_slope(ns, d) if len(ns) > 1 else {}
    exponent = ab.cpa_bounds(law, ns[0], c["variant"], c["p"]).params["exponent"]
    return dict(n=ns, dK=d, structural_bound=bound), dict(fit=fit, predicted_slope=-exponent)


def _cmd_pareto(c):
    res = ab.pareto_to_stable_experiment(c["alpha"], c["n_grid"], cfg=_quad_cfg())
    meta = {k: res[k] for k in ("slope", "intercept", "constant", "predicted", "lam") if k in res}
    return dict(n=res["n"], dK=res["dK"]), meta


def _cmd_chaos(c):
    res = ab.chaos_rate_experiment(range(1, c["n_max"] + 1), c["K"], c["rescale"])
    ratio = np.concatenate([[np.nan], res["ratio"]])
    return dict(n=res["n"], delta=res["delta"], l1=res["l1"], ratio=ratio), {}


def _cmd_semigroup(c):
    target = sg.SemigroupTarget.from_law(_make(c["law"]))
    h = sg.bump(c["m"], c["s"], c["amp"])
    sol = sg.solve_stein(target, h)
    grid = np.linspace(c["x_min"], c["x_max"], c["points"])
    f = sg._hermite(sol.x[0], sol.dx, sol.f, sol.f_prime, grid)
    res = sg.stein_residual(sol, grid, pointwise=True)
    meta = dict(time_truncation=sol.time_truncation, tail_bound=sol.tail_bound, mean_h=sol.mean_h,
                sup_f_prime=float(np.max(np.abs(sol.f_prime))), max_residual=float(np.max(np.abs(res))),
                **sol.meta)
    return dict(x=grid, f_h=f, f_h_prime=sol.fprime(grid), residual=res), meta


def _cmd_gwlt(c):
    target = _make(c["target"])
    spec = c["summand"]
    if set(spec) - {"dist", "params"} or not hasattr(stats, str(spec.get("dist"))):
        raise ConfigInvalid("summand must be {dist: <scipy.stats name>, params: {...}}")
    dist = getattr(stats, spec["dist"])(**spec.get("params", {}))
    b_n = c["b_n"] if c["b_n"] is not None else target.mean / (c["n"] * dist.mean())
    scheme = ab.SumScheme(ab.summand_from_scipy(dist, spec["dist"]), b_n, c["c_n"], c["n"])
    rep = ab.gwlt_bound(scheme, target, c["N"], c["variant"], cfg=_quad_cfg())
    low = ab.dw2_lower_estimate(scheme, target, c["samples"], c["seed"])
    cols = {k: [v] for k, v in rep.terms.items()}
    cols.update(total=[rep.total], lower_estimate=[low["value"]], lower_stderr=[low["stderr"]])
    return cols, dict(params=rep.params, lower_witness=low["name"],
                      null_array_eps_0_1=scheme.null_array(0.1))


COMMANDS = {
    "catalog": _cmd_catalog, "identity-check": _cmd_identity, "bias-check": _cmd_bias,
    "dawson": _cmd_dawson, "rates": _cmd_rates, "cpa": _cmd_cpa, "pareto-stable": _cmd_pareto,
    "chaos-rates": _cmd_chaos, "semigroup": _cmd_semigroup, "gwlt": _cmd_gwlt,
}


def run(command: str, raw: dict) -> dict:
    """Validate, execute and write one experiment.

    Returns
    -------
    dict
        ``path`` of the CSV, ``columns`` and ``meta``.
    """
    config = validate(command, raw)
    columns, meta = COMMANDS[command](config)
    out = config["out"] or f"{command}.csv"
    # the output location is not part of the experiment
    recorded = {k: v for k, v in config.items() if k != "out"}
    meta = dict(meta, command=command, config=recorded, config_hash=config_hash(recorded),
                seed=config["seed"],
                versions=dict(idstein=__version__, numpy=np.__version__, scipy=scipy.__version__))
    path = write_table(out, columns, meta)
    return dict(path=path, columns=columns, meta=meta)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="idstein", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS
    for name in SCHEMA:
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=S, help="JSON file with the same fields")
        sp.add_argument("--seed", type=int, default=S)
        sp.add_argument("--out", default=S)
        for key in SCHEMA[name]:
            flag = "--" + key.replace("_", "-")
            if key in ("law", "law_n", "law_inf", "target"):
                sp.add_argument(flag, dest=key, default=S, help="catalog name")
                sp.add_argument(flag + "-params", dest=key + "__params", default=S,
                                help="JSON object of law parameters")
            elif key == "summand":
                sp.add_argument(flag, dest=key, default=S, help='JSON {"dist": ..., "params": {...}}')
            elif key == "n_grid":
                sp.add_argument(flag, "--ngrid", dest=key, default=S, help="16..4096 (powers of 2) or a,b,c")
            else:
                sp.add_argument(flag, dest=key, default=S)
        if "law" in SCHEMA[name]:
            sp.add_argument("--lambda", dest="law__lam", default=S, help="shorthand for lam")
    return p


def _collect(ns: argparse.Namespace) -> tuple[str, dict]:
    args = vars(ns).copy()
    command = args.pop("command")
    raw = {}
    if "config" in args:
        try:
            with open(args.pop("config")) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read config: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigInvalid("config must be a JSON object")
    for key, val in args.items():
        if "__" in key:
            base, sub = key.split("__")
            spec = raw.get(base)
            spec = dict(name=spec) if isinstance(spec, str) else dict(spec or {})
            params = dict(spec.get("params", {}))
            if sub == "params":
                try:
                    params.update(json.loads(val))
                except json.JSONDecodeError as exc:
                    raise ConfigInvalid(f"{base} params: {exc}") from None
            else:
                params[sub] = float(val)
            spec["params"] = params
            raw[base] = spec
        elif key in ("law", "law_n", "law_inf", "target"):
            spec = raw.get(key)
            spec = dict(spec) if isinstance(spec, dict) else {}
            spec["name"] = val
            raw[key] = spec
        elif key == "summand":
            try:
                raw[key] = json.loads(val)
            except json.JSONDecodeError as exc:
                raise ConfigInvalid(f"summand: {exc}") from None
        else:
            raw[key] = val
    return command, raw


def main(argv=None) -> int:
    try:
        ns = _parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        command, raw = _collect(ns)
        out = run(command, raw)
    except ConfigInvalid as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        term = getattr(exc, "term", None) or type(exc).__name__
        print(f"numerical failure in {term}: {exc}", file=sys.stderr)
        return 3
    except IDSteinError as exc:
        print(f"invalid configuration: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(out["path"])
    summary = {k: out["meta"][k] for k in ("fit", "slope", "all_within_4se", "max_residual")
               if k in out["meta"]}
    if summary:
        print(json.dumps(summary, default=float))
    return 0


if __name__ == "__main__":
    sys.exit(main())
