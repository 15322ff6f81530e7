# %% [markdown]
# Six-term bound for row sums converging (or not) to gamma(2, 1), compared
# with a Monte Carlo lower estimate of the smooth Wasserstein distance.

# %%
from scipy import stats

from idstein.approx_bounds import SumScheme, dw2_lower_estimate, gwlt_bound, summand_from_scipy
from idstein.levy_core import catalog

target = catalog("gamma", alpha=2.0, beta=1.0)


def show(label, scheme):
    rep = gwlt_bound(scheme, target, N=8.0)
    low = dw2_lower_estimate(scheme, target, 50_000, seed=0)
    print(f"{label:22s} bound {rep.total:.4f}  kernel {rep.terms['kernel']:.4f}  lower {low['value']:.4f}")


# %% (2/n) x sum of n Exp(1): the mean is right but the sum concentrates at 2,
# so neither the bound nor the lower estimate goes to zero
for n in (16, 64):
    show(f"Exp(1), n={n}", SumScheme(summand_from_scipy(stats.expon(), "expon"), 2.0 / n, 0.0, n))

# %% gamma(2/n) increments sum exactly to gamma(2): the kernel term vanishes like 2/n
for n in (16, 64):
    show(f"gamma(2/n), n={n}", SumScheme(summand_from_scipy(stats.gamma(2.0 / n), "g"), 1.0, 0.0, n))
