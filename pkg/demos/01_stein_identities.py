# %% [markdown]
# Characterizing identities for a few catalog laws.
# The generic operator A f(x) = (x - b) f(x) - ∫ (f(x+u) - f(x) 1{|u|<=1}) u ν(du)
# has mean zero under the law; we check it by Monte Carlo.

# %%
import numpy as np

from idstein.levy_core import catalog
from idstein.stein_ops import apply_Agen, dictionary, draw, gamma_operator, identity_residual

D = dictionary()
law = catalog("gamma", alpha=2.0, beta=1.0)

# %% the generic operator against the gamma special form at a few points
for f in D[:3]:
    print(f.name, [round(apply_Agen(f, x, law) - gamma_operator(f, x, 2.0, 1.0), 12) for x in (-1.0, 0.5, 2.0)])

# %% Monte Carlo: |E A f(X)| should be within a few standard errors
x = draw(law, 200_000, seed=1)
for f in D[::4]:
    r = identity_residual(law, f, samples=x)
    print(f"{f.name:18s} {r['estimate']:+.2e}  stderr {r['stderr']:.1e}")

# %% a wrong law is detected: gamma(2.3) draws tested against the gamma(2) operator
y = catalog("gamma", alpha=2.3).sampler(np.random.default_rng(0), 200_000)
r = identity_residual(law, D[16], samples=y)
print("wrong law z-score", r["estimate"] / r["stderr"])
