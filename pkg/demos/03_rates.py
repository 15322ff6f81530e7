# %% [markdown]
# Convergence rates measured in Kolmogorov distance through exact
# Fourier inversion: normalised Pareto sums, compound Poisson
# approximation, and the second Wiener chaos.

# %%
import numpy as np

from idstein.approx_bounds import (chaos_rate_experiment, cpa_bounds, cpa_rate_experiment,
                                   pareto_to_stable_experiment)
from idstein.levy_core import catalog

# %% Pareto sums towards the symmetric 1.5-stable law; rate n^{-(2/α-1)} = n^{-1/3}
res = pareto_to_stable_experiment(1.5, 2 ** np.arange(4, 10))
for n, d in zip(res["n"], res["dK"]):
    print(f"n={n:5d}  d_K={d:.4e}")
print("fitted slope", res["slope"], "predicted", res["predicted"])

# %% compound Poisson approximation of SaS(1.5): the upper bound exponent is 2/3,
# the measured decay is faster
sas = catalog("sas", alpha=1.5)
res = cpa_rate_experiment(sas, 2 ** np.arange(4, 9))
print("CPA slope", res["slope"], " bound exponent", cpa_bounds(sas, 64, "sas").params["exponent"])

# %% second chaos with λ_k = 2^{-k}: Δ_n against the ℓ¹ distance of the coefficients
out = chaos_rate_experiment(range(1, 8))
for n, d, l in zip(out["n"], out["delta"], out["l1"]):
    print(f"n={n}  Delta={d:.3e}  l1={l:.3e}")
