# %% [markdown]
# Size-bias and zero-bias laws built from the Lévy measure, and the
# identities they satisfy.

# %%
import numpy as np

from idstein.bias_transforms import size_bias_pair, size_bias_residual, zero_bias, zero_bias_residual
from idstein.levy_core import catalog
from idstein.stein_ops import dictionary

f = dictionary()[10]

# %% gamma(2, 1): E X f(X) = 2 E f(X + Y) with Y ~ Exp(1)
law = catalog("gamma", alpha=2.0, beta=1.0)
pair = size_bias_pair(law)
print("m0+ =", pair["m0_plus"], " P(Y+ <= 1) =", pair["Yplus"].cdf(1.0), "vs", 1 - np.exp(-1))
print(size_bias_residual(law, f, 200_000, 3, pair))

# %% two-sided exponential: the zero-bias density is a two-sided exponential too
law = catalog("texp", alpha=1.0, beta=2.0)
zb = zero_bias(law)
v = np.array([-1.0, 0.5, 2.0])
print("Y density", zb["Y"].pdf(v))
print(zero_bias_residual(law, f, 200_000, 4, zb))
