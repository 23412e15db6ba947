# %% [markdown]
# Closed-form optima on small discrete distributions
#
# With the discriminator at its optimum, the least-squares value 2C(G)
# equals a Pearson chi-square between p_d + p_g and 2 p_g whenever
# b - c = 1 and b - a = 2.  The cross-entropy GAN lands on 2 JS - log 4.
# Everything below is exact arithmetic on probability vectors; no training.

# %%
import math

import numpy as np

from lsgan_lab.divergence import (
    chi2_table, gan_value_at_optimum, js_divergence, lsgan_value_at_optimum,
    optimal_discriminator, pearson_chi2_mix, random_pair,
)

pd, pg = random_pair(seed=0, index=0, K=6)
print("p_d", np.round(pd.probs, 3))
print("p_g", np.round(pg.probs, 3))

# %% D* is a per-point weighted average of the targets
print("D* with (a, b) = (-1, 1):", np.round(optimal_discriminator(pd, pg, -1, 1), 4))

# %% the coding scheme matters
for scheme in [(-1, 1, 0), (0, 2, 1), (0, 1, 1)]:
    v = lsgan_value_at_optimum(pd, pg, *scheme)
    print(f"{scheme}: 2C(G) = {v:.12f}   chi2 = {pearson_chi2_mix(pd, pg):.12f}")
# (0, 1, 1) breaks b - a = 2, so it is a different quantity

# %% a hundred random pairs
rows = chi2_table(100, None, seed=1)
print("worst |2C(G) - chi2| over 100 pairs:", max(r.diff for r in rows))

# %% regular GAN
v = gan_value_at_optimum(pd, pg)
print(f"V(D*, G) = {v:.12f}, 2 JS - log 4 = {2 * js_divergence(pd, pg) - math.log(4):.12f}")
print("at p_g = p_d:", gan_value_at_optimum(pd, pd), "vs", -math.log(4))
