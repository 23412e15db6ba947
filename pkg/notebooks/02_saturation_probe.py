# %% [markdown]
# How much gradient does a fake sample get once it is on the "real" side?
#
# Take a linear score s(x) = w.x and push a sample a distance d along w.
# The sigmoid cross-entropy generator gradient decays like sigma(-d); the
# least-squares one grows like |d - c| and vanishes only at the target.

# %%
import numpy as np

from lsgan_lab.metrics import saturation_probe

d = np.arange(0, 11)
ce = saturation_probe("sigmoid_ce", [1.0, 0.0], d)
ls = saturation_probe("least_squares", [1.0, 0.0], d, c=1.0)

print(" d   cross-entropy   least-squares")
for di, a, b in zip(d, ce, ls):
    print(f"{di:2d}   {a:13.6e}   {b:13.6f}")

# %% a crude text plot of log10 gradient norm
for di, a in zip(d, ce):
    print(f"{di:2d} " + "#" * int(2 * (np.log10(a) + 6)))
