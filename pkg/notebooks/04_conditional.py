# %% [markdown]
# Class-conditional LSGAN
#
# The one-hot label goes through a learned linear map and is concatenated
# to both the latent code and the discriminator input.  After training we
# ask, per class, what fraction of samples land nearest their own mode.

# %%
import sys

import numpy as np

from lsgan_lab.config import lsgan_toy_config
from lsgan_lab.metrics import class_fidelity
from lsgan_lab.trainer import generate, state_from_checkpoint, train_run

steps = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
cfg = lsgan_toy_config(conditional=True, total_g_steps=steps, snapshot_every=steps)
log, ck = train_run(cfg)
st = state_from_checkpoint(ck)

samples, labels = generate(cfg, st)
fid = class_fidelity(samples, labels, cfg.data)
for k, f in enumerate(fid):
    print(f"class {k}: {f:.2f} of samples nearest mode {k}")
print("classes above one half:", int(np.sum(fid > 0.5)))

# %% the label map itself
print(np.round(st.embed.mapping_matrix, 3))
