"""
The liquid
==========

A sparse random LIF reservoir turns encoded RF features into spike counts.
"""

# %%
import numpy as np

from uwbsnn.config import Config
from uwbsnn.dataset import split_dataset
from uwbsnn.encoding import encode_batch
from uwbsnn.liquid import build_liquid, liquid_summary, run_liquid_batch
from uwbsnn.pipeline import generate_synthetic, prepare

cfg = Config()
split = split_dataset(generate_synthetic(200, seed=0), seed=0)
prep = prepare(split, cfg, ["RF"])
rows = prep.inputs["RF"][0]
y = prep.train_labels

# %%
net = build_liquid(cfg.liquid_rf, rows.shape[1])
s = liquid_summary(net)
print({k: s[k] for k in ("n_excitatory", "n_inhibitory", "rec_density", "in_density")})
print(f"spectral radius {s['spectral_radius']:.3f}")

# %%
trains = encode_batch(rows, cfg.encoder.steps, cfg.encoder.max_rate, [(0, i) for i in range(len(rows))])
counts = run_liquid_batch(net, trains)
print("neurons active per sample:", (counts > 0).mean(axis=1).mean().round(3))
print("mean total spikes  LOS:", counts[y == 0].sum(1).mean().round(1), " NLOS:", counts[y == 1].sum(1).mean().round(1))

# %% [markdown]
# Separation: state vectors of different classes sit further apart than
# vectors of the same class.

# %%
d = np.linalg.norm(counts[:, None] - counts[None], axis=2)
same = y[:, None] == y[None]
off = ~np.eye(len(y), dtype=bool)
print(f"intra {d[same & off].mean():.1f}  inter {d[~same].mean():.1f}")
