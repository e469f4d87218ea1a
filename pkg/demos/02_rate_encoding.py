"""
Rate coding
===========

Feature values in [0, 1] become Bernoulli spike trains.
"""

# %%
import numpy as np

from uwbsnn.encoding import EncoderConfig, SpikeTrain, encode_batch, encode_rate

# %%
x = np.array([0.0, 0.25, 0.5, 1.0])
train = encode_rate(x, EncoderConfig(steps=250, max_rate=0.5, seed=1))
print("counts:", train.counts(), " expected:", x * 0.5 * 250)

# %% [markdown]
# Count statistics over many seeds follow Binomial(T, value * max_rate).

# %%
counts = encode_batch(np.full((2000, 1), 0.5), 1000, 1.0, [(3, k) for k in range(2000)]).sum(axis=1)
print(f"mean {counts.mean():.1f}  std {counts.std():.2f}  (binomial std {np.sqrt(250):.2f})")

# %%
# the text event list is a lossless round trip
text = encode_rate([0.9, 0.4], EncoderConfig(steps=8, max_rate=1.0, seed=0)).to_events()
print(text)
print(SpikeTrain.from_events(text).raster.astype(int))
