"""
The spiking SOM
===============

STDP training on a toy two-cluster problem, then labelling and
classification by mean spike counts.
"""

# %%
import numpy as np

from uwbsnn.som import SomConfig, assign_labels, classify_batch, init_som, respond, train_som


def blobs(n, seed):
    rng = np.random.default_rng(seed)
    y = np.arange(n) % 2
    proto = np.where(np.arange(12) < 6, 0.9, 0.1)
    x = np.where(y[:, None] == 1, proto, 1 - proto) + rng.normal(0, 0.08, (n, 12))
    return np.clip(x, 0, 1), y


x, y = blobs(120, 0)
xt, yt = blobs(60, 1)

# %%
net = init_som(SomConfig(grid=(5, 5), epochs=2, seed=0), 12)
w0 = net.w.copy()
train_som(net, x)
print("mean |dw|:", np.abs(net.w - w0).mean().round(4), " radius now", net.radius)

# %%
winners = respond(net, x, [(0, i) for i in range(len(x))]).argmax(axis=1)
for c in (0, 1):
    print(f"class {c} winners:", np.bincount(winners[y == c], minlength=25).nonzero()[0])

# %%
assign_labels(net, x, y)
print(net.labels.reshape(5, 5))
pred = classify_batch(net, xt)
print("test accuracy:", (pred == yt).mean())
