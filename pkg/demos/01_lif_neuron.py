"""
A single leaky integrate-and-fire neuron
========================================

Constant drive, the soft vs. hard reset, and the leak back to rest.
"""

# %%
import numpy as np

from uwbsnn.lif import LifParams, advance, integrate

# %% [markdown]
# With tau_m = 10 the membrane keeps 90% of its distance from rest each step,
# so a constant drive of 0.15 charges it towards 1.5 and crosses theta = 1
# on step 11.

# %%
p = LifParams(tau_m=10.0)
spikes = integrate(np.full((60, 1), 0.15), p)[:, 0]
print("spike steps:", np.flatnonzero(spikes) + 1)

# %% [markdown]
# Soft reset subtracts theta and keeps the overshoot; hard reset drops to
# V_rest. With a strong drive the soft neuron fires more often.

# %%
drive = np.full((100, 1), 0.4)
for mode in ("soft", "hard"):
    n = integrate(drive, LifParams(reset_mode=mode)).sum()
    print(f"{mode:>4} reset: {n} spikes in 100 steps")

# %%
# leak only: the distance to rest shrinks by (1 - 1/tau) per step
v = np.array([0.8])
trace = []
for _ in range(5):
    v, _ = advance(v, np.zeros(1), LifParams())
    trace.append(round(float(v[0]), 4))
print("leak:", trace)
