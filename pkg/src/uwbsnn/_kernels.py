"""Compiled inner loops for the LIF time scan, the liquid and STDP.

Each kernel performs the same floating-point operations, in the same order,
as the plain-numpy path it replaces, so results agree bit for bit.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def lif_scan(drive, tau, v_rest, theta, hard_reset):
    """drive: (T, M) float64 -> (T, M) bool spikes, starting from rest."""
    steps, m = drive.shape
    v = np.full(m, v_rest)
    out = np.zeros((steps, m), dtype=np.bool_)
    for t in range(steps):
        for i in range(m):
            vh = v[i] - (v[i] - v_rest) / tau + drive[t, i]
            if vh >= theta:
                out[t, i] = True
                v[i] = v_rest if hard_reset else vh - theta
            else:
                v[i] = vh
    return out


@njit(cache=True)
def liquid_scan(x, in_ptr, in_idx, in_val, rec_ptr, rec_idx, rec_val,
                n, tau, v_rest, theta, hard_reset, raster):
    """Simulate a batch of samples through a reservoir.

    x: (B, T, n_in) bool input spikes. Weights come as CSC columns
    (``*_ptr``, ``*_idx``, ``*_val``), so a presynaptic spike adds its column.
    Drive sums run over presynaptic index in ascending order, input first.
    Returns per-neuron counts (B, n); fills ``raster`` (B, T, n) when it is
    non-empty.
    """
    batch, steps, n_in = x.shape
    keep = raster.shape[0] > 0
    counts = np.zeros((batch, n), dtype=np.int64)
    v = np.empty(n)
    prev = np.zeros(n, dtype=np.bool_)
    drive = np.empty(n)
    for b in range(batch):
        v[:] = v_rest
        prev[:] = False
        for t in range(steps):
            drive[:] = 0.0
            for j in range(n_in):
                if x[b, t, j]:
                    for k in range(in_ptr[j], in_ptr[j + 1]):
                        drive[in_idx[k]] += in_val[k]
            for j in range(n):
                if prev[j]:
                    for k in range(rec_ptr[j], rec_ptr[j + 1]):
                        drive[rec_idx[k]] += rec_val[k]
            for i in range(n):
                vh = v[i] - (v[i] - v_rest) / tau + drive[i]
                fired = vh >= theta
                prev[i] = fired
                if fired:
                    counts[b, i] += 1
                    v[i] = v_rest if hard_reset else vh - theta
                else:
                    v[i] = vh
                if keep:
                    raster[b, t, i] = fired
    return counts


@njit(cache=True)
def stdp_scan(w, pre, post, a_plus, a_minus, decay_pre, decay_post, w_min, w_max):
    """Event-driven pair STDP with clamping after every update; edits ``w`` in place."""
    steps, n_pre = pre.shape
    n_post = post.shape[1]
    x_pre = np.zeros(n_pre)
    x_post = np.zeros(n_post)
    traced = np.empty(n_post, dtype=np.int64)
    for t in range(steps):
        for j in range(n_pre):
            x_pre[j] = x_pre[j] * decay_pre + (1.0 if pre[t, j] else 0.0)
        n_traced = 0
        for i in range(n_post):
            x_post[i] = x_post[i] * decay_post + (1.0 if post[t, i] else 0.0)
            if x_post[i] != 0.0:
                traced[n_traced] = i
                n_traced += 1
        for i in range(n_post):
            if post[t, i]:
                for j in range(n_pre):
                    w[i, j] = min(max(w[i, j] + a_plus * x_pre[j], w_min), w_max)
        # depression only touches rows whose post trace is non-zero
        for j in range(n_pre):
            if pre[t, j]:
                for k in range(n_traced):
                    i = traced[k]
                    w[i, j] = min(max(w[i, j] - a_minus * x_post[i], w_min), w_max)
