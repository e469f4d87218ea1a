"""Discrete-time leaky integrate-and-fire neurons.

One step of the recurrence::

    V^[t] = V[t-1] - (V[t-1] - V_rest) / tau_m + drive[t]
    S[t]  = V^[t] >= theta
    V[t]  = V^[t] - S[t] * theta          (soft reset, default)
    V[t]  = V_rest where S[t]             (hard reset)

There is no refractory period.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import lif_scan
from .encoding import SpikeTrain
from .errors import ConfigError, NumericError, ShapeError

__all__ = ["LifParams", "LifPopulation", "advance", "integrate", "lif_step", "run_population"]

RESET_MODES = ("soft", "hard")


@dataclass(frozen=True)
class LifParams:
    tau_m: float = 20.0
    v_rest: float = 0.0
    theta: float = 1.0
    reset_mode: str = "soft"

    def __post_init__(self):
        if self.tau_m < 1:
            raise ConfigError(f"tau_m must be >= 1, got {self.tau_m}")
        if not self.theta > self.v_rest:
            raise ConfigError("theta must exceed v_rest")
        if self.reset_mode not in RESET_MODES:
            raise ConfigError(f"reset_mode must be one of {RESET_MODES}")


@dataclass
class LifPopulation:
    params: LifParams
    n: int
    v: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.v is None:
            self.v = np.full(self.n, self.params.v_rest, dtype=np.float64)
        else:
            self.v = np.array(self.v, dtype=np.float64)
            if self.v.shape != (self.n,):
                raise ShapeError(f"v must have shape ({self.n},), got {self.v.shape}")

    def reset(self) -> None:
        self.v = np.full(self.n, self.params.v_rest, dtype=np.float64)


def advance(v: np.ndarray, drive: np.ndarray, p: LifParams):
    """Array form of one step; works on any matching shapes. Returns (v, spikes)."""
    v_hat = v - (v - p.v_rest) / p.tau_m + drive
    spikes = v_hat >= p.theta
    if p.reset_mode == "soft":
        v_new = v_hat - spikes * p.theta
    else:
        v_new = np.where(spikes, p.v_rest, v_hat)
    return v_new, spikes


def lif_step(pop: LifPopulation, drive):
    """Advance ``pop`` one step in place; returns ``(pop, spikes)``."""
    drive = np.asarray(drive, dtype=np.float64)
    if drive.shape != (pop.n,):
        raise ShapeError(f"drive must have shape ({pop.n},), got {drive.shape}")
    if not np.all(np.isfinite(drive)):
        raise NumericError("drive contains non-finite values")
    pop.v, spikes = advance(pop.v, drive, pop.params)
    return pop, spikes


def integrate(drive: np.ndarray, p: LifParams, v0: np.ndarray | None = None) -> np.ndarray:
    """Run the recurrence over a precomputed drive of shape ``(T, ...)``.

    Starts from V_rest unless ``v0`` is given; returns the bool spike array.
    """
    if v0 is None:
        flat = np.ascontiguousarray(drive, dtype=np.float64).reshape(drive.shape[0], -1)
        out = lif_scan(flat, float(p.tau_m), float(p.v_rest), float(p.theta), p.reset_mode == "hard")
        return out.reshape(drive.shape)
    v = np.array(v0, dtype=np.float64)
    out = np.empty(drive.shape, dtype=bool)
    for t in range(drive.shape[0]):
        v, out[t] = advance(v, drive[t], p)
    return out


def run_population(pop: LifPopulation, input: SpikeTrain, weights) -> SpikeTrain:
    """Drive ``pop`` with ``weights @ X[t]`` for every step of ``input``.

    The membrane state is reset to V_rest first and left at its final value.
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (pop.n, input.channels):
        raise ShapeError(f"weights must be ({pop.n}, {input.channels}), got {w.shape}")
    pop.reset()
    drive = input.raster.astype(np.float64) @ w.T
    out = np.empty((input.steps, pop.n), dtype=bool)
    for t in range(input.steps):
        pop, out[t] = lif_step(pop, drive[t])
    return SpikeTrain(out)
