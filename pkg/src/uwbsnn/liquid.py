"""Fixed random recurrent LIF reservoirs (liquid state machine encoders)."""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import sparse

from ._kernels import liquid_scan
from .encoding import SpikeTrain
from .errors import ConfigError, ShapeError
from .lif import LifParams, LifPopulation

__all__ = [
    "LiquidConfig",
    "LiquidNetwork",
    "build_liquid",
    "liquid_summary",
    "run_liquid",
    "run_liquid_batch",
]


@dataclass(frozen=True)
class LiquidConfig:
    n_neurons: int = 400
    exc_fraction: float = 0.8
    p_rec: float = 0.1
    p_in: float = 0.1
    w_scale_in: float = 0.6
    w_scale_rec: float = 0.1
    allow_self: bool = True
    seed: int = 0
    lif: LifParams = field(default_factory=LifParams)

    def __post_init__(self):
        if self.n_neurons < 1:
            raise ConfigError("n_neurons must be >= 1")
        for name in ("exc_fraction", "p_rec", "p_in"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.w_scale_in < 0 or self.w_scale_rec < 0:
            raise ConfigError("weight scales must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class LiquidNetwork:
    """Weights are stored read-only; ``w_rec[i, j]`` is the synapse j -> i."""

    w_in: np.ndarray
    w_rec: np.ndarray
    signs: np.ndarray
    params: LifParams

    @property
    def n_neurons(self) -> int:
        return self.w_rec.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.w_in.shape[1]

    def population(self) -> LifPopulation:
        return LifPopulation(self.params, self.n_neurons)

    def weight_hash(self) -> str:
        h = hashlib.sha256()
        h.update(self.w_in.tobytes())
        h.update(self.w_rec.tobytes())
        return h.hexdigest()


def build_liquid(cfg: LiquidConfig, n_inputs: int) -> LiquidNetwork:
    """Sample a reservoir obeying Dale's law.

    Each edge exists independently with probability ``p_rec`` (``p_in`` for
    input edges); magnitudes are half-normal and the sign follows the
    presynaptic neuron. Input weights are all excitatory.
    """
    if n_inputs <= 0:
        raise ConfigError(f"n_inputs must be positive, got {n_inputs}")
    n = cfg.n_neurons
    rng = np.random.default_rng(cfg.seed)

    n_exc = int(round(cfg.exc_fraction * n))
    signs = np.full(n, -1.0)
    signs[rng.permutation(n)[:n_exc]] = 1.0

    mask = rng.random((n, n)) < cfg.p_rec
    if not cfg.allow_self:
        np.fill_diagonal(mask, False)
    mag = np.abs(rng.normal(0.0, cfg.w_scale_rec, (n, n)))
    w_rec = np.where(mask, mag * signs[None, :], 0.0)

    mask_in = rng.random((n, n_inputs)) < cfg.p_in
    w_in = np.where(mask_in, np.abs(rng.normal(0.0, cfg.w_scale_in, (n, n_inputs))), 0.0)

    w_in.flags.writeable = False
    w_rec.flags.writeable = False
    signs.flags.writeable = False
    return LiquidNetwork(w_in=w_in, w_rec=w_rec, signs=signs, params=cfg.lif)


def _csc(w: np.ndarray):
    m = sparse.csc_matrix(w)
    m.sort_indices()
    return m.indptr.astype(np.int64), m.indices.astype(np.int64), m.data.astype(np.float64)


def _simulate(net: LiquidNetwork, x: np.ndarray, keep_raster: bool):
    """x: (B, T, n_inputs) bool. Recurrent spikes arrive one step late."""
    p = net.params
    raster = np.zeros(x.shape[:2] + (net.n_neurons,) if keep_raster else (0, 0, 0), dtype=bool)
    counts = liquid_scan(
        np.ascontiguousarray(x, dtype=bool), *_csc(net.w_in), *_csc(net.w_rec),
        net.n_neurons, float(p.tau_m), float(p.v_rest), float(p.theta),
        p.reset_mode == "hard", raster,
    )
    return counts, (raster if keep_raster else None)


def run_liquid(net: LiquidNetwork, input: SpikeTrain):
    """Simulate one sample from rest; returns ``(raster, per-neuron spike counts)``."""
    if input.channels != net.n_inputs:
        raise ShapeError(f"liquid expects {net.n_inputs} channels, got {input.channels}")
    counts, raster = _simulate(net, input.raster[None], keep_raster=True)
    return SpikeTrain(raster[0]), counts[0]


def run_liquid_batch(net: LiquidNetwork, trains: np.ndarray) -> np.ndarray:
    """Spike-count readout for a ``(B, T, n_inputs)`` stack of independent samples."""
    trains = np.asarray(trains, dtype=bool)
    if trains.ndim != 3 or trains.shape[2] != net.n_inputs:
        raise ShapeError(f"expected (B, T, {net.n_inputs}) input, got {trains.shape}")
    return _simulate(net, trains, False)[0]


def liquid_summary(net: LiquidNetwork) -> dict:
    """Weight statistics for debugging dumps."""
    exc = net.signs > 0
    nz = net.w_rec != 0
    radius = float(np.max(np.abs(np.linalg.eigvals(net.w_rec)))) if net.n_neurons <= 1000 else None
    return {
        "n_neurons": net.n_neurons,
        "n_inputs": net.n_inputs,
        "n_excitatory": int(exc.sum()),
        "n_inhibitory": int((~exc).sum()),
        "rec_density": float(nz.mean()),
        "self_connections": int(np.count_nonzero(np.diag(net.w_rec))),
        "in_density": float((net.w_in != 0).mean()),
        "rec_exc_mean": float(net.w_rec[:, exc][nz[:, exc]].mean()) if (nz[:, exc]).any() else 0.0,
        "rec_inh_mean": float(net.w_rec[:, ~exc][nz[:, ~exc]].mean()) if (nz[:, ~exc]).any() else 0.0,
        "in_mean": float(net.w_in[net.w_in != 0].mean()) if (net.w_in != 0).any() else 0.0,
        "spectral_radius": radius,
        "weight_hash": net.weight_hash(),
    }
