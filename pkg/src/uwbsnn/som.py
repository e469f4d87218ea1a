"""Spiking self-organizing map trained with pair-based STDP.

Each pattern (a [0, 1] rate vector, or a ready-made spike train) is shown
to a grid of LIF neurons for ``steps`` time steps. Presentation is two-pass:

1. competition: run without modifiers; the neuron with the most output
   spikes wins (ties go to the lowest index);
2. response: run again on the same input spikes with the winner's
   neighbourhood excited (Gaussian in grid distance) and every other neuron
   held down by a constant negative drive.

Training applies STDP to the response-pass spikes. Labels and predictions
are read from response-pass spike counts as well.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ._kernels import stdp_scan
from .encoding import SpikeTrain, encode_batch
from .errors import ConfigError, FormatError, InsufficientDataError, ShapeError, StateError
from .lif import LifParams, integrate

__all__ = [
    "SomConfig",
    "SomNetwork",
    "StdpParams",
    "apply_neighborhood",
    "assign_labels",
    "classify",
    "classify_batch",
    "init_som",
    "load_som",
    "respond",
    "save_som",
    "som_forward",
    "stdp_update",
    "train_som",
]

COMPETITION_MODES = ("lif", "input")
FORMAT_VERSION = 1


@dataclass(frozen=True)
class StdpParams:
    a_plus: float = 0.001
    a_minus: float = 0.0008
    tau_plus: float = 20.0
    tau_minus: float = 20.0
    w_min: float = 0.0
    w_max: float = 1.0

    def __post_init__(self):
        if not self.w_min < self.w_max:
            raise ConfigError("w_min must be below w_max")
        if self.a_plus < 0 or self.a_minus < 0:
            raise ConfigError("STDP amplitudes must be nonnegative")
        if self.tau_plus < 1 or self.tau_minus < 1:
            raise ConfigError("STDP time constants must be >= 1")


@dataclass(frozen=True)
class SomConfig:
    """``drive_gain`` scales ``w @ x / n_inputs``; ``w_mean`` is the per-row
    mean weight restored after each update (None turns normalization off)."""

    grid: tuple[int, int] = (10, 10)
    radius0: float = 3.0
    radius_decay: float = 0.5
    excite_gain: float = 0.1
    inhibit_strength: float = 2.0
    epochs: int = 2
    steps: int = 100
    max_rate: float = 0.5
    drive_gain: float = 16.0
    w_mean: float | None = 0.3
    w_init: float = 0.6
    competition: str = "lif"
    seed: int = 0
    stdp: StdpParams = field(default_factory=StdpParams)
    lif: LifParams = field(default_factory=LifParams)

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(self.grid))
        rows, cols = self.grid
        if rows * cols < 2:
            raise ConfigError("SOM grid needs at least one neuron per class")
        if self.radius0 < 0:
            raise ConfigError("radius0 must be >= 0")
        if not 0 < self.radius_decay <= 1:
            raise ConfigError("radius_decay must lie in (0, 1]")
        if self.epochs < 0 or self.steps < 1:
            raise ConfigError("epochs must be >= 0 and steps >= 1")
        if not 0 <= self.max_rate <= 1:
            raise ConfigError("max_rate must lie in [0, 1]")
        if self.competition not in COMPETITION_MODES:
            raise ConfigError(f"competition must be one of {COMPETITION_MODES}")
        if self.w_mean is not None and not self.stdp.w_min <= self.w_mean <= self.stdp.w_max:
            raise ConfigError("w_mean must lie within the STDP weight bounds")

    @property
    def n_neurons(self) -> int:
        return self.grid[0] * self.grid[1]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grid"] = list(self.grid)
        return d


@dataclass
class SomNetwork:
    w: np.ndarray
    cfg: SomConfig
    positions: np.ndarray
    radius: float
    labels: np.ndarray | None = None
    label_scores: np.ndarray | None = None

    @property
    def n_neurons(self) -> int:
        return self.w.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.w.shape[1]

    def weight_hash(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.w).tobytes()).hexdigest()


def _normalize_rows(w: np.ndarray, cfg: SomConfig) -> None:
    if cfg.w_mean is None:
        return
    means = w.mean(axis=1, keepdims=True)
    np.divide(w * cfg.w_mean, means, out=w, where=means > 0)
    np.clip(w, cfg.stdp.w_min, cfg.stdp.w_max, out=w)


def init_som(cfg: SomConfig, n_inputs: int) -> SomNetwork:
    if n_inputs <= 0:
        raise ConfigError("SOM needs at least one input")
    rng = np.random.default_rng([cfg.seed, 0])
    lo, hi = cfg.stdp.w_min, min(cfg.w_init, cfg.stdp.w_max)
    w = rng.uniform(lo, hi, (cfg.n_neurons, n_inputs))
    _normalize_rows(w, cfg)
    rows, cols = np.divmod(np.arange(cfg.n_neurons), cfg.grid[1])
    positions = np.stack([rows, cols], axis=1).astype(np.float64)
    return SomNetwork(w=w, cfg=cfg, positions=positions, radius=float(cfg.radius0))


def apply_neighborhood(net: SomNetwork, winner: int, radius: float) -> np.ndarray:
    """Per-neuron drive offsets for the response pass.

    Neurons within ``radius`` (Euclidean grid distance) of the winner get
    ``excite_gain * exp(-d^2 / 2r^2)``; all others get ``-inhibit_strength``.
    """
    d = np.linalg.norm(net.positions - net.positions[winner], axis=1)
    inside = d <= radius
    r2 = 2.0 * radius * radius
    bump = np.exp(-(d * d) / r2) if radius > 0 else (d == 0).astype(np.float64)
    return np.where(inside, net.cfg.excite_gain * bump, -net.cfg.inhibit_strength)


def _neighborhood_batch(net: SomNetwork, winners: np.ndarray, radius: float) -> np.ndarray:
    diff = net.positions[None, :, :] - net.positions[winners][:, None, :]
    d2 = (diff**2).sum(axis=2)
    inside = d2 <= radius * radius
    bump = np.exp(-d2 / (2.0 * radius * radius)) if radius > 0 else (d2 == 0).astype(np.float64)
    return np.where(inside, net.cfg.excite_gain * bump, -net.cfg.inhibit_strength)


def _raster(net: SomNetwork, pattern, seed) -> np.ndarray:
    if isinstance(pattern, SpikeTrain):
        if pattern.channels != net.n_inputs:
            raise ShapeError(f"SOM expects {net.n_inputs} channels, got {pattern.channels}")
        return pattern.raster
    x = np.asarray(pattern, dtype=np.float64).ravel()
    if x.shape != (net.n_inputs,):
        raise ShapeError(f"SOM expects {net.n_inputs} inputs, got {x.shape[0]}")
    return encode_batch(x[None], net.cfg.steps, net.cfg.max_rate, [seed])[0]


def _drive(net: SomNetwork, raster: np.ndarray) -> np.ndarray:
    return (raster @ net.w.T) * (net.cfg.drive_gain / net.n_inputs)


def _winner(net: SomNetwork, raster: np.ndarray, counts: np.ndarray) -> int:
    if net.cfg.competition == "input":
        return int(np.argmax(net.w @ raster.sum(axis=0)))
    return int(np.argmax(counts))


def som_forward(net: SomNetwork, pattern, seed=0, modifiers=None):
    """Show one pattern; returns ``(counts, winner)``.

    ``modifiers`` is an optional constant per-neuron drive offset.
    """
    raster = _raster(net, pattern, seed)
    drive = _drive(net, raster.astype(np.float64))
    if modifiers is not None:
        drive = drive + modifiers
    counts = integrate(drive, net.cfg.lif).sum(axis=0)
    return counts, _winner(net, raster, counts)


def _present(net: SomNetwork, raster: np.ndarray, radius: float):
    x = raster.astype(np.float64)
    drive = _drive(net, x)
    counts = integrate(drive, net.cfg.lif).sum(axis=0)
    winner = _winner(net, raster, counts)
    post = integrate(drive + apply_neighborhood(net, winner, radius), net.cfg.lif)
    return winner, post


def _stdp_loop(w, pre, post, p, rows, hook):
    decay_pre = np.exp(-1.0 / p.tau_plus)
    decay_post = np.exp(-1.0 / p.tau_minus)
    x_pre = np.zeros(pre.shape[1])
    x_post = np.zeros(len(rows))
    sub = w[rows]
    post = post[:, rows] > 0
    for t in range(pre.shape[0]):
        x_pre = x_pre * decay_pre + pre[t]
        x_post = x_post * decay_post + post[t]
        fired = post[t]
        if fired.any():
            sub[fired] += p.a_plus * x_pre
            np.clip(sub, p.w_min, p.w_max, out=sub)
            if hook is not None:
                w[rows] = sub
                hook(w)
        if pre[t].any() and x_post.any():
            sub -= p.a_minus * np.outer(x_post, pre[t])
            np.clip(sub, p.w_min, p.w_max, out=sub)
            if hook is not None:
                w[rows] = sub
                hook(w)
    w[rows] = sub


def stdp_update(w, pre_train, post_train, p: StdpParams, hook: Callable | None = None) -> np.ndarray:
    """Trace-based pair STDP over one window; returns the updated copy of ``w``.

    Traces decay by ``exp(-1/tau)`` per step and jump by 1 on a spike. At
    each step a post spike adds ``a_plus * x_pre`` to its row, then a pre
    spike subtracts ``a_minus * x_post`` from its column; weights are
    clamped to ``[w_min, w_max]`` after each of those updates.

    ``hook`` (if given) sees ``w`` after every individual update; this runs
    a slower step loop.
    """
    pre = np.asarray(pre_train.raster if isinstance(pre_train, SpikeTrain) else pre_train, dtype=np.float64)
    post = np.asarray(post_train.raster if isinstance(post_train, SpikeTrain) else post_train, dtype=np.float64)
    w = np.array(w, dtype=np.float64)
    if pre.shape[0] != post.shape[0] or w.shape != (post.shape[1], pre.shape[1]):
        raise ShapeError(f"w {w.shape} does not match pre {pre.shape} / post {post.shape}")
    active = np.flatnonzero(post.any(axis=0))
    if active.size == 0 or not pre.any():
        return w
    if hook is not None:
        _stdp_loop(w, pre, post, p, active, hook)
    else:
        stdp_scan(w, pre > 0, post > 0, p.a_plus, p.a_minus,
                  np.exp(-1.0 / p.tau_plus), np.exp(-1.0 / p.tau_minus), p.w_min, p.w_max)
    return w


def train_som(net: SomNetwork, patterns, hook: Callable | None = None) -> SomNetwork:
    """Unsupervised training on ``patterns`` (rows of [0, 1] rates).

    Labels never reach this function. Presentation order is reshuffled
    each epoch from the config seed; the neighbourhood radius is multiplied
    by ``radius_decay`` after every epoch.
    """
    x = np.asarray(patterns, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise InsufficientDataError("train_som needs a non-empty 2-D pattern matrix")
    if x.shape[1] != net.n_inputs:
        raise ShapeError(f"SOM expects {net.n_inputs} inputs, got {x.shape[1]}")
    cfg = net.cfg
    for epoch in range(cfg.epochs):
        order = np.random.default_rng([cfg.seed, 1, epoch]).permutation(x.shape[0])
        for i in order:
            raster = encode_batch(x[i][None], cfg.steps, cfg.max_rate, [(cfg.seed, 2, epoch, int(i))])[0]
            _, post = _present(net, raster, net.radius)
            net.w = stdp_update(net.w, raster, post, cfg.stdp, hook)
            if cfg.w_mean is not None:
                _normalize_rows(net.w, cfg)
                if hook is not None:
                    hook(net.w)
        net.radius *= cfg.radius_decay
    return net


def respond(net: SomNetwork, patterns, seeds: Sequence, chunk: int = 64) -> np.ndarray:
    """Response-pass spike counts for a batch of patterns, shape ``(B, n_neurons)``.

    Read-only with respect to the weights.
    """
    x = np.asarray(patterns, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != net.n_inputs:
        raise ShapeError(f"expected (B, {net.n_inputs}) patterns, got {x.shape}")
    cfg = net.cfg
    scale = cfg.drive_gain / net.n_inputs
    out = np.zeros((x.shape[0], net.n_neurons), dtype=np.int64)
    for start in range(0, x.shape[0], chunk):
        stop = start + chunk
        raster = encode_batch(x[start:stop], cfg.steps, cfg.max_rate, seeds[start:stop])
        b, steps, _ = raster.shape
        xr = raster.astype(np.float64)
        drive = ((xr.reshape(b * steps, -1) @ net.w.T) * scale).reshape(b, steps, -1).transpose(1, 0, 2)
        counts = integrate(drive, cfg.lif).sum(axis=0)
        if cfg.competition == "input":
            winners = np.argmax(xr.sum(axis=1) @ net.w.T, axis=1)
        else:
            winners = np.argmax(counts, axis=1)
        mods = _neighborhood_batch(net, winners, net.radius)
        out[start:stop] = integrate(drive + mods[None], cfg.lif).sum(axis=0)
    return out


def _check_labels(labels, n_classes) -> np.ndarray:
    y = np.asarray(labels, dtype=np.int64)
    if y.size and (y.min() < 0 or y.max() >= n_classes):
        raise ConfigError(f"labels must lie in [0, {n_classes})")
    return y


def assign_labels(net: SomNetwork, patterns, labels, n_classes: int = 2, seeds=None) -> SomNetwork:
    """Label every neuron with the class that makes it fire most on average.

    ``label_scores[n, c]`` is neuron n's mean spike count over class-c
    samples (0 for a class with no samples); ties resolve to class 0.
    """
    x = np.asarray(patterns, dtype=np.float64)
    y = _check_labels(labels, n_classes)
    if len(y) != len(x):
        raise ShapeError("patterns and labels differ in length")
    if seeds is None:
        seeds = [(net.cfg.seed, 3, i) for i in range(len(x))]
    counts = respond(net, x, seeds)
    return label_from_counts(net, counts, y, n_classes)


def label_from_counts(net: SomNetwork, counts, labels, n_classes: int = 2) -> SomNetwork:
    counts = np.asarray(counts, dtype=np.float64)
    y = _check_labels(labels, n_classes)
    scores = np.zeros((net.n_neurons, n_classes))
    for c in range(n_classes):
        members = y == c
        if members.any():
            scores[:, c] = counts[members].mean(axis=0)
    net.label_scores = scores
    net.labels = np.argmax(scores, axis=1)
    return net


def predict_from_counts(net: SomNetwork, counts, n_classes: int = 2) -> np.ndarray:
    """Class with the highest mean count over its labelled neurons; ties -> 0."""
    if net.labels is None:
        raise StateError("assign_labels must run before classification")
    counts = np.atleast_2d(np.asarray(counts, dtype=np.float64))
    scores = np.full((counts.shape[0], n_classes), -np.inf)
    for c in range(n_classes):
        members = net.labels == c
        if members.any():
            scores[:, c] = counts[:, members].mean(axis=1)
    return np.argmax(scores, axis=1)


def classify(net: SomNetwork, pattern, seed=0, n_classes: int = 2) -> int:
    if net.labels is None:
        raise StateError("assign_labels must run before classify")
    counts = respond(net, np.asarray(pattern, dtype=np.float64)[None], [seed])
    return int(predict_from_counts(net, counts, n_classes)[0])


def classify_batch(net: SomNetwork, patterns, seeds=None, n_classes: int = 2) -> np.ndarray:
    if net.labels is None:
        raise StateError("assign_labels must run before classify")
    x = np.asarray(patterns, dtype=np.float64)
    if seeds is None:
        seeds = [(net.cfg.seed, 4, i) for i in range(len(x))]
    return predict_from_counts(net, respond(net, x, seeds), n_classes)


def _config_json(cfg: SomConfig) -> str:
    return json.dumps(cfg.to_dict(), sort_keys=True)


def save_som(net: SomNetwork, path) -> None:
    """Write weights, labels and the config (plus its sha256) to an ``.npz``."""
    cfg_json = _config_json(net.cfg)
    extra = {}
    if net.labels is not None:
        extra = {"labels": net.labels, "label_scores": net.label_scores}
    with Path(path).open("wb") as fh:
        np.savez(
            fh,
            format_version=np.array(FORMAT_VERSION),
            w=net.w,
            radius=np.array(net.radius),
            config=np.array(cfg_json),
            config_hash=np.array(hashlib.sha256(cfg_json.encode()).hexdigest()),
            **extra,
        )


def load_som(path) -> SomNetwork:
    with np.load(path, allow_pickle=False) as data:
        if int(data["format_version"]) != FORMAT_VERSION:
            raise FormatError(f"unsupported SOM file version {int(data['format_version'])}")
        cfg_json = str(data["config"])
        if hashlib.sha256(cfg_json.encode()).hexdigest() != str(data["config_hash"]):
            raise FormatError("SOM file config hash mismatch")
        raw = json.loads(cfg_json)
        cfg = SomConfig(**{**raw, "stdp": StdpParams(**raw["stdp"]), "lif": LifParams(**raw["lif"])})
        net = init_som(cfg, data["w"].shape[1])
        net.w = data["w"].copy()
        net.radius = float(data["radius"])
        if "labels" in data:
            net.labels = data["labels"].copy()
            net.label_scores = data["label_scores"].copy()
    return net


def with_seed(cfg: SomConfig, seed: int) -> SomConfig:
    return replace(cfg, seed=seed)
