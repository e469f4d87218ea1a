"""Bernoulli rate coding of [0, 1] feature vectors into binary spike rasters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ConfigError, EncodingError, FormatError, ShapeError

__all__ = [
    "EncoderConfig",
    "SpikeTrain",
    "concat_trains",
    "encode_batch",
    "encode_rate",
]

Seed = Union[int, Sequence[int]]


@dataclass(frozen=True, eq=False)
class SpikeTrain:
    """Binary spike raster of shape ``(steps, channels)``."""

    raster: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.raster)
        if r.ndim != 2:
            raise ShapeError(f"raster must be 2-D (steps, channels), got shape {r.shape}")
        if r.dtype != bool:
            if not np.isin(r, (0, 1)).all():
                raise EncodingError("raster entries must be 0 or 1")
            r = r.astype(bool)
        object.__setattr__(self, "raster", r)

    @classmethod
    def silent(cls, steps: int, channels: int) -> "SpikeTrain":
        return cls(np.zeros((steps, channels), dtype=bool))

    @property
    def steps(self) -> int:
        return self.raster.shape[0]

    @property
    def channels(self) -> int:
        return self.raster.shape[1]

    def counts(self) -> np.ndarray:
        return self.raster.sum(axis=0)

    def total(self) -> int:
        return int(self.raster.sum())

    def __eq__(self, other):
        if not isinstance(other, SpikeTrain):
            return NotImplemented
        return np.array_equal(self.raster, other.raster)

    def to_events(self) -> str:
        """Text form: a ``# steps=T channels=N`` header, then one ``t n`` line per spike."""
        t, n = np.nonzero(self.raster)
        lines = [f"# steps={self.steps} channels={self.channels}"]
        lines += [f"{a} {b}" for a, b in zip(t.tolist(), n.tolist())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_events(cls, text: str) -> "SpikeTrain":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("#"):
            raise FormatError("event list must start with a '# steps=.. channels=..' header")
        try:
            meta = dict(tok.split("=") for tok in lines[0][1:].split())
            steps, channels = int(meta["steps"]), int(meta["channels"])
        except (KeyError, ValueError):
            raise FormatError(f"bad event-list header: {lines[0]!r}") from None
        raster = np.zeros((steps, channels), dtype=bool)
        for ln in lines[1:]:
            t, n = map(int, ln.split())
            if not (0 <= t < steps and 0 <= n < channels):
                raise FormatError(f"event ({t}, {n}) outside {steps}x{channels}")
            if raster[t, n]:
                raise FormatError(f"duplicate event ({t}, {n})")
            raster[t, n] = True
        return cls(raster)


@dataclass(frozen=True)
class EncoderConfig:
    steps: int = 250
    max_rate: float = 0.5
    seed: Seed = 0

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")
        if not 0.0 <= self.max_rate <= 1.0:
            raise ConfigError(f"max_rate must lie in [0, 1], got {self.max_rate}")


def _raster(p: np.ndarray, steps: int, seed: Seed) -> np.ndarray:
    # Draws are channel-major, so channel n always consumes the same slice of
    # the stream for a given seed whatever the vector length.
    u = np.random.default_rng(seed).random((len(p), steps))
    return (u < p[:, None]).T


def _check_unit(x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)) or x.min(initial=0.0) < 0.0 or x.max(initial=0.0) > 1.0:
        raise EncodingError("rate-coded inputs must lie in [0, 1]")


def encode_rate(vector, cfg: EncoderConfig = EncoderConfig()) -> SpikeTrain:
    """Channel n fires each step with probability ``vector[n] * max_rate``."""
    x = np.asarray(vector, dtype=np.float64).ravel()
    _check_unit(x)
    return SpikeTrain(_raster(x * cfg.max_rate, cfg.steps, cfg.seed))


def encode_batch(matrix, steps: int, max_rate: float, seeds: Sequence[Seed]) -> np.ndarray:
    """Encode each row with its own seed; returns a ``(B, steps, N)`` bool array."""
    x = np.asarray(matrix, dtype=np.float64)
    if x.ndim != 2 or len(seeds) != x.shape[0]:
        raise ShapeError("need one seed per row of a 2-D matrix")
    _check_unit(x)
    out = np.empty((x.shape[0], steps, x.shape[1]), dtype=bool)
    for i, seed in enumerate(seeds):
        out[i] = _raster(x[i] * max_rate, steps, seed)
    return out


def concat_trains(a: SpikeTrain, b: SpikeTrain) -> SpikeTrain:
    """Stack channels: ``a`` first, then ``b`` offset by ``a.channels``."""
    if a.steps != b.steps:
        raise ShapeError(f"step counts differ: {a.steps} vs {b.steps}")
    return SpikeTrain(np.concatenate([a.raster, b.raster], axis=1))
