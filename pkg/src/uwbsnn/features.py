"""RF feature vectors, FP_IDX-anchored CIR segments, padding and min-max scaling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import Sample
from .errors import ConfigError, FeatureError, InsufficientDataError, ShapeError

__all__ = [
    "DEFAULT_RF_FEATURES",
    "FP_POWER",
    "SEGMENT_LENGTHS",
    "CirSegment",
    "NormalizationStats",
    "RfVector",
    "apply_normalizer",
    "extract_cir_segment",
    "extract_rf",
    "fit_normalizer",
    "pad_uniform",
    "unpad_uniform",
]

# derived feature: (FP_AMP1^2 + FP_AMP2^2 + FP_AMP3^2) / RXPACC^2
FP_POWER = "FP_POWER"

DEFAULT_RF_FEATURES = (
    "RANGE",
    "FP_IDX",
    "FP_AMP1",
    "FP_AMP2",
    "FP_AMP3",
    "STDEV_NOISE",
    "CIR_PWR",
    "MAX_NOISE",
    "RXPACC",
    FP_POWER,
)
RF_DIM = 10
SEGMENT_LENGTHS = (50, 120)
DEFAULT_SPACING = 10


@dataclass(frozen=True)
class RfVector:
    values: np.ndarray
    names: tuple[str, ...]


@dataclass(frozen=True)
class CirSegment:
    values: np.ndarray
    segment_len: int
    padded: bool = False
    spacing: int = 0


def _register(sample: Sample, name: str) -> float:
    try:
        return float(sample.rf_raw[name])
    except KeyError:
        raise FeatureError(f"record {sample.uid}: missing RF register {name!r}") from None


def _fp_power(sample: Sample) -> float:
    amps = [_register(sample, f"FP_AMP{k}") for k in (1, 2, 3)]
    rxpacc = _register(sample, "RXPACC")
    if rxpacc == 0.0:
        return 0.0
    return (amps[0] ** 2 + amps[1] ** 2 + amps[2] ** 2) / rxpacc**2


def extract_rf(sample: Sample, features: Sequence[str] = DEFAULT_RF_FEATURES) -> RfVector:
    features = tuple(features)
    if len(features) != RF_DIM:
        raise ConfigError(f"RF feature list must have {RF_DIM} entries, got {len(features)}")
    values = np.array(
        [_fp_power(sample) if name == FP_POWER else _register(sample, name) for name in features],
        dtype=np.float64,
    )
    if not np.all(np.isfinite(values)):
        raise FeatureError(f"record {sample.uid}: non-finite RF feature")
    return RfVector(values, features)


def extract_cir_segment(sample: Sample, segment_len: int) -> CirSegment:
    """``cir[fp_idx : fp_idx + segment_len]``, zero-filled past the record end."""
    if segment_len not in SEGMENT_LENGTHS:
        raise ConfigError(f"segment_len must be one of {SEGMENT_LENGTHS}, got {segment_len}")
    out = np.zeros(segment_len)
    chunk = sample.cir[sample.fp_idx : sample.fp_idx + segment_len]
    out[: len(chunk)] = chunk
    return CirSegment(out, segment_len)


def pad_uniform(segment: CirSegment, spacing: int = DEFAULT_SPACING) -> CirSegment:
    """Insert one zero after every ``spacing`` consecutive samples."""
    if spacing <= 0:
        raise ConfigError(f"padding spacing must be positive, got {spacing}")
    if segment.padded:
        raise ConfigError("segment is already padded")
    n = len(segment.values)
    out = np.zeros(n + n // spacing)
    idx = np.arange(n)
    out[idx + idx // spacing] = segment.values
    return CirSegment(out, segment.segment_len, padded=True, spacing=spacing)


def unpad_uniform(segment: CirSegment) -> CirSegment:
    if not segment.padded:
        return segment
    n = segment.segment_len
    idx = np.arange(n)
    return CirSegment(segment.values[idx + idx // segment.spacing].copy(), n)


@dataclass(frozen=True)
class NormalizationStats:
    lo: np.ndarray
    hi: np.ndarray

    def to_dict(self) -> dict:
        return {"lo": self.lo.tolist(), "hi": self.hi.tolist()}


def fit_normalizer(train) -> NormalizationStats:
    """Per-dimension min/max of the training rows."""
    data = np.asarray(train, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] == 0:
        raise InsufficientDataError("cannot fit normalizer on an empty training set")
    return NormalizationStats(data.min(axis=0), data.max(axis=0))


def apply_normalizer(stats: NormalizationStats, vector) -> np.ndarray:
    """Affine map of each dimension onto [0, 1] with clamping.

    Dimensions that were constant in training map to 0.
    """
    x = np.asarray(vector, dtype=np.float64)
    if x.shape[-1] != len(stats.lo):
        raise ShapeError(f"expected {len(stats.lo)} dimensions, got {x.shape[-1]}")
    span = stats.hi - stats.lo
    const = span <= 0
    scaled = (x - stats.lo) / np.where(const, 1.0, span)
    scaled = np.where(const, 0.0, scaled)
    return np.clip(scaled, 0.0, 1.0)
