"""CSV ingestion of eWINE-style UWB records and the 5:2 train/test split."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np
import pandas as pd

from .errors import FormatError, InsufficientDataError, ParseError, SchemaError

__all__ = [
    "DEFAULT_RF_COLUMNS",
    "DatasetSplit",
    "Sample",
    "Schema",
    "load_dataset",
    "parse_dataset",
    "split_dataset",
    "write_dataset",
]

DEFAULT_RF_COLUMNS = (
    "RANGE",
    "FP_IDX",
    "FP_AMP1",
    "FP_AMP2",
    "FP_AMP3",
    "STDEV_NOISE",
    "CIR_PWR",
    "MAX_NOISE",
    "RXPACC",
)

TRAIN_PARTS, TEST_PARTS = 5, 2


@dataclass(frozen=True)
class Schema:
    """Column-name mapping for a dataset file.

    The CIR block is every column named ``<cir_prefix><k>``; its length is
    read from the header rather than fixed.
    """

    label: str = "NLOS"
    fp_idx: str = "FP_IDX"
    rf_columns: tuple[str, ...] = DEFAULT_RF_COLUMNS
    cir_prefix: str = "CIR"

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "Schema":
        known = {"label", "fp_idx", "rf_columns", "cir_prefix"}
        unknown = set(mapping) - known
        if unknown:
            raise SchemaError(f"unknown schema keys: {sorted(unknown)}")
        kwargs = dict(mapping)
        if "rf_columns" in kwargs:
            kwargs["rf_columns"] = tuple(kwargs["rf_columns"])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "fp_idx": self.fp_idx,
            "rf_columns": list(self.rf_columns),
            "cir_prefix": self.cir_prefix,
        }


@dataclass(frozen=True, eq=False)
class Sample:
    """One measurement record.

    ``uid`` is the record's position in the loaded dataset and serves as its
    identity for splitting and per-sample seeding.
    """

    label: int
    rf_raw: Mapping[str, float]
    cir: np.ndarray
    fp_idx: int
    uid: int = 0
    source: str = field(default="", compare=False)

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ParseError(f"label must be 0 or 1, got {self.label!r}")
        cir = np.array(self.cir, dtype=np.float64)
        if cir.ndim != 1:
            raise FormatError("cir must be one-dimensional")
        if not np.all(np.isfinite(cir)):
            raise ParseError(f"record {self.uid}: cir contains non-finite values")
        if not 0 <= self.fp_idx < len(cir):
            raise ParseError(
                f"record {self.uid}: fp_idx {self.fp_idx} outside [0, {len(cir)})"
            )
        cir.flags.writeable = False
        object.__setattr__(self, "cir", cir)
        object.__setattr__(self, "rf_raw", MappingProxyType(dict(self.rf_raw)))

    def same_fields(self, other: "Sample") -> bool:
        return (
            self.label == other.label
            and self.fp_idx == other.fp_idx
            and dict(self.rf_raw) == dict(other.rf_raw)
            and np.array_equal(self.cir, other.cir)
        )


@dataclass(frozen=True)
class DatasetSplit:
    train: list
    test: list


def _cir_columns(header: Sequence[str], prefix: str) -> list[str]:
    pattern = re.compile(rf"^{re.escape(prefix)}(\d+)$")
    found = [(int(m.group(1)), pos, name) for pos, name in enumerate(header)
             if (m := pattern.match(name))]
    if not found:
        raise SchemaError(f"no CIR columns with prefix {prefix!r} in header")
    found.sort()
    indices = [k for k, _, _ in found]
    positions = [p for _, p, _ in found]
    if indices != list(range(len(found))):
        raise FormatError(f"CIR columns {prefix}0..{prefix}{len(found) - 1} are not complete")
    if positions != list(range(positions[0], positions[0] + len(found))):
        raise FormatError("CIR column block is not contiguous in the header")
    return [name for _, _, name in found]


def _numeric(frame: pd.DataFrame, column: str, path: Path) -> np.ndarray:
    raw = frame[column]
    try:
        # numpy's str -> float is correctly rounded; pd.to_numeric is not
        return raw.to_numpy().astype(np.float64)
    except ValueError:
        pass
    bad = pd.to_numeric(raw, errors="coerce").isna().to_numpy()
    row = int(np.flatnonzero(bad)[0]) if bad.any() else 0
    raise ParseError(
        f"{path.name}: non-numeric value {raw.iloc[row]!r} at line {row + 2}, column {column!r}"
    )


def parse_dataset(path, schema: Schema | None = None, uid_offset: int = 0) -> list[Sample]:
    """Read one CSV file into Samples, preserving row order.

    Raises SchemaError for a missing column, ParseError for a bad cell (with
    line and column) and FormatError when a row's CIR block is short.
    """
    schema = schema or Schema()
    path = Path(path)
    with path.open(newline="") as fh:
        header = next(csv.reader(fh), None)
    if header is None:
        raise FormatError(f"{path.name}: missing header row")
    header = [h.strip() for h in header]
    cir_cols = _cir_columns(header, schema.cir_prefix)
    required = [schema.label, schema.fp_idx, *schema.rf_columns]
    for col in required:
        if col not in header:
            raise SchemaError(f"{path.name}: missing column {col!r}")

    frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    frame.columns = header
    if len(frame) == 0:
        return []

    cir_raw = frame[cir_cols]
    empty = (cir_raw == "").to_numpy()
    if empty.any():
        row = int(np.flatnonzero(empty.any(axis=1))[0])
        filled = int((~empty[row]).sum())
        raise FormatError(
            f"{path.name}: line {row + 2} has {filled} CIR values, header declares {len(cir_cols)}"
        )
    cir = np.empty((len(frame), len(cir_cols)), dtype=np.float64)
    for j, col in enumerate(cir_cols):
        cir[:, j] = _numeric(cir_raw, col, path)

    labels = _numeric(frame, schema.label, path)
    fp = _numeric(frame, schema.fp_idx, path)
    rf = {col: _numeric(frame, col, path) for col in dict.fromkeys(schema.rf_columns)}

    samples = []
    for i in range(len(frame)):
        line = i + 2
        if labels[i] not in (0.0, 1.0):
            raise ParseError(f"{path.name}: label {labels[i]!r} at line {line} is not 0/1")
        if fp[i] != int(fp[i]):
            raise ParseError(f"{path.name}: fp_idx {fp[i]!r} at line {line} is not an integer")
        if not np.all(np.isfinite(cir[i])):
            raise ParseError(f"{path.name}: non-finite CIR value at line {line}")
        try:
            samples.append(Sample(
                label=int(labels[i]),
                rf_raw={col: float(v[i]) for col, v in rf.items()},
                cir=cir[i],
                fp_idx=int(fp[i]),
                uid=uid_offset + i,
                source=path.name,
            ))
        except ParseError as exc:
            raise ParseError(f"{path.name}: line {line}: {exc}") from None
    return samples


def load_dataset(paths, schema: Schema | None = None) -> list[Sample]:
    """Parse several files in order; uids run on across files."""
    if isinstance(paths, (str, Path)):
        paths = [paths]
    samples: list[Sample] = []
    cir_len = None
    for p in paths:
        part = parse_dataset(p, schema, uid_offset=len(samples))
        if part:
            if cir_len is None:
                cir_len = len(part[0].cir)
            elif len(part[0].cir) != cir_len:
                raise FormatError(f"{Path(p).name}: CIR length {len(part[0].cir)} != {cir_len}")
        samples.extend(part)
    return samples


def write_dataset(samples: Sequence[Sample], path, schema: Schema | None = None) -> None:
    """Write Samples as CSV in the layout parse_dataset reads back."""
    schema = schema or Schema()
    if not samples:
        raise InsufficientDataError("nothing to write")
    n_cir = len(samples[0].cir)
    rf_cols = [c for c in dict.fromkeys(schema.rf_columns) if c != schema.fp_idx]
    header = [schema.label, schema.fp_idx, *rf_cols,
              *(f"{schema.cir_prefix}{k}" for k in range(n_cir))]
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for s in samples:
            writer.writerow([s.label, s.fp_idx, *(repr(s.rf_raw[c]) for c in rf_cols),
                             *map(repr, s.cir.tolist())])


def _n_test(n: int) -> int:
    return int(round(n * TEST_PARTS / (TRAIN_PARTS + TEST_PARTS)))


def split_dataset(samples: Sequence[Sample], seed: int = 0, stratified: bool = True) -> DatasetSplit:
    """Partition into train/test at 5:2, per class when ``stratified``.

    Each split keeps the input order of its members.
    """
    n = len(samples)
    if n < TRAIN_PARTS + TEST_PARTS:
        raise InsufficientDataError(f"need at least 7 samples to split 5:2, got {n}")
    rng = np.random.default_rng(seed)
    is_test = np.zeros(n, dtype=bool)
    if stratified:
        labels = np.array([s.label for s in samples])
        for c in (0, 1):
            members = np.flatnonzero(labels == c)
            picked = rng.permutation(members)[: _n_test(len(members))]
            is_test[picked] = True
    else:
        is_test[rng.permutation(n)[: _n_test(n)]] = True
    return DatasetSplit(
        train=[s for s, t in zip(samples, is_test) if not t],
        test=[s for s, t in zip(samples, is_test) if t],
    )
