"""Binary confusion-matrix metrics with NLOS (label 1) as the positive class."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InsufficientDataError, ShapeError

__all__ = ["Metrics", "compute_metrics", "mean_metrics"]


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int
    # names of metrics whose denominator was zero (reported as 0)
    undefined: tuple[str, ...] = field(default=())

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def to_dict(self) -> dict:
        d = asdict(self)
        d["undefined"] = list(self.undefined)
        return d


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def compute_metrics(predictions, truth) -> Metrics:
    pred = np.asarray(predictions).astype(np.int64).ravel()
    true = np.asarray(truth).astype(np.int64).ravel()
    if pred.shape != true.shape:
        raise ShapeError("predictions and truth differ in length")
    if pred.size == 0:
        raise InsufficientDataError("cannot score an empty prediction set")
    if not (np.isin(pred, (0, 1)).all() and np.isin(true, (0, 1)).all()):
        raise ValueError("predictions and truth must be binary")
    tp = int(np.sum((pred == 1) & (true == 1)))
    fp = int(np.sum((pred == 1) & (true == 0)))
    fn = int(np.sum((pred == 0) & (true == 1)))
    tn = int(np.sum((pred == 0) & (true == 0)))
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    f1 = _ratio(2 * precision * recall, precision + recall)
    undefined = tuple(
        name for name, den in (("precision", tp + fp), ("recall", tp + fn), ("f1", precision + recall))
        if not den
    )
    return Metrics(
        accuracy=(tp + tn) / pred.size,
        precision=precision,
        recall=recall,
        f1=f1,
        tp=tp, fp=fp, fn=fn, tn=tn,
        undefined=undefined,
    )


def mean_metrics(runs) -> dict:
    """Seed-average of accuracy/precision/recall/f1 (plus their std)."""
    runs = list(runs)
    out = {}
    for key in ("accuracy", "precision", "recall", "f1"):
        vals = np.array([getattr(m, key) for m in runs])
        out[key] = float(vals.mean())
        out[f"{key}_std"] = float(vals.std())
    return out
