"""The ten ablation strategies, the synthetic data generator and full runs.

A strategy selects which feature branches (RF, CIR50, CIR120) are used and
whether each branch passes through its liquid. A branch without a liquid
hands the SOM the per-channel counts of its encoded spike train instead of
the liquid's per-neuron counts. Branch count vectors are concatenated,
min-max scaled on the training split and fed to the spiking SOM.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .config import Config
from .dataset import DatasetSplit, Sample, load_dataset, split_dataset
from .encoding import encode_batch
from .errors import ConfigError, InsufficientDataError
from .features import (
    apply_normalizer,
    extract_cir_segment,
    extract_rf,
    fit_normalizer,
    pad_uniform,
)
from .liquid import LiquidConfig, build_liquid, liquid_summary, run_liquid_batch
from .metrics import Metrics, compute_metrics, mean_metrics
from .som import assign_labels, classify_batch, init_som, train_som

__all__ = [
    "STRATEGIES",
    "StrategyConfig",
    "dataset_digest",
    "format_table",
    "generate_synthetic",
    "prepare",
    "run_all",
    "run_strategy",
]

FEATURE_SETS = ("RF+CIR50", "RF+CIR120", "RF", "CIR50", "CIR120")
BRANCH_CODES = {"RF": 1, "CIR50": 2, "CIR120": 3}
MANIFEST_FORMAT = "uwbsnn-manifest/1"


@dataclass(frozen=True)
class StrategyConfig:
    id: int
    features: str
    rf_liquid: bool
    cir_liquid: bool

    def __post_init__(self):
        if self.features not in FEATURE_SETS:
            raise ConfigError(f"unknown feature set {self.features!r}")
        if self.rf_liquid and "RF" not in self.features:
            raise ConfigError("RF liquid enabled without RF features")
        if self.cir_liquid and "CIR" not in self.features:
            raise ConfigError("CIR liquid enabled without CIR features")

    @property
    def branches(self) -> list[tuple[str, bool]]:
        """``(branch, through_liquid)`` pairs in concatenation order (RF first)."""
        out = []
        for part in self.features.split("+"):
            out.append((part, self.rf_liquid if part == "RF" else self.cir_liquid))
        return out


STRATEGIES = {
    s.id: s
    for s in (
        StrategyConfig(1, "RF+CIR50", True, True),
        StrategyConfig(2, "RF+CIR120", True, True),
        StrategyConfig(3, "RF", True, False),
        StrategyConfig(4, "RF", False, False),
        StrategyConfig(5, "CIR50", False, True),
        StrategyConfig(6, "CIR50", False, False),
        StrategyConfig(7, "CIR120", False, True),
        StrategyConfig(8, "CIR120", False, False),
        StrategyConfig(9, "RF+CIR50", False, False),
        StrategyConfig(10, "RF+CIR120", False, False),
    )
}


# ---------------------------------------------------------------- synthetic

CIR_LENGTH = 1016


def generate_synthetic(n: int, seed: int = 0) -> list[Sample]:
    """Balanced two-class set of eWINE-shaped records (see docs/synthetic.md).

    LOS records carry a strong, fast-decaying first path over a quiet noise
    floor; NLOS records carry an attenuated first path, a delayed and spread
    dominant cluster, and louder noise.
    """
    if n < 14:
        raise InsufficientDataError(f"synthetic set needs n >= 14, got {n}")
    rng = np.random.default_rng([seed, 7])
    labels = np.array([0] * (n - n // 2) + [1] * (n // 2))
    samples = []
    k = np.arange(CIR_LENGTH, dtype=np.float64)
    for uid, label in enumerate(labels):
        fp = int(rng.integers(735, 755))
        rxpacc = float(rng.integers(900, 1101))
        dist = rng.uniform(1.0, 15.0)
        lag = k - fp
        after = lag >= 0
        if label == 0:
            sigma = rng.uniform(40.0, 70.0)
            amp = rng.uniform(8000.0, 14000.0)
            decay = rng.uniform(3.0, 6.0)
            shape = np.where(after, amp * np.exp(-np.maximum(lag, 0) / decay), 0.0)
            measured = dist + rng.normal(0.0, 0.05)
        else:
            sigma = rng.uniform(70.0, 120.0)
            amp = rng.uniform(1500.0, 4000.0)
            delay = rng.uniform(8.0, 25.0)
            peak = rng.uniform(4000.0, 9000.0)
            spread = rng.uniform(12.0, 25.0)
            late = lag - delay
            cluster = peak * np.exp(-np.maximum(late, 0) / spread) * np.clip(1 + late / 4.0, 0, 1)
            shape = np.where(after, amp * np.exp(-np.maximum(lag, 0) / 4.0) + cluster, 0.0)
            measured = dist + rng.uniform(0.3, 1.5) + rng.normal(0.0, 0.1)
        # rising edge just before the first path
        shape[fp - 1] += 0.3 * amp
        shape[fp - 2] += 0.1 * amp
        cir = np.abs(shape * (1 + 0.05 * rng.normal(size=CIR_LENGTH)) + rng.normal(0.0, sigma, CIR_LENGTH))
        noise = cir[: fp - 5]
        rf = {
            "RANGE": float(measured),
            "FP_IDX": float(fp),
            "FP_AMP1": float(cir[fp]),
            "FP_AMP2": float(cir[fp + 1]),
            "FP_AMP3": float(cir[fp + 2]),
            "STDEV_NOISE": float(noise.std()),
            "CIR_PWR": float(np.round(np.sum(cir[fp : fp + 100] ** 2) / rxpacc / 1e3)),
            "MAX_NOISE": float(noise.max()),
            "RXPACC": rxpacc,
        }
        samples.append(Sample(label=int(label), rf_raw=rf, cir=cir, fp_idx=fp, uid=uid, source="synthetic"))
    return samples


def dataset_digest(samples: Sequence[Sample]) -> str:
    h = hashlib.sha256()
    for s in samples:
        h.update(np.array([s.uid, s.label, s.fp_idx], dtype=np.int64).tobytes())
        h.update(json.dumps(dict(s.rf_raw), sort_keys=True).encode())
        h.update(s.cir.tobytes())
    return h.hexdigest()


def stratified_subsample(samples: Sequence[Sample], limit: int, seed: int) -> list[Sample]:
    """Keep ``limit`` records with class proportions preserved, in input order."""
    if limit >= len(samples):
        return list(samples)
    rng = np.random.default_rng([seed, 11])
    labels = np.array([s.label for s in samples])
    keep = np.zeros(len(samples), dtype=bool)
    for c in (0, 1):
        members = np.flatnonzero(labels == c)
        take = int(round(limit * len(members) / len(samples)))
        keep[rng.permutation(members)[:take]] = True
    return [s for s, k in zip(samples, keep) if k]


# ---------------------------------------------------------------- features


@dataclass
class Prepared:
    """Normalized branch inputs for both splits; seed independent."""

    split: DatasetSplit
    inputs: dict  # branch -> (train matrix, test matrix)
    train_uids: np.ndarray
    test_uids: np.ndarray
    train_labels: np.ndarray
    test_labels: np.ndarray

    def __post_init__(self):
        self._cache = {}


def _branch_matrix(samples: Sequence[Sample], branch: str, cfg: Config) -> np.ndarray:
    if branch == "RF":
        return np.array([extract_rf(s, cfg.features.rf_features).values for s in samples])
    seg_len = int(branch[3:])
    spacing = cfg.features.padding_spacing
    return np.array([pad_uniform(extract_cir_segment(s, seg_len), spacing).values for s in samples])


def prepare(split: DatasetSplit, cfg: Config, branches: Iterable[str] = BRANCH_CODES) -> Prepared:
    """Extract, pad and scale every branch; scaling is fitted on train only."""
    inputs = {}
    for branch in branches:
        train = _branch_matrix(split.train, branch, cfg)
        test = _branch_matrix(split.test, branch, cfg)
        stats = fit_normalizer(train)
        inputs[branch] = (apply_normalizer(stats, train), apply_normalizer(stats, test))
    return Prepared(
        split=split,
        inputs=inputs,
        train_uids=np.array([s.uid for s in split.train]),
        test_uids=np.array([s.uid for s in split.test]),
        train_labels=np.array([s.label for s in split.train]),
        test_labels=np.array([s.label for s in split.test]),
    )


def _liquid_config(cfg: Config, branch: str, seed: int) -> LiquidConfig:
    base = cfg.liquid_rf if branch == "RF" else cfg.liquid_cir
    return dataclasses.replace(base, seed=[base.seed, seed, BRANCH_CODES[branch]])


def _branch_counts(prep: Prepared, cfg: Config, branch: str, liquid: bool, seed: int):
    """(train, test) count matrices for one branch, memoized per seed."""
    key = (branch, liquid, seed)
    if key in prep._cache:
        return prep._cache[key]
    code = BRANCH_CODES[branch]
    trains = []
    for rows, uids in zip(prep.inputs[branch], (prep.train_uids, prep.test_uids)):
        trains.append(encode_batch(rows, cfg.encoder.steps, cfg.encoder.max_rate,
                                   [(seed, code, int(u)) for u in uids]))
    if liquid:
        net = build_liquid(_liquid_config(cfg, branch, seed), trains[0].shape[2])
        out = tuple(run_liquid_batch(net, x) for x in trains)
    else:
        out = tuple(x.sum(axis=1) for x in trains)
    prep._cache[key] = out
    return out


def strategy_patterns(prep: Prepared, cfg: Config, strategy: StrategyConfig, seed: int):
    """Concatenated branch counts scaled to [0, 1] with train-fitted bounds.

    Liquid readouts are heavy-tailed (the classes can differ in total
    activity by an order of magnitude), so with ``count_transform="log1p"``
    they are log-compressed first. Raw channel counts of an ablated branch
    are already a linear rate code and pass through unchanged.
    """
    trains, tests = [], []
    for branch, liquid in strategy.branches:
        train, test = (c.astype(np.float64) for c in _branch_counts(prep, cfg, branch, liquid, seed))
        if liquid and cfg.features.count_transform == "log1p":
            train, test = np.log1p(train), np.log1p(test)
        trains.append(train)
        tests.append(test)
    train, test = np.concatenate(trains, axis=1), np.concatenate(tests, axis=1)
    stats = fit_normalizer(train)
    return apply_normalizer(stats, train), apply_normalizer(stats, test)


def evaluate_strategy(prep: Prepared, cfg: Config, strategy: StrategyConfig, seed: int):
    """Train on the train split, score on test. Returns ``(Metrics, predictions)``."""
    train, test = strategy_patterns(prep, cfg, strategy, seed)
    som_cfg = dataclasses.replace(cfg.som, seed=seed)
    net = init_som(som_cfg, train.shape[1])
    train_som(net, train)
    assign_labels(net, train, prep.train_labels,
                  seeds=[(seed, 3, int(u)) for u in prep.train_uids])
    pred = classify_batch(net, test, seeds=[(seed, 4, int(u)) for u in prep.test_uids])
    return compute_metrics(pred, prep.test_labels), pred


def run_strategy(strategy: StrategyConfig | int, data: DatasetSplit | Prepared, cfg: Config, seed: int) -> Metrics:
    if isinstance(strategy, int):
        strategy = STRATEGIES[strategy]
    prep = data if isinstance(data, Prepared) else prepare(
        data, cfg, {b for b, _ in strategy.branches})
    return evaluate_strategy(prep, cfg, strategy, seed)[0]


# ---------------------------------------------------------------- reporting

TABLE_HEAD = ("", "Feature Engineering", "RF Liquid Encoder", "CIR Liquid Encoder",
              "Spiking SOM Classifier", "Accuracy", "Precision", "Recall", "F1 Score")


def _feature_label(features: str) -> str:
    return features.replace("CIR50", "CIR(50)").replace("CIR120", "CIR(120)")


def format_table(results: dict | None = None, strategies: Iterable[int] = STRATEGIES) -> str:
    """Aligned text table in the column order of the paper-style matrix."""
    rows = [TABLE_HEAD]
    for sid in strategies:
        s = STRATEGIES[sid]
        row = [f"Strategy{sid}", _feature_label(s.features),
               "√" if s.rf_liquid else "×", "√" if s.cir_liquid else "×", "√"]
        if results is not None:
            m = results[str(sid)]["mean"]
            row += [f"{100 * m[k]:.1f}%" for k in ("accuracy", "precision", "recall", "f1")]
        rows.append(tuple(row))
    width = len(rows[1]) if len(rows) > 1 else len(TABLE_HEAD)
    rows[0] = rows[0][:width]
    widths = [max(len(r[i]) for r in rows) for i in range(width)]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows) + "\n"


def _file_entry(path: str) -> dict:
    p = Path(path)
    data = p.read_bytes()
    return {
        "name": p.name,
        "sha256": hashlib.sha256(data).hexdigest(),
        "rows": max(sum(1 for ln in data.splitlines() if ln.strip()) - 1, 0),
    }


def load_split(cfg: Config, synthetic: bool = False):
    """Load (or generate) records, optionally subsample, split. Returns (split, info)."""
    if synthetic:
        samples = generate_synthetic(cfg.run.synthetic_samples, cfg.run.synthetic_seed)
        info = {"source": "synthetic", "n_samples": cfg.run.synthetic_samples,
                "generator_seed": cfg.run.synthetic_seed, "files": []}
    else:
        if not cfg.dataset.paths:
            raise ConfigError("config lists no dataset.paths (use --synthetic to run without data)")
        samples = load_dataset(cfg.dataset.paths, cfg.dataset.schema)
        info = {"source": "files", "files": [_file_entry(p) for p in cfg.dataset.paths]}
    info["n_records"] = len(samples)
    if cfg.dataset.max_records is not None and cfg.dataset.max_records < len(samples):
        samples = stratified_subsample(samples, cfg.dataset.max_records, cfg.dataset.split_seed)
        info["subsampled_to"] = len(samples)
    info["data_sha256"] = dataset_digest(samples)
    split = split_dataset(samples, cfg.dataset.split_seed, cfg.dataset.stratified)
    info.update(n_train=len(split.train), n_test=len(split.test),
                stratified=cfg.dataset.stratified, split_seed=cfg.dataset.split_seed)
    return split, info


def run_all(cfg: Config, strategies: Sequence[int] | None = None, seeds: Sequence[int] | None = None,
            synthetic: bool = False, out_dir=None, predictions: bool = False,
            dump_liquid: bool = False, log=None) -> dict:
    """Run strategies x seeds; write artifacts to ``out_dir`` when given.

    The manifest holds no timings, so equal inputs give byte-equal files;
    durations go to ``timings.json``.
    """
    strategies = list(strategies or cfg.run.strategies)
    seeds = list(seeds if seeds else cfg.run.seeds)
    for sid in strategies:
        if sid not in STRATEGIES:
            raise ConfigError(f"unknown strategy {sid}; valid ids are 1-10")
    log = log or (lambda msg: None)
    t_start = time.perf_counter()
    split, info = load_split(cfg, synthetic)
    needed = {b for sid in strategies for b, _ in STRATEGIES[sid].branches}
    prep = prepare(split, cfg, [b for b in BRANCH_CODES if b in needed])
    timings = {"prepare_s": time.perf_counter() - t_start, "strategies": {}}

    results, pred_rows, liquids = {}, [], {}
    for sid in strategies:
        strategy = STRATEGIES[sid]
        per_seed, t0 = {}, time.perf_counter()
        for seed in seeds:
            metrics, pred = evaluate_strategy(prep, cfg, strategy, seed)
            per_seed[str(seed)] = metrics
            log(f"strategy {sid} seed {seed}: accuracy {metrics.accuracy:.3f}")
            if predictions:
                pred_rows += [(sid, seed, int(u), int(y), int(p))
                              for u, y, p in zip(prep.test_uids, prep.test_labels, pred)]
            if dump_liquid:
                for branch, through in strategy.branches:
                    if through and (branch, seed) not in liquids:
                        net = build_liquid(_liquid_config(cfg, branch, seed),
                                           prep.inputs[branch][0].shape[1])
                        liquids[(branch, seed)] = liquid_summary(net)
        results[str(sid)] = {
            "structure": dataclasses.asdict(strategy),
            "per_seed": {k: m.to_dict() for k, m in per_seed.items()},
            "mean": mean_metrics(per_seed.values()),
        }
        timings["strategies"][str(sid)] = time.perf_counter() - t0
    timings["total_s"] = time.perf_counter() - t_start

    manifest = {
        "format": MANIFEST_FORMAT,
        "package_version": __version__,
        "config": cfg.to_dict(),
        "config_sha256": cfg.digest(),
        "seeds": seeds,
        "strategies": strategies,
        "dataset": info,
        "results": results,
    }
    if dump_liquid:
        manifest["liquids"] = {f"{b}/seed{s}": v for (b, s), v in sorted(liquids.items())}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        (out / "metrics_table.txt").write_text(format_table(results, strategies), encoding="utf-8")
        (out / "timings.json").write_text(json.dumps(timings, indent=2, sort_keys=True) + "\n")
        if predictions:
            with (out / "predictions.csv").open("w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["strategy", "seed", "uid", "label", "predicted"])
                writer.writerows(pred_rows)
    manifest["_timings"] = timings
    return manifest
