import dataclasses
import json

import numpy as np
import pytest

import uwbsnn.pipeline as pipeline
from uwbsnn.config import config_from_dict
from uwbsnn.dataset import DatasetSplit, split_dataset
from uwbsnn.errors import ConfigError, InsufficientDataError
from uwbsnn.liquid import build_liquid, run_liquid_batch
from uwbsnn.encoding import encode_batch
from uwbsnn.pipeline import (
    STRATEGIES,
    evaluate_strategy,
    format_table,
    generate_synthetic,
    prepare,
    run_all,
    run_strategy,
    strategy_patterns,
)

TABLE = {
    1: ("RF+CIR50", True, True),
    2: ("RF+CIR120", True, True),
    3: ("RF", True, False),
    4: ("RF", False, False),
    5: ("CIR50", False, True),
    6: ("CIR50", False, False),
    7: ("CIR120", False, True),
    8: ("CIR120", False, False),
    9: ("RF+CIR50", False, False),
    10: ("RF+CIR120", False, False),
}

SMALL = {
    "encoder": {"steps": 60},
    "liquid": {"rf": {"n_neurons": 60}, "cir": {"n_neurons": 80}},
    "som": {"grid": [4, 4], "steps": 40, "epochs": 1},
    "run": {"seeds": [0, 1], "synthetic_samples": 84},
}


@pytest.fixture(scope="module")
def small_cfg():
    return config_from_dict(SMALL)


@pytest.fixture(scope="module")
def small_split():
    return split_dataset(generate_synthetic(84, seed=5), seed=0)


def test_strategy_matrix_matches_table():
    assert sorted(STRATEGIES) == list(range(1, 11))
    for sid, (features, rf, cir) in TABLE.items():
        s = STRATEGIES[sid]
        assert (s.features, s.rf_liquid, s.cir_liquid) == (features, rf, cir)


def test_branch_order_rf_first():
    assert STRATEGIES[2].branches == [("RF", True), ("CIR120", True)]
    assert STRATEGIES[7].branches == [("CIR120", True)]


def test_invalid_strategy_rejected():
    with pytest.raises(ConfigError):
        pipeline.StrategyConfig(11, "RF", False, True)


def test_synthetic_balance_and_determinism():
    a = generate_synthetic(14, seed=2)
    assert sum(s.label for s in a) == 7
    b = generate_synthetic(14, seed=2)
    assert all(x.same_fields(y) for x, y in zip(a, b))
    assert pipeline.dataset_digest(a) == pipeline.dataset_digest(b)
    assert pipeline.dataset_digest(a) != pipeline.dataset_digest(generate_synthetic(14, seed=3))
    with pytest.raises(InsufficientDataError):
        generate_synthetic(13)


def test_padded_branch_widths(small_split, small_cfg):
    prep = prepare(small_split, small_cfg)
    widths = {b: prep.inputs[b][0].shape[1] for b in prep.inputs}
    assert widths == {"RF": 10, "CIR50": 55, "CIR120": 132}
    for tr, te in prep.inputs.values():
        assert tr.min() >= 0 and tr.max() <= 1 and te.min() >= 0 and te.max() <= 1


def test_ablated_branch_is_raw_channel_counts(small_split, small_cfg):
    prep = prepare(small_split, small_cfg, ["RF"])
    train, _ = pipeline._branch_counts(prep, small_cfg, "RF", False, 3)
    rows = prep.inputs["RF"][0]
    enc = encode_batch(rows, 60, 0.5, [(3, 1, int(u)) for u in prep.train_uids])
    np.testing.assert_array_equal(train, enc.sum(axis=1))
    liq, _ = pipeline._branch_counts(prep, small_cfg, "RF", True, 3)
    assert liq.shape == (len(rows), 60)


def test_same_seed_same_metrics(small_split, small_cfg):
    a = run_strategy(3, small_split, small_cfg, seed=7)
    b = run_strategy(3, small_split, small_cfg, seed=7)
    assert a == b


def test_training_never_sees_test_split(small_split, small_cfg, monkeypatch):
    """Swapping the test records must leave training and labelling bit-identical."""
    other = generate_synthetic(84, seed=99)
    swapped = DatasetSplit(small_split.train, other[: len(small_split.test)])
    captured = []
    real_assign = pipeline.assign_labels

    def spy_assign(net, patterns, labels, **kw):
        real_assign(net, patterns, labels, **kw)
        captured.append((net.weight_hash(), net.labels.copy(), np.asarray(labels).copy()))
        return net

    monkeypatch.setattr(pipeline, "assign_labels", spy_assign)
    for split in (small_split, swapped):
        evaluate_strategy(prepare(split, small_cfg), small_cfg, STRATEGIES[1], seed=0)
    (h1, l1, y1), (h2, l2, y2) = captured
    assert h1 == h2
    np.testing.assert_array_equal(l1, l2)
    np.testing.assert_array_equal(y1, [s.label for s in small_split.train])


def test_normalizers_fitted_on_train_only(small_split, small_cfg, monkeypatch):
    n_train = len(small_split.train)
    sizes = []
    real = pipeline.fit_normalizer

    def spy(rows):
        sizes.append(len(rows))
        return real(rows)

    monkeypatch.setattr(pipeline, "fit_normalizer", spy)
    prep = prepare(small_split, small_cfg)
    strategy_patterns(prep, small_cfg, STRATEGIES[2], 0)
    assert sizes and set(sizes) == {n_train}


def test_liquid_states_separate_synthetic_classes():
    cfg = config_from_dict({})
    split = split_dataset(generate_synthetic(200, seed=1), seed=0)
    prep = prepare(split, cfg, ["RF"])
    counts, _ = pipeline._branch_counts(prep, cfg, "RF", True, 0)
    y = prep.train_labels
    x = counts.astype(float)
    d = np.linalg.norm(x[:, None] - x[None], axis=2)
    same = y[:, None] == y[None]
    off = ~np.eye(len(y), dtype=bool)
    assert d[~same].mean() > d[same & off].mean()


def test_som_winners_cluster_by_class():
    cfg = config_from_dict({})
    split = split_dataset(generate_synthetic(280, seed=2), seed=0)
    prep = prepare(split, cfg, ["RF", "CIR50"])
    train, _ = strategy_patterns(prep, cfg, STRATEGIES[1], 0)
    net = pipeline.init_som(dataclasses.replace(cfg.som, seed=0), train.shape[1])
    pipeline.train_som(net, train)
    from uwbsnn.som import respond
    winners = respond(net, train, [(0, 3, int(u)) for u in prep.train_uids]).argmax(axis=1)
    y = prep.train_labels
    agree = []
    for c in (0, 1):
        w = winners[y == c]
        agree.append(np.mean(w[:, None] == w[None]))
    assert np.mean(agree) > 5 / net.n_neurons


def test_run_all_artifacts(tmp_path, small_cfg):
    m = run_all(small_cfg, strategies=[1], seeds=[42], synthetic=True, out_dir=tmp_path,
                predictions=True, dump_liquid=True)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert list(manifest["results"]) == ["1"]
    assert list(manifest["results"]["1"]["per_seed"]) == ["42"]
    assert manifest["seeds"] == [42] and manifest["dataset"]["source"] == "synthetic"
    assert set(manifest["liquids"]) == {"RF/seed42", "CIR50/seed42"}
    assert "_timings" not in manifest and "total_s" in m["_timings"]
    table = (tmp_path / "metrics_table.txt").read_text(encoding="utf-8")
    assert table.splitlines()[1].startswith("Strategy1")
    preds = (tmp_path / "predictions.csv").read_text().splitlines()
    assert preds[0] == "strategy,seed,uid,label,predicted"
    assert len(preds) - 1 == manifest["dataset"]["n_test"]


def test_run_all_files_and_subsample(tmp_path, small_cfg):
    from uwbsnn.dataset import write_dataset
    write_dataset(generate_synthetic(100, seed=4), tmp_path / "d.csv")
    cfg = dataclasses.replace(small_cfg, dataset=dataclasses.replace(
        small_cfg.dataset, paths=(str(tmp_path / "d.csv"),), max_records=70))
    m = run_all(cfg, strategies=[4], seeds=[0])
    ds = m["dataset"]
    assert ds["files"][0]["rows"] == 100 and ds["subsampled_to"] == 70
    assert ds["n_train"] + ds["n_test"] == 70


def test_run_all_errors(small_cfg):
    with pytest.raises(ConfigError, match="strategy 12"):
        run_all(small_cfg, strategies=[12], synthetic=True)
    with pytest.raises(ConfigError, match="dataset.paths"):
        run_all(small_cfg, strategies=[1])


def test_table_without_results_lists_all():
    lines = format_table().splitlines()
    assert len(lines) == 11 and "Strategy10" in lines[-1]
