import json
import subprocess
import sys

import pytest

from uwbsnn.cli import main
from uwbsnn.dataset import write_dataset
from uwbsnn.pipeline import generate_synthetic

SMALL = {
    "encoder": {"steps": 40},
    "liquid": {"rf": {"n_neurons": 40}, "cir": {"n_neurons": 40}},
    "som": {"grid": [3, 3], "steps": 30, "epochs": 1},
    "run": {"synthetic_samples": 70},
}


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(SMALL))
    return path


def test_list_strategies(capsys):
    assert main(["list-strategies"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 11 and out[1].startswith("Strategy1")
    assert main(["--list-strategies"]) == 0


def test_run_subset(tmp_path, small_config, capsys):
    out = tmp_path / "out"
    rc = main(["run", "--config", str(small_config), "--strategy", "1", "--seed", "42",
               "--synthetic", "--out", str(out)])
    assert rc == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert list(manifest["results"]) == ["1"] and manifest["seeds"] == [42]
    assert (out / "metrics_table.txt").exists() and not (out / "predictions.csv").exists()
    assert "Strategy1" in capsys.readouterr().out


def test_validate_dataset(tmp_path, capsys):
    path = tmp_path / "d.csv"
    write_dataset(generate_synthetic(20, 0), path)
    assert main(["validate-dataset", str(path)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["records"] == 20 and report["los"] == report["nlos"] == 10


@pytest.mark.parametrize("argv", [
    ["validate-dataset", "/no/such/file.csv"],
    ["run", "--config", "/no/such/config.json", "--synthetic"],
    ["run", "--strategy", "11", "--synthetic"],
    ["run"],  # no dataset paths and no --synthetic
])
def test_failures_exit_nonzero(argv, tmp_path, capsys):
    assert main(argv + ["--out", str(tmp_path)] if argv[0] == "run" else argv) != 0
    assert "error:" in capsys.readouterr().err


def test_bad_config_key_message(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"som": {"gird": [2, 2]}}))
    assert main(["run", "--config", str(path), "--synthetic", "--out", str(tmp_path)]) == 1
    assert "gird" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "uwbsnn", "list-strategies"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "Strategy10" in res.stdout
    res = subprocess.run([sys.executable, "-m", "uwbsnn"], capture_output=True, text=True)
    assert res.returncode == 2
