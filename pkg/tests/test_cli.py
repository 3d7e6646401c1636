import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from betagraph.cli import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, run
from betagraph.io import load_graphs

SEED = 20261015

TINY = {
    "seed": SEED,
    "dataset": {"kind": "community_small", "count": 20},
    "schedule": {"T": 50},
    "denoiser": {"layers": 1, "hidden": 8, "heads": 2, "time_dim": 8},
    "training": {"steps": 30, "batch_size": 4, "checkpoint_every": 10},
    "sampling": {"count": 3, "trajectory_every": 10},
    "eval": {"statistics": ["degree", "clustering"]},
}


def write_config(path: Path, cfg: dict) -> Path:
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return path


def files(directory: Path) -> dict[str, bytes]:
    return {str(p.relative_to(directory)): p.read_bytes() for p in sorted(directory.rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """One full generate -> train -> sample -> evaluate run."""
    root = tmp_path_factory.mktemp("cli")
    cfg = write_config(root / "config.json", TINY)
    out = root / "run"
    args = ["--config", str(cfg), "--out", str(out)]
    codes = [
        run(["generate", *args]),
        run(["train", *args]),
        run(["sample", *args, "--trajectory"]),
        run(["evaluate", *args]),
        run(["plot", *args]),
    ]
    return root, cfg, out, codes


def test_pipeline_succeeds(pipeline):
    _, _, out, codes = pipeline
    assert codes == [EXIT_OK] * 5
    manifest = json.loads((out / "manifest.json").read_text())
    assert (manifest["n_train"], manifest["n_test"]) == (16, 4)
    samples = load_graphs(out / "samples.jsonl")
    assert len(samples) == 3
    log = [json.loads(line) for line in (out / "loss.jsonl").read_text().splitlines()]
    assert [r["step"] for r in log] == list(range(1, 31))
    assert sorted(p.name for p in (out / "checkpoints").iterdir()) == [
        "step_0000010.ckpt",
        "step_0000020.ckpt",
        "step_0000030.ckpt",
    ]
    report = json.loads((out / "eval_report.json").read_text())
    assert report["seed"] == SEED and len(report["config_hash"]) == 16
    assert set(report["mmd"]) == {"degree", "clustering"}
    echoed = json.loads((out / "config.json").read_text())
    assert echoed["training"]["lr"] == 0.002 and echoed["seed"] == SEED


def test_generate_default_split(tmp_path):
    assert run(["generate", "--seed", str(SEED), "--out", str(tmp_path)]) == EXIT_OK
    m = json.loads((tmp_path / "manifest.json").read_text())
    assert (m["n_train"], m["n_test"]) == (80, 20)


def test_rerun_is_byte_identical(pipeline, tmp_path):
    _, cfg, out, _ = pipeline
    again = tmp_path / "run"
    args = ["--config", str(cfg), "--out", str(again)]
    for cmd in (["generate"], ["train"], ["sample", "--trajectory"], ["evaluate"], ["plot"]):
        assert run([cmd[0], *args, *cmd[1:]]) == EXIT_OK
    assert files(again) == files(out)


def test_resume_matches_uninterrupted_run(pipeline, tmp_path):
    _, cfg, out, _ = pipeline
    copy = tmp_path / "run"
    shutil.copytree(out, copy)
    (copy / "checkpoint.ckpt").unlink()
    ckpt = copy / "checkpoints" / "step_0000020.ckpt"
    assert run(["train", "--config", str(cfg), "--out", str(copy), "--resume", str(ckpt)]) == EXIT_OK
    assert (copy / "loss.jsonl").read_bytes() == (out / "loss.jsonl").read_bytes()
    assert (copy / "checkpoint.ckpt").read_bytes() == (out / "checkpoint.ckpt").read_bytes()


def test_trajectory_spacing(pipeline):
    _, _, out, _ = pipeline
    names = sorted(p.name for p in (out / "trajectory").glob("t_*.json"))
    assert names == [f"t_{t:05d}.json" for t in (0, 10, 20, 30, 40)]
    snap = json.loads((out / "trajectory" / "t_00040.json").read_text())
    assert snap["t"] == 40 and len(snap["graphs"]) == 3


def test_trajectory_every_hundred_steps(tmp_path):
    cfg = dict(TINY, schedule={"T": 1000}, training={"steps": 2, "batch_size": 4}, sampling={"count": 1})
    path = write_config(tmp_path / "c.json", cfg)
    args = ["--config", str(path), "--out", str(tmp_path / "run")]
    for cmd in (["generate"], ["train"], ["sample", "--trajectory"]):
        assert run([cmd[0], *args, *cmd[1:]]) == EXIT_OK
    ts = sorted(int(p.stem[2:]) for p in (tmp_path / "run" / "trajectory").glob("t_*.json"))
    assert ts == list(range(0, 1000, 100))
    assert run(["plot", *args]) == EXIT_OK
    assert len(list((tmp_path / "run" / "plots").glob("*.svg"))) == 10


def test_plots_named_per_snapshot(pipeline):
    _, _, out, _ = pipeline
    names = sorted(p.name for p in (out / "plots").iterdir())
    assert names == [f"snapshot_t{t:05d}.svg" for t in (0, 10, 20, 30, 40)]


def test_evaluate_self_is_zero(pipeline, tmp_path):
    _, cfg, out, _ = pipeline
    ref = str(out / "test.jsonl")
    args = ["--config", str(cfg), "--out", str(tmp_path), "--generated", ref, "--reference", ref]
    assert run(["evaluate", *args]) == EXIT_OK
    report = json.loads((tmp_path / "eval_report.json").read_text())
    assert all(v <= 1e-12 for v in report["mmd"].values())


def test_sbm_report_is_flagged(tmp_path):
    cfg = {"seed": SEED, "dataset": {"kind": "sbm", "count": 5}, "eval": {"statistics": ["degree"]}}
    args = ["--config", str(write_config(tmp_path / "c.json", cfg)), "--out", str(tmp_path)]
    assert run(["generate", *args]) == EXIT_OK
    ref = str(tmp_path / "train.jsonl")
    assert run(["evaluate", *args, "--generated", ref, "--reference", ref]) == EXIT_OK
    report = json.loads((tmp_path / "eval_report.json").read_text())
    assert any("modularity" in f for f in report["flags"])


def test_usage_errors(tmp_path, capsys):
    bad = write_config(tmp_path / "bad.json", {"seed": 1, "dataset": {"kind": "torus"}})
    assert run(["generate", "--config", str(bad), "--out", str(tmp_path)]) == EXIT_USAGE
    assert "torus" in capsys.readouterr().err
    assert run(["generate", "--out", str(tmp_path)]) == EXIT_USAGE  # no seed anywhere
    assert run(["train", "--seed", "1", "--out", str(tmp_path / "nothing")]) == EXIT_USAGE
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    args = ["evaluate", "--seed", "1", "--out", str(tmp_path), "--generated", str(empty), "--reference", str(empty)]
    assert run(args) == EXIT_USAGE
    (tmp_path / "traj").mkdir()
    assert run(["plot", "--out", str(tmp_path), "--trajectory", str(tmp_path / "traj")]) == EXIT_USAGE


def test_runtime_error_exit_code(pipeline, tmp_path):
    _, cfg, out, _ = pipeline
    broken = tmp_path / "broken.ckpt"
    broken.write_bytes((out / "checkpoint.ckpt").read_bytes()[:-8])
    args = ["sample", "--config", str(cfg), "--out", str(tmp_path), "--data", str(out), "--checkpoint", str(broken)]
    assert run(args) == EXIT_RUNTIME


def test_domain_mismatch_is_usage_error(pipeline, tmp_path):
    _, cfg, out, _ = pipeline
    args = ["sample", "--config", str(cfg), "--out", str(tmp_path), "--data", str(out)]
    assert run([*args, "--checkpoint", str(out / "checkpoint.ckpt"), "--domain", "original"]) == EXIT_USAGE


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "betagraph", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "generate" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "betagraph", "frobnicate"], capture_output=True, text=True)
    assert proc.returncode == 2
