"""Command-line entry point: ``betagraph {generate,train,sample,evaluate,plot}``.

Exit codes: 0 success, 2 usage or input error, 3 runtime or numerical error.
Every output is a function of the config, the input files and the seed; no
timestamps are written anywhere.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ContractError, InputError, NumericalError, ParseError

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 2, 3
SAMPLE_STREAM = 7


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _load_config(args):
    from .config import RunConfig

    if args.config:
        cfg = RunConfig.load(args.config, args.seed)
    else:
        cfg = RunConfig.from_dict({}, args.seed)
    if getattr(args, "domain", None):
        import dataclasses

        cfg = dataclasses.replace(cfg, training=dataclasses.replace(cfg.training, domain=args.domain))
    return cfg


def _load_graph_file(path, what: str, allow_empty: bool = False):
    from .io import load_graphs

    path = Path(path)
    if not path.is_file():
        raise InputError(f"{what} file not found: {path}")
    graphs = load_graphs(path)
    if not graphs and not allow_empty:
        raise InputError(f"{what} file is empty: {path}")
    return graphs


def _echo_config(cfg, out: Path) -> None:
    _write_text(out / "config.json", cfg.to_json())


def _with_features(graphs, cfg, max_degree=None):
    from .features import attach_features

    if cfg.dataset.features == "none":
        return [g.with_features(None) for g in graphs]
    return attach_features(graphs, cfg.dataset.features, max_degree)


# -- commands -------------------------------------------------------------


def cmd_generate(cfg, out: Path) -> int:
    from .datasets import generate_dataset, split_dataset
    from .io import save_graphs

    spec = cfg.dataset.spec(cfg.seed)
    graphs = generate_dataset(spec)
    train, test, test_idx = split_dataset(graphs, cfg.seed, cfg.dataset.train_fraction)
    save_graphs(train, out / "train.jsonl")
    save_graphs(test, out / "test.jsonl")
    manifest = {
        "config_hash": cfg.hash(),
        "count": spec.count,
        "kind": spec.kind,
        "n_test": len(test),
        "n_train": len(train),
        "params": spec.params,
        "seed": cfg.seed,
        "split": "stratified-by-size",
        "test_indices": test_idx,
    }
    _write_text(out / "manifest.json", _dump(manifest))
    _echo_config(cfg, out)
    print(f"wrote {len(train)} train / {len(test)} test graphs to {out}")
    return EXIT_OK


def _make_trainer(cfg, train_graphs):
    import dataclasses

    from .denoiser import Trainer
    from .features import channel_types

    graphs = _with_features(train_graphs, cfg)
    d = graphs[0].features.shape[1]
    kinds = channel_types(cfg.dataset.features, d) if cfg.dataset.features != "none" else []
    dcfg = dataclasses.replace(cfg.denoiser, n_features=d)
    return Trainer(
        graphs,
        cfg.schedule,
        cfg.modulation,
        cfg.loss,
        dcfg,
        cfg.training.train_config(cfg.seed),
        cfg.transform,
        kinds,
    )


def cmd_train(cfg, out: Path, data: Path, resume: str | None) -> int:
    from .denoiser.checkpoint import load_checkpoint

    train_graphs = _load_graph_file(data / "train.jsonl", "training")
    trainer = _make_trainer(cfg, train_graphs)
    log_path = out / "loss.jsonl"
    kept: list[str] = []
    if resume:
        trainer.restore(load_checkpoint(resume, trainer.denoiser_cfg))
        if log_path.is_file():
            for line in log_path.read_text(encoding="utf-8").splitlines():
                if line.strip() and json.loads(line)["step"] <= trainer.step:
                    kept.append(line)
    _echo_config(cfg, out)
    every = cfg.training.checkpoint_every
    log_path.parent.mkdir(parents=True, exist_ok=True)
    with open(log_path, "w", encoding="utf-8", newline="\n") as fh:
        for line in kept:
            fh.write(line + "\n")

        def on_step(tr):
            fh.write(json.dumps({"loss": tr.log.losses[-1], "step": tr.step}, sort_keys=True) + "\n")
            if every and tr.step % every == 0:
                tr.save(out / "checkpoints" / f"step_{tr.step:07d}.ckpt")

        trainer.run(on_step=on_step)
    trainer.save(out / "checkpoint.ckpt")
    last = trainer.log.losses[-1] if trainer.log.losses else float("nan")
    print(f"trained to step {trainer.step}; last loss {last:.6f}; checkpoint {out / 'checkpoint.ckpt'}")
    return EXIT_OK


def cmd_sample(cfg, out: Path, data: Path, checkpoint: Path, trajectory: bool) -> int:
    from .denoiser.checkpoint import load_checkpoint
    from .denoiser.sampling import sample_graphs
    from .denoiser.training import stats_from_header
    from .diffusion import SamplerConfig
    from .io import dumps_graph, save_graphs
    from .numerics import NoiseSchedule, rng_stream

    if not Path(checkpoint).is_file():
        raise InputError(f"checkpoint not found: {checkpoint}")
    ckpt = load_checkpoint(checkpoint)
    h = ckpt.header
    domain = h["domain"]
    if cfg.training.domain != domain:
        raise ConfigurationError(f"checkpoint was trained in the {domain} domain, not {cfg.training.domain}")
    train_graphs = _with_features(_load_graph_file(data / "train.jsonl", "training"), cfg)
    schedule = NoiseSchedule(**h["schedule"])
    model = ckpt.model("ema" if cfg.sampling.use_ema else "raw")
    stats = stats_from_header(h["precondition"], schedule, domain)
    prior = (h["prior_mean"][0], np.asarray(h["prior_mean"][1]))
    sc = SamplerConfig(prior, domain, stats, cfg.sampling.threshold, cfg.sampling.trajectory_every if trajectory else 0)
    snaps: dict[int, list] = {}

    def on_snapshot(t, offset, mask, values, a_hat):
        rows = snaps.setdefault(t, [])
        for i in range(mask.shape[0]):
            k = int(mask[i].sum())
            rows.append({"adjacency": np.round(values[i, :k, :k], 12).tolist(), "index": offset + i, "n": k})

    graphs = sample_graphs(
        model, cfg.sampling.count, train_graphs, cfg.modulation, schedule, cfg.transform, sc,
        rng_stream(cfg.seed, SAMPLE_STREAM), cfg.sampling.batch_size, on_snapshot if trajectory else None,
    )
    save_graphs(graphs, out / "samples.jsonl")
    if trajectory:
        for t, rows in sorted(snaps.items()):
            _write_text(out / "trajectory" / f"t_{t:05d}.json", json.dumps({"graphs": rows, "t": t}, sort_keys=True) + "\n")
        _write_text(
            out / "trajectory" / "final.jsonl", "".join(dumps_graph(g) + "\n" for g in graphs)
        )
    _echo_config(cfg, out)
    print(f"wrote {len(graphs)} graphs to {out / 'samples.jsonl'}")
    return EXIT_OK


def cmd_evaluate(cfg, out: Path, generated: Path, reference: Path, training: Path | None) -> int:
    import dataclasses

    from .evaluation import evaluate

    gen = _load_graph_file(generated, "generated")
    ref = _load_graph_file(reference, "reference")
    train = _load_graph_file(training, "training") if training else []
    ecfg = dataclasses.replace(cfg.eval, dataset_kind=cfg.dataset.kind, seed=cfg.seed)
    report = evaluate(gen, ref, train, ecfg)
    body = report.to_dict()
    body["config_hash"] = cfg.hash()
    body["seed"] = cfg.seed
    _write_text(out / "eval_report.json", _dump(body))
    _write_text(out / "eval_report.txt", report.table())
    _echo_config(cfg, out)
    sys.stdout.write(report.table())
    return EXIT_OK


def cmd_plot(out: Path, trajectory_dir: Path, index: int) -> int:
    from .plotting import plot_trajectory

    files = plot_trajectory(trajectory_dir, out / "plots", index)
    print(f"wrote {len(files)} plots to {out / 'plots'}")
    return EXIT_OK


# -- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--seed", type=int, help="overrides the config seed")
    common.add_argument("--out", metavar="DIR", default="run", help="output directory (default: run)")
    common.add_argument("--threads", type=int, default=1, help="cap on worker threads (default: 1)")

    p = argparse.ArgumentParser(prog="betagraph", description="Beta diffusion for graphs.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("generate", parents=[common], help="generate a synthetic dataset and its split")

    t = sub.add_parser("train", parents=[common], help="train the denoiser")
    t.add_argument("--data", metavar="DIR", help="directory holding train.jsonl (default: --out)")
    t.add_argument("--domain", choices=("original", "logit"))
    t.add_argument("--resume", metavar="CKPT", help="continue from a checkpoint")

    s = sub.add_parser("sample", parents=[common], help="draw graphs from a checkpoint")
    s.add_argument("--data", metavar="DIR", help="directory holding train.jsonl (default: --out)")
    s.add_argument("--checkpoint", metavar="CKPT", help="default: OUT/checkpoint.ckpt")
    s.add_argument("--domain", choices=("original", "logit"))
    s.add_argument("--trajectory", action="store_true", help="also write reverse-chain snapshots")

    e = sub.add_parser("evaluate", parents=[common], help="compare generated graphs to a reference set")
    e.add_argument("--generated", metavar="JSONL", help="default: OUT/samples.jsonl")
    e.add_argument("--reference", metavar="JSONL", help="default: OUT/test.jsonl")
    e.add_argument("--training", metavar="JSONL", help="default: OUT/train.jsonl when present")

    pl = sub.add_parser("plot", parents=[common], help="render trajectory snapshots as SVG")
    pl.add_argument("--trajectory", metavar="DIR", help="default: OUT/trajectory")
    pl.add_argument("--index", type=int, default=0, help="which sampled graph to draw")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    import torch

    torch.set_num_threads(args.threads)
    out = Path(args.out)
    try:
        if args.command == "plot":
            traj = Path(args.trajectory) if args.trajectory else out / "trajectory"
            return cmd_plot(out, traj, args.index)
        cfg = _load_config(args)
        if args.command == "generate":
            return cmd_generate(cfg, out)
        data = Path(args.data) if getattr(args, "data", None) else out
        if args.command == "train":
            return cmd_train(cfg, out, data, args.resume)
        if args.command == "sample":
            ckpt = Path(args.checkpoint) if args.checkpoint else out / "checkpoint.ckpt"
            return cmd_sample(cfg, out, data, ckpt, args.trajectory)
        gen = Path(args.generated) if args.generated else out / "samples.jsonl"
        ref = Path(args.reference) if args.reference else out / "test.jsonl"
        if args.training:
            train = Path(args.training)
        else:
            train = out / "train.jsonl" if (out / "train.jsonl").is_file() else None
        return cmd_evaluate(cfg, out, gen, ref, train)
    except (ConfigurationError, ParseError, InputError) as exc:
        print(f"betagraph {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ContractError) as exc:
        print(f"betagraph {args.command}: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"betagraph {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
