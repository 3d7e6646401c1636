"""Train a small denoiser on community graphs and score the samples by MMD.

A few hundred steps is enough to see structure appear; the acceptance suite
uses 3000. Run: python demos/train_and_score.py [steps]
"""

import sys

import numpy as np

from betagraph.datasets import DatasetSpec, generate_dataset, split_dataset
from betagraph.denoiser import DenoiserConfig, TrainConfig, Trainer
from betagraph.denoiser.sampling import sample_graphs
from betagraph.diffusion import SamplerConfig
from betagraph.evaluation import EvalConfig, evaluate
from betagraph.features import attach_features, channel_types
from betagraph.graph import TransformParams
from betagraph.modulation import ModulationStrategy
from betagraph.numerics import NoiseSchedule, rng_stream

steps = int(sys.argv[1]) if len(sys.argv) > 1 else 300
seed = 11

graphs = attach_features(generate_dataset(DatasetSpec("community_small", seed=seed)), "degree_onehot")
train, test, _ = split_dataset(graphs, seed)
d = train[0].features.shape[1]

trainer = Trainer(
    train,
    denoiser_cfg=DenoiserConfig(layers=2, hidden=32, heads=4, n_features=d),
    train_cfg=TrainConfig(steps=steps, seed=seed),
    channel_kinds=channel_types("degree_onehot", d),
)
trainer.run(on_step=lambda tr: tr.step % 100 == 0 and print(f"step {tr.step}: loss {np.mean(tr.log.losses[-100:]):.4f}"))

config = SamplerConfig(prior_mean=trainer.prior_mean, domain="logit", stats=trainer.stats)
samples = sample_graphs(
    trainer.ema_model(), 10, trainer.graphs, ModulationStrategy(), NoiseSchedule(), TransformParams(), config,
    rng_stream(seed, 1),
)
print("mean edges: samples", np.mean([g.n_edges for g in samples]), "test", np.mean([g.n_edges for g in test]))
report = evaluate(samples, test, train, EvalConfig(statistics=("degree", "clustering")))
print(report.table())
