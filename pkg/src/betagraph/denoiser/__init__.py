"""Graph-transformer predictor, its training loop and checkpoint format."""

from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .model import DenoiserConfig, DenoiserParameters, GraphTransformer, gradients, predict
from .training import TrainConfig, Trainer, TrainingLog, train

__all__ = [
    "Checkpoint",
    "DenoiserConfig",
    "DenoiserParameters",
    "GraphTransformer",
    "TrainConfig",
    "Trainer",
    "TrainingLog",
    "gradients",
    "load_checkpoint",
    "predict",
    "save_checkpoint",
    "train",
]
