"""Beta diffusion for graphs.

Graphs are mapped into (0, 1) with an affine transform, thinned towards zero
by multiplicative beta noise, and regenerated by a learned reverse chain that
adds beta-distributed fractions of the remaining headroom.
"""

from .diffusion import (
    SamplerConfig,
    ancestral_sample,
    forward_marginal_sample,
    forward_step,
    reverse_step,
    reverse_step_logit,
)
from .errors import (
    ConfigurationError,
    ContractError,
    DomainError,
    InputError,
    NumericalError,
    ParseError,
)
from .graph import Graph, TransformParams, inverse_transform_quantize, transform
from .losses import LossConfig, correction_loss, sampling_loss, total_loss
from .modulation import ModulationStrategy, assign_eta
from .numerics import NoiseSchedule, kl_beta
from .preconditioning import PrecondStats, standardize
from .state import ConcentrationField, DiffusionState

__version__ = "0.1.0"

__all__ = [
    "ConcentrationField",
    "ConfigurationError",
    "ContractError",
    "DiffusionState",
    "DomainError",
    "Graph",
    "InputError",
    "LossConfig",
    "ModulationStrategy",
    "NoiseSchedule",
    "NumericalError",
    "ParseError",
    "PrecondStats",
    "SamplerConfig",
    "TransformParams",
    "ancestral_sample",
    "assign_eta",
    "correction_loss",
    "forward_marginal_sample",
    "forward_step",
    "inverse_transform_quantize",
    "kl_beta",
    "reverse_step",
    "reverse_step_logit",
    "sampling_loss",
    "standardize",
    "total_loss",
    "transform",
]
