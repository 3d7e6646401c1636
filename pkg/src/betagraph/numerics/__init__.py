"""Schedule, special functions, samplers and the beta KL divergence."""

from .kl import kl_beta
from .sampling import (
    RngStream,
    logit,
    rng_stream,
    sample_beta,
    sample_gamma,
    sample_log_gamma,
    sample_logit_beta,
    sigmoid,
)
from .schedule import NoiseSchedule, alpha
from .special import digamma, log_beta, log_gamma, trigamma

__all__ = [
    "NoiseSchedule",
    "RngStream",
    "alpha",
    "digamma",
    "kl_beta",
    "log_beta",
    "log_gamma",
    "logit",
    "rng_stream",
    "sample_beta",
    "sample_gamma",
    "sample_log_gamma",
    "sample_logit_beta",
    "sigmoid",
    "trigamma",
]
