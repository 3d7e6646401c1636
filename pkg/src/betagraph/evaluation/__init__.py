"""Graph statistics, MMD and validity/uniqueness/novelty."""

from .mmd import mmd, wasserstein_1d
from .novelty import IsomorphismIndex, uniqueness_novelty, wl_hash
from .orbits import orbit_counts
from .report import EvalConfig, EvalReport, evaluate
from .stats import KINDS, GraphStatistic, graph_statistic
from .validity import SBM_FLAG, is_valid_planar, is_valid_sbm, validity

__all__ = [
    "EvalConfig",
    "EvalReport",
    "GraphStatistic",
    "IsomorphismIndex",
    "KINDS",
    "SBM_FLAG",
    "evaluate",
    "graph_statistic",
    "is_valid_planar",
    "is_valid_sbm",
    "mmd",
    "orbit_counts",
    "uniqueness_novelty",
    "validity",
    "wasserstein_1d",
    "wl_hash",
]
