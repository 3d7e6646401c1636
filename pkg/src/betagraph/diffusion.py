"""Forward thinning and reverse thickening kernels, plus ancestral sampling.

Forward:  ``g_t = g_{t-1} * Q``,  ``Q ~ Beta(eta a_t g0, eta (a_{t-1} - a_t) g0)``
Marginal: ``g_t | g0 ~ Beta(eta a_t g0, eta (1 - a_t g0))``
Reverse:  ``g_{t-1} = g_t + P (1 - g_t)``,  ``P ~ Beta(eta (a_{t-1} - a_t) g0, eta (1 - a_{t-1} g0))``

Adjacency-shaped draws are taken for every entry and then the strict upper
triangle is mirrored, so adjacency values stay exactly symmetric. Diagonal
entries are carried along but never read downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ContractError, DomainError
from .graph import Graph, TransformParams, inverse_transform_quantize
from .numerics import NoiseSchedule, sample_beta, sample_logit_beta, sigmoid
from .state import ConcentrationField, DiffusionState, symmetrize_upper

Predictor = Callable[[np.ndarray, np.ndarray, int, np.ndarray], tuple[np.ndarray, np.ndarray]]


def _check_t(t: int, schedule: NoiseSchedule) -> None:
    if not 1 <= t <= schedule.T:
        raise IndexError(f"timestep {t} outside [1, {schedule.T}]")


def _check_open_unit(*arrays, name="values") -> None:
    for a in arrays:
        if a.size and not np.all((a > 0) & (a < 1)):
            raise DomainError(f"{name} must lie strictly inside (0, 1)")


def _eta_arrays(eta: ConcentrationField):
    return eta.eta_edges, eta.for_features()


def forward_marginal_sample(
    g0: DiffusionState,
    t: int,
    schedule: NoiseSchedule,
    eta: ConcentrationField,
    rng: np.random.Generator,
    domain: str = "original",
) -> DiffusionState:
    """Draw ``G_t ~ q(G_t | G_0)``; ``domain="logit"`` returns log-odds directly."""
    _check_t(t, schedule)
    if g0.domain != "original":
        raise DomainError("g0 must be in the original domain")
    _check_open_unit(g0.adjacency, g0.features, name="g0")
    a_t = schedule.alpha(t)
    eta_a, eta_x = _eta_arrays(eta)
    out = []
    for g, e in ((g0.adjacency, eta_a), (g0.features, eta_x)):
        a, b = e * a_t * g, e * (1.0 - a_t * g)
        if domain == "logit":
            out.append(sample_logit_beta(a, b, rng))
        else:
            out.append(sample_beta(a, b, rng))
    return g0.with_values(symmetrize_upper(out[0]), out[1], t=t, domain=domain)


def forward_step(
    g_prev: DiffusionState,
    g0: DiffusionState,
    t: int,
    schedule: NoiseSchedule,
    eta: ConcentrationField,
    rng: np.random.Generator,
) -> DiffusionState:
    """One thinning step ``g_{t-1} -> g_t``."""
    _check_t(t, schedule)
    a_prev, a_t = schedule.alpha(t - 1), schedule.alpha(t)
    if not a_prev > a_t:
        raise DomainError("degenerate schedule step: alpha_{t-1} == alpha_t")
    eta_a, eta_x = _eta_arrays(eta)
    q_a = symmetrize_upper(
        sample_beta(eta_a * a_t * g0.adjacency, eta_a * (a_prev - a_t) * g0.adjacency, rng)
    )
    q_x = sample_beta(eta_x * a_t * g0.features, eta_x * (a_prev - a_t) * g0.features, rng)
    return g_prev.with_values(g_prev.adjacency * q_a, g_prev.features * q_x, t=t)


def thicken(g_t: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Original-domain reverse update ``g + p (1 - g)``."""
    return g_t + p * (1.0 - g_t)


def thicken_logit(logit_g: np.ndarray, logit_p: np.ndarray) -> np.ndarray:
    """Logit-domain reverse update ``ln(e^x + e^y + e^(x+y))``, overflow-free."""
    return np.logaddexp(np.logaddexp(logit_g, logit_p), logit_g + logit_p)


def _reverse_shapes(g0_hat: np.ndarray, eta: np.ndarray, a_prev: float, a_t: float):
    return eta * (a_prev - a_t) * g0_hat, eta * (1.0 - a_prev * g0_hat)


def _reverse_multipliers(g0_hat_a, g0_hat_x, t, schedule, eta, rng, logit: bool):
    _check_t(t, schedule)
    _check_open_unit(g0_hat_a, g0_hat_x, name="g0_hat")
    a_prev, a_t = schedule.alpha(t - 1), schedule.alpha(t)
    eta_a, eta_x = _eta_arrays(eta)
    draw = sample_logit_beta if logit else sample_beta
    p_a = draw(*_reverse_shapes(g0_hat_a, eta_a, a_prev, a_t), rng)
    p_x = draw(*_reverse_shapes(g0_hat_x, eta_x, a_prev, a_t), rng)
    return symmetrize_upper(p_a), p_x


def reverse_step(
    g_t: DiffusionState,
    g0_hat: tuple[np.ndarray, np.ndarray],
    t: int,
    schedule: NoiseSchedule,
    eta: ConcentrationField,
    rng: np.random.Generator,
) -> DiffusionState:
    """One thickening step ``g_t -> g_{t-1}`` in the original domain."""
    if g_t.domain != "original":
        raise DomainError("reverse_step expects an original-domain state")
    p_a, p_x = _reverse_multipliers(*g0_hat, t, schedule, eta, rng, logit=False)
    return g_t.with_values(thicken(g_t.adjacency, p_a), thicken(g_t.features, p_x), t=t - 1)


def reverse_step_logit(
    g_t: DiffusionState,
    g0_hat: tuple[np.ndarray, np.ndarray],
    t: int,
    schedule: NoiseSchedule,
    eta: ConcentrationField,
    rng: np.random.Generator,
) -> DiffusionState:
    """One thickening step carried out on log-odds."""
    if g_t.domain != "logit":
        raise DomainError("reverse_step_logit expects a logit-domain state")
    p_a, p_x = _reverse_multipliers(*g0_hat, t, schedule, eta, rng, logit=True)
    return g_t.with_values(
        thicken_logit(g_t.adjacency, p_a), thicken_logit(g_t.features, p_x), t=t - 1
    )


@dataclass
class SamplerConfig:
    """Options for :func:`ancestral_sample`.

    ``prior_mean`` holds the dataset-level mean of transformed adjacency
    values and of each transformed feature column; ``stats`` is a
    :class:`~betagraph.preconditioning.PrecondStats` or ``None`` to feed raw
    values to the predictor.
    """

    prior_mean: tuple[float, np.ndarray]
    domain: str = "logit"
    stats: object | None = None
    threshold: float = 0.5
    trajectory_every: int = 0


def _pad_batch(fields: Sequence[ConcentrationField], d: int):
    b = len(fields)
    n_max = max(f.eta_nodes.shape[0] for f in fields)
    mask = np.zeros((b, n_max), dtype=bool)
    eta_a = np.full((b, n_max, n_max), 30.0)
    eta_n = np.full((b, n_max), 30.0)
    for i, f in enumerate(fields):
        n = f.eta_nodes.shape[0]
        mask[i, :n] = True
        eta_a[i, :n, :n] = f.eta_edges
        eta_n[i, :n] = f.eta_nodes
    return mask, ConcentrationField(eta_a, eta_n)


def _predict_checked(predictor: Predictor, inputs: DiffusionState, t: int, stats, eta):
    if stats is not None:
        adj_in, feat_in = stats.standardize(inputs, eta)
    else:
        adj_in, feat_in = inputs.adjacency, inputs.features
        pair = inputs.edge_mask()
        adj_in = np.where(pair, adj_in, 0.0)
        feat_in = np.where(inputs.node_mask[..., None], feat_in, 0.0)
    a_hat, x_hat = predictor(adj_in, feat_in, t, inputs.node_mask)
    a_hat = np.asarray(a_hat, dtype=np.float64)
    x_hat = np.asarray(x_hat, dtype=np.float64)
    pair = inputs.edge_mask()
    node = np.broadcast_to(inputs.node_mask[..., None], x_hat.shape)
    if not (np.all((a_hat[pair] > 0) & (a_hat[pair] < 1)) and np.all((x_hat[node] > 0) & (x_hat[node] < 1))):
        raise ContractError(f"predictor output outside (0, 1) at t={t}")
    return a_hat, x_hat


def ancestral_sample_batch(
    predictor: Predictor,
    eta_fields: Sequence[ConcentrationField],
    n_features: int,
    schedule: NoiseSchedule,
    params: TransformParams,
    config: SamplerConfig,
    rng: np.random.Generator,
    on_snapshot: Callable[[int, np.ndarray, np.ndarray, np.ndarray], None] | None = None,
) -> list[Graph]:
    """Run the reverse chain for one graph per concentration field.

    Graph sizes come from the fields. ``on_snapshot(t, mask, adjacency, a_hat)``
    receives original-domain adjacency values every ``trajectory_every`` steps.
    """
    mask, eta = _pad_batch(eta_fields, n_features)
    b, n = mask.shape
    T = schedule.T
    m_a, m_x = config.prior_mean
    m_x = np.broadcast_to(np.asarray(m_x, dtype=np.float64), (n_features,))
    prior_a = np.full((b, n, n), float(m_a))
    prior_x = np.broadcast_to(m_x, (b, n, n_features)).copy()
    init = DiffusionState(prior_a, prior_x, t=0, domain="original", node_mask=mask)
    logit = config.domain == "logit"
    state = forward_marginal_sample(init, T, schedule, eta, rng, domain="logit" if logit else "original")

    valid_a = state.edge_mask()
    valid_x = np.broadcast_to(mask[..., None], prior_x.shape)
    for t in range(T, 0, -1):
        a_hat, x_hat = _predict_checked(predictor, state, t, config.stats, eta)
        # padded entries get a harmless in-range value
        a_hat = np.where(valid_a, a_hat, 0.5)
        x_hat = np.where(valid_x, x_hat, 0.5)
        g0_hat = (
            params.w_A * a_hat + params.b_A,
            params.w_X * x_hat + params.b_X,
        )
        step = reverse_step_logit if logit else reverse_step
        state = step(state, g0_hat, t, schedule, eta, rng)
        every = config.trajectory_every
        if on_snapshot is not None and every and (t - 1) % every == 0 and t - 1 < T:
            vals = sigmoid(state.adjacency) if logit else state.adjacency
            on_snapshot(t - 1, mask, vals, a_hat)

    final_a = sigmoid(state.adjacency) if logit else state.adjacency
    final_x = sigmoid(state.features) if logit else state.features
    graphs = []
    for i, f in enumerate(eta_fields):
        k = f.eta_nodes.shape[0]
        graphs.append(
            inverse_transform_quantize(
                (final_a[i, :k, :k], final_x[i, :k]), params, config.threshold
            )
        )
    return graphs


def ancestral_sample(
    predictor: Predictor,
    n_nodes: int,
    schedule: NoiseSchedule,
    eta: ConcentrationField | None,
    params: TransformParams,
    config: SamplerConfig,
    rng: np.random.Generator,
    n_features: int = 0,
) -> Graph:
    """Sample a single graph with ``n_nodes`` nodes."""
    if eta is None:
        eta = ConcentrationField.constant(n_nodes)
    if eta.eta_nodes.shape[0] != n_nodes:
        raise ContractError("concentration field size does not match n_nodes")
    return ancestral_sample_batch(predictor, [eta], n_features, schedule, params, config, rng)[0]
