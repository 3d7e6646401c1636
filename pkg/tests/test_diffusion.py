import numpy as np
import pytest

from betagraph.diffusion import (
    SamplerConfig,
    ancestral_sample,
    ancestral_sample_batch,
    forward_marginal_sample,
    forward_step,
    reverse_step,
    reverse_step_logit,
    thicken,
    thicken_logit,
)
from betagraph.errors import ContractError, DomainError
from betagraph.graph import Graph, TransformParams
from betagraph.numerics import NoiseSchedule, logit, rng_stream, sigmoid
from betagraph.state import ConcentrationField, DiffusionState

SEED = 20261015
HALF = NoiseSchedule(c0=1.0, c1=-1.0, T=2)  # alpha_1 = 0.5 exactly


def wide_state(g0: float, m: int, eta: float = 30.0):
    """One node with ``m`` feature channels: ``m`` independent scalar entries."""
    state = DiffusionState(np.full((1, 1), 0.5), np.full((1, m), g0))
    return state, ConcentrationField(np.full((1, 1), eta), np.full(1, eta))


def test_forward_marginal_moments():
    assert HALF.alpha(1) == 0.5
    state, eta = wide_state(0.99, 10**6)
    x = forward_marginal_sample(state, 1, HALF, eta, rng_stream(SEED, 1)).features.ravel()
    m = 0.5 * 0.99
    var = m * (1 - m) / 31
    assert var == pytest.approx(0.495 * 0.505 / 31)
    n = x.size
    assert abs(x.mean() - m) <= 3 * np.sqrt(var / n)
    # sd of the sample variance from the beta fourth central moment
    from scipy import stats

    d = stats.beta(30 * m, 30 * (1 - m))
    c4 = d.expect(lambda v: (v - m) ** 4)
    assert abs(x.var() - var) <= 3 * np.sqrt((c4 - var**2) / n)
    assert np.all((x > 0) & (x < 1))


def test_forward_marginal_symmetric_and_logit():
    s = NoiseSchedule()
    a0 = np.full((5, 5), 0.09)
    a0[0, 1] = a0[1, 0] = 0.99
    state = DiffusionState(a0, np.full((5, 2), 0.5))
    eta = ConcentrationField.constant(5)
    out = forward_marginal_sample(state, 300, s, eta, rng_stream(SEED, 2))
    assert np.array_equal(out.adjacency, out.adjacency.T) and out.t == 300
    lg = forward_marginal_sample(state, 300, s, eta, rng_stream(SEED, 2), domain="logit")
    assert lg.domain == "logit"
    np.testing.assert_allclose(sigmoid(lg.adjacency), out.adjacency, rtol=1e-12)


def test_forward_marginal_errors():
    s = NoiseSchedule()
    bad = DiffusionState(np.full((2, 2), 1.0), np.zeros((2, 0)))
    with pytest.raises(DomainError):
        forward_marginal_sample(bad, 10, s, ConcentrationField.constant(2), rng_stream(0))
    ok = DiffusionState(np.full((2, 2), 0.5), np.zeros((2, 0)))
    with pytest.raises(IndexError):
        forward_marginal_sample(ok, 0, s, ConcentrationField.constant(2), rng_stream(0))


@pytest.mark.parametrize("g0", [0.99, 0.09])
def test_forward_chain_matches_marginal(g0):
    s = NoiseSchedule()
    m = 10**5
    state, eta = wide_state(g0, m)
    rng = rng_stream(SEED, 3)
    g = state
    for t in range(1, 201):
        prev = g.features
        g = forward_step(g, state, t, s, eta, rng)
        assert np.all(g.features <= prev)
        if t in (50, 200):
            at = s.alpha(t)
            mean = at * g0
            sd = np.sqrt(mean * (1 - mean) / 31 / m)
            assert abs(g.features.mean() - mean) <= 3 * sd


def test_forward_step_degenerate_schedule():
    flat = NoiseSchedule(c0=40.0, c1=39.0, T=10)  # sigmoid saturates to 1.0
    state, eta = wide_state(0.5, 3)
    with pytest.raises(DomainError):
        forward_step(state, state, 1, flat, eta, rng_stream(0))


def test_thicken_domains_agree():
    gs = np.array([1e-6, 0.5, 1 - 1e-6])
    ps = np.array([0.0, 1e-12, 1e-6, 0.3, 0.5, 0.999, 1 - 1e-9])
    g, p = np.meshgrid(gs, ps)
    direct = thicken(g, p)
    with np.errstate(divide="ignore"):
        lp = np.log(p) - np.log1p(-p)
    via_logit = sigmoid(thicken_logit(np.log(g) - np.log1p(-g), lp))
    assert np.max(np.abs(direct - via_logit)) <= 1e-9


def test_thicken_limits():
    x = np.array([-40.0, -3.0, 0.0, 40.0])
    np.testing.assert_array_equal(thicken_logit(x, np.full(4, -np.inf)), x)
    np.testing.assert_array_equal(thicken(sigmoid(x), np.zeros(4)), sigmoid(x))
    out = thicken_logit(np.array([40.0, -40.0, 40.0]), np.array([40.0, -40.0, -40.0]))
    assert np.all(np.isfinite(out))


def test_reverse_step_monotone_and_symmetric():
    s = NoiseSchedule()
    rng = rng_stream(SEED, 4)
    n = 6
    vals = np.triu(rng.uniform(0.01, 0.99, (n, n)), 1)
    vals = vals + vals.T + np.eye(n) * 0.09
    state = DiffusionState(vals, rng.uniform(0.01, 0.99, (n, 3)), t=500)
    g0_hat = (np.full((n, n), 0.7), np.full((n, 3), 0.3))
    out = reverse_step(state, g0_hat, 500, s, ConcentrationField.constant(n), rng)
    assert out.t == 499
    assert np.all(out.adjacency >= state.adjacency) and np.all(out.features >= state.features)
    assert np.array_equal(out.adjacency, out.adjacency.T)

    lg = state.with_values(logit(state.adjacency), logit(state.features), domain="logit")
    out_l = reverse_step_logit(lg, g0_hat, 500, s, ConcentrationField.constant(n), rng)
    assert np.all(out_l.adjacency >= lg.adjacency)
    assert np.array_equal(out_l.adjacency, out_l.adjacency.T)


def test_reverse_step_same_draws_both_domains():
    # identical streams give identical multipliers, so the domains agree
    s = NoiseSchedule()
    n = 4
    rng = rng_stream(SEED, 5)
    g = np.triu(rng.uniform(1e-6, 1 - 1e-6, (n, n)), 1)
    g = g + g.T + np.eye(n) * 0.5
    x = rng.uniform(1e-6, 1 - 1e-6, (n, 2))
    hat = (np.full((n, n), 0.6), np.full((n, 2), 0.2))
    eta = ConcentrationField.constant(n, 100.0)
    orig = reverse_step(DiffusionState(g, x), hat, 10, s, eta, rng_stream(1))
    lg = DiffusionState(np.log(g) - np.log1p(-g), np.log(x) - np.log1p(-x), domain="logit")
    via = reverse_step_logit(lg, hat, 10, s, eta, rng_stream(1))
    # the original-domain sampler clips tiny draws; compare where that is irrelevant
    assert np.max(np.abs(sigmoid(via.adjacency) - orig.adjacency)) <= 1e-9
    assert np.max(np.abs(sigmoid(via.features) - orig.features)) <= 1e-9


def test_reverse_step_errors():
    s = NoiseSchedule()
    st_ = DiffusionState(np.full((2, 2), 0.5), np.zeros((2, 0)))
    eta = ConcentrationField.constant(2)
    with pytest.raises(DomainError):
        reverse_step(st_, (np.full((2, 2), 1.0), np.zeros((2, 0))), 5, s, eta, rng_stream(0))
    with pytest.raises(DomainError):
        reverse_step_logit(st_, (np.full((2, 2), 0.5), np.zeros((2, 0))), 5, s, eta, rng_stream(0))
    with pytest.raises(IndexError):
        reverse_step(st_, (np.full((2, 2), 0.5), np.zeros((2, 0))), 0, s, eta, rng_stream(0))


def _const_predictor(target_a, target_x):
    def predict(adj, feat, t, mask):
        b = adj.shape[0]
        return np.broadcast_to(target_a, (b,) + target_a.shape), np.broadcast_to(target_x, (b,) + target_x.shape)

    return predict


def test_oracle_predictor_recovers_target():
    star = Graph.from_edges(6, [(0, i) for i in range(1, 6)] + [(2, 3)])
    raw = np.where(star.adjacency == 1, 0.999, 0.001).astype(float)
    np.fill_diagonal(raw, 0.5)
    params = TransformParams()
    cfg = SamplerConfig(prior_mean=(0.2, np.zeros(0)), domain="logit")
    fields = [ConcentrationField.constant(6)] * 200
    out = ancestral_sample_batch(
        _const_predictor(raw, np.zeros((6, 0))), fields, 0, NoiseSchedule(), params, cfg, rng_stream(SEED, 7)
    )
    hits = sum(g == star for g in out)
    assert hits >= 190
    cfg_o = SamplerConfig(prior_mean=(0.2, np.zeros(0)), domain="original")
    out = ancestral_sample_batch(
        _const_predictor(raw, np.zeros((6, 0))), fields[:50], 0, NoiseSchedule(), params, cfg_o, rng_stream(SEED, 8)
    )
    assert sum(g == star for g in out) >= 47


def test_single_step_schedule():
    s = NoiseSchedule(T=1)
    cfg = SamplerConfig(prior_mean=(0.3, np.full(2, 0.5)))
    rng = rng_stream(SEED, 9)

    def predictor(adj, feat, t, mask):
        assert t == 1
        return np.full(adj.shape, 0.6), np.full(feat.shape, 0.4)

    g = ancestral_sample(predictor, 5, s, None, TransformParams(), cfg, rng, n_features=2)
    assert isinstance(g, Graph) and g.n == 5 and g.features.shape == (5, 2)


def test_random_predictors_give_valid_graphs():
    rng = rng_stream(SEED, 10)
    sizes = rng.integers(2, 9, size=100)
    fields = [ConcentrationField.constant(int(n)) for n in sizes]

    def predictor(adj, feat, t, mask):
        return rng.uniform(0.01, 0.99, adj.shape), rng.uniform(0.01, 0.99, feat.shape)

    cfg = SamplerConfig(prior_mean=(0.3, np.full(1, 0.3)), domain="logit")
    out = ancestral_sample_batch(predictor, fields, 1, NoiseSchedule(T=50), TransformParams(), cfg, rng)
    for g, n in zip(out, sizes):
        assert g.n == n
        assert np.array_equal(g.adjacency, g.adjacency.T)
        assert np.all(np.diag(g.adjacency) == 0)


def test_predictor_out_of_range_is_contract_error():
    cfg = SamplerConfig(prior_mean=(0.3, np.zeros(0)))

    def predictor(adj, feat, t, mask):
        return np.full(adj.shape, 1.0), feat

    with pytest.raises(ContractError):
        ancestral_sample(predictor, 4, NoiseSchedule(T=5), None, TransformParams(), cfg, rng_stream(0))


def test_snapshots_every_k_steps():
    seen = []
    cfg = SamplerConfig(prior_mean=(0.3, np.zeros(0)), trajectory_every=10)

    def predictor(adj, feat, t, mask):
        return np.full(adj.shape, 0.5), feat + 0.5

    ancestral_sample_batch(
        predictor,
        [ConcentrationField.constant(3)] * 2,
        0,
        NoiseSchedule(T=30),
        TransformParams(),
        cfg,
        rng_stream(0),
        on_snapshot=lambda t, mask, vals, a_hat: seen.append((t, vals.shape)),
    )
    assert [t for t, _ in seen] == [20, 10, 0]
    assert all(shape == (2, 3, 3) for _, shape in seen)
