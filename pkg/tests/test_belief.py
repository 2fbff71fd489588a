import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causal_pomdp.belief import (
    JointBelief,
    filter_trace,
    observation_likelihood,
    observation_likelihoods,
    parse_trace,
    predict,
    product_belief,
    uniform_joint_belief,
    update_belief,
)
from causal_pomdp.errors import ImpossibleObservationError, NormalizationError, ShapeError
from causal_pomdp.examples import tiger_model
from causal_pomdp.interventions import DomainSet, DomainSpec, base_domain

from factories import random_domains, random_model
from reference import flat_filter, flat_kernel, flat_obs

HL = {"Z": "hl"}


def p_left(b: JointBelief) -> float:
    s = b.state_marginal()
    return float(s[0] + s[1])


def test_one_listen():
    m = tiger_model()
    D = DomainSet([base_domain()])
    b0 = uniform_joint_belief(m, D)
    assert observation_likelihood(m, D, b0, "listen", HL) == pytest.approx(0.5, abs=1e-12)
    b1 = update_belief(m, D, b0, "listen", HL)
    assert p_left(b1) == pytest.approx(0.85, abs=1e-12)


def test_two_listens():
    m = tiger_model()
    D = DomainSet([base_domain()])
    bs = filter_trace(m, D, uniform_joint_belief(m, D), [("listen", HL), ("listen", HL)])
    assert p_left(bs[2]) == pytest.approx(0.85**2 / (0.85**2 + 0.15**2), abs=1e-12)
    assert p_left(bs[2]) == pytest.approx(0.9698, abs=1e-4)


def test_domain_posterior_with_known_tiger_position():
    m = tiger_model()
    D = m.domain_set(["base", "degraded"])
    state = np.array([0.5, 0.5, 0.0, 0.0])  # H = L
    b1 = update_belief(m, D, product_belief(state, [0.5, 0.5]), "listen", HL)
    np.testing.assert_allclose(b1.domain_marginal(), [0.85 / 1.49, 0.64 / 1.49], atol=1e-12)
    np.testing.assert_allclose(b1.domain_marginal(), [0.5704, 0.4296], atol=1e-4)


def test_domain_posterior_with_uniform_prior_is_uninformative():
    m = tiger_model()
    D = m.domain_set(["base", "degraded"])
    b1 = update_belief(m, D, uniform_joint_belief(m, D), "listen", HL)
    np.testing.assert_allclose(b1.domain_marginal(), [0.5, 0.5], atol=1e-12)


def test_impossible_observation_reports_step():
    m = tiger_model()
    D = DomainSet([base_domain()])
    prior = product_belief([0.5, 0.5, 0.0, 0.0], [1.0])
    certain = DomainSet([DomainSpec("deaf", {"Z": [[1.0, 0.0], [1.0, 0.0]]})])
    filter_trace(m, D, prior, [("listen", HL)])
    with pytest.raises(ImpossibleObservationError) as e:
        filter_trace(m, certain, prior, [("listen", HL), ("listen", {"Z": "hr"})])
    assert e.value.step == 2


def test_joint_belief_validation():
    with pytest.raises(NormalizationError):
        JointBelief(np.full((2, 2), 0.3))
    with pytest.raises(ShapeError):
        JointBelief(np.array([0.5, 0.5]))
    b = JointBelief(np.full((2, 2), 0.25))
    with pytest.raises(ValueError):
        b.table[0, 0] = 1.0


def test_parse_trace():
    m = tiger_model()
    steps = parse_trace(m, [{"action": "listen", "observation": {"Z": "hl"}}])
    assert steps[0].action == "listen"
    with pytest.raises(KeyError):
        parse_trace(m, [{"action": "jump", "observation": {"Z": "hl"}}])
    with pytest.raises(KeyError):
        parse_trace(m, [{"action": "listen", "observation": {"Z": "loud"}}])
    with pytest.raises(ValueError):
        parse_trace(m, {"action": "listen"})


def _random_case(seed):
    rng = np.random.default_rng(seed)
    m = random_model(rng)
    D = random_domains(rng, m)
    b = JointBelief(rng.dirichlet(np.ones(m.n_states * len(D))).reshape(m.n_states, len(D)))
    return rng, m, D, b


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_update_matches_per_domain_flat_filter(seed):
    """The joint update equals running a flat filter inside each domain and reweighting."""
    rng, m, D, b = _random_case(seed)
    a = int(rng.integers(m.n_actions))
    lik = observation_likelihoods(m, D, b, a)
    o = int(rng.choice(len(lik), p=lik / lik.sum()))
    post = update_belief(m, D, b, a, o)
    obs = flat_obs(m)
    label = m.observations[o]
    per_domain = []
    for k, d in enumerate(D):
        bd = b.table[:, k].sum()
        if bd == 0:
            per_domain.append(np.zeros(m.n_states))
            continue
        T = flat_kernel(m, d.shifts)
        pred = b.table[:, k] @ T[a]
        z = sum(pred[j] for j in range(m.n_states) if obs[j] == label)
        f = flat_filter(T, obs, b.table[:, k] / bd, a, label)
        per_domain.append(np.zeros(m.n_states) if f is None else f * z)
    expected = np.stack(per_domain, axis=1)
    expected /= expected.sum()
    np.testing.assert_allclose(post.table, expected, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_update_invariants(seed):
    rng, m, D, b = _random_case(seed)
    a = int(rng.integers(m.n_actions))
    lik = observation_likelihoods(m, D, b, a)
    assert lik.sum() == pytest.approx(1.0, abs=1e-12)
    o = int(np.argmax(lik))
    post = update_belief(m, D, b, a, o)
    assert abs(post.table.sum() - 1.0) <= 1e-12
    assert np.all(post.table >= 0)
    # States that would emit another observation carry no mass.
    assert np.all(post.table[m.obs_index != o] == 0.0)
    # A domain with no prior mass never gains any.
    zero = b.table.sum(axis=0) == 0
    assert np.all(post.domain_marginal()[zero] == 0)
    # Predict keeps each domain's mass.
    np.testing.assert_allclose(predict(m, D, b, a).sum(axis=0), b.domain_marginal(), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_indistinguishable_domains_keep_prior_ratio(seed):
    rng, m, D, _ = _random_case(seed)
    d = D[-1]
    twin = DomainSet([d, DomainSpec(d.name + "-twin", d.shifts)])
    bd = rng.dirichlet(np.ones(2))
    b = product_belief(rng.dirichlet(np.ones(m.n_states)), bd)
    for _ in range(8):
        a = int(rng.integers(m.n_actions))
        lik = observation_likelihoods(m, twin, b, a)
        o = int(rng.choice(len(lik), p=lik / lik.sum()))
        b = update_belief(m, twin, b, a, o)
        post = b.domain_marginal()
        assert post[0] / post[1] == pytest.approx(bd[0] / bd[1], rel=1e-9)


def test_no_observables_leaves_domain_marginal_unchanged():
    rng = np.random.default_rng(11)
    while True:
        m = random_model(rng)
        if not m.observables:
            break
    D = random_domains(rng, m, 3)
    b = uniform_joint_belief(m, D)
    for _ in range(5):
        b = update_belief(m, D, b, 0, 0)
        np.testing.assert_allclose(b.domain_marginal(), 1 / 3, atol=1e-12)


def test_one_state_model_belief_is_fixed():
    from causal_pomdp.model import load_model

    m = load_model({
        "variables": [{"name": "X", "values": ["x"]}],
        "actions": ["a", "b"],
        "parents": {"X": {"prev": ["X"], "curr": []}},
        "transition": {"X": {"a": [[1.0]], "b": [[1.0]]}},
        "reward": {"vars": ["X"], "table": {"a": [0.0], "b": [1.0]}},
        "observables": ["X"],
        "gamma": 0.9,
    })
    D = DomainSet([base_domain()])
    b = uniform_joint_belief(m, D)
    for a in ("a", "b", "a"):
        b = update_belief(m, D, b, a, {"X": "x"})
        assert b.table.tolist() == [[1.0]]
