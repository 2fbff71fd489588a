import numpy as np
import pytest

from causal_pomdp.examples import coin_model, tiger_model
from causal_pomdp.interventions import DomainSet, DomainSpec, base_domain
from causal_pomdp.planning import constant_policy, evaluate_policy_known_shift, reactive_policy
from causal_pomdp.sim import (
    RNG_ALGORITHM,
    episode_rng,
    identification_experiment,
    monte_carlo_policy_value,
    sample_episode,
)

from factories import random_domains, random_model


def test_episode_streams_are_reproducible_and_independent():
    assert episode_rng(3, 1).random() == episode_rng(3, 1).random()
    assert episode_rng(3, 1).random() != episode_rng(3, 2).random()
    assert "PCG64" in RNG_ALGORITHM


def test_sample_episode_reproducible():
    m = tiger_model()
    pol = reactive_policy(m, "listen", {"Z=hl": "open-right", "Z=hr": "listen"})
    a = sample_episode(m, None, pol, 20, seed=4, episode=7)
    b = sample_episode(m, None, pol, 20, seed=4, episode=7)
    assert a.to_dict(m) == b.to_dict(m)
    assert a.to_dict(m)["metadata"]["rng"] == RNG_ALGORITHM


@pytest.mark.parametrize("seed", range(5))
def test_trajectories_respect_the_model(seed):
    rng = np.random.default_rng(seed)
    m = random_model(rng)
    d = random_domains(rng, m, 2)[1]
    K = m.kernel(d)
    traj = sample_episode(m, d, constant_policy(m), 30, seed=seed)
    for k, st in enumerate(traj.steps):
        assert K[st.action, st.state, st.next_state] > 0
        assert st.observation == m.obs_index[st.next_state]
        assert st.reward == m.reward_matrix[st.state, st.action]
        if k:
            assert st.state == traj.steps[k - 1].next_state


def test_sampling_frequencies_match_kernel():
    m = tiger_model()
    degraded = m.domain_set(["degraded"])[0]
    pol = constant_policy(m, "listen")
    hits = 0
    n = 4000
    for ep in range(n):
        st = sample_episode(m, degraded, pol, 1, seed=1, episode=ep, initial_dist=[0.5, 0.5, 0, 0]).steps[0]
        hits += m.observations[st.observation] == ("hl",)
    # sd of the frequency is about 0.0076
    assert abs(hits / n - 0.64) < 0.04


def test_monte_carlo_constant_return():
    m = tiger_model()
    mean, se = monte_carlo_policy_value(m, None, constant_policy(m, "listen"), 3, 50, seed=0)
    assert mean == pytest.approx(-3.709875, abs=1e-12)
    assert se < 1e-12
    with pytest.raises(ValueError):
        monte_carlo_policy_value(m, None, constant_policy(m), 3, 0, seed=0)


def test_monte_carlo_matches_exact():
    m = tiger_model()
    pol = reactive_policy(m, "listen", {"Z=hl": "open-right", "Z=hr": "open-left"})
    degraded = m.domain_set(["degraded"])[0]
    exact = evaluate_policy_known_shift(m, degraded, pol, np.full(4, 0.25), 2)
    mean, se = monte_carlo_policy_value(m, degraded, pol, 2, 5000, seed=11)
    assert abs(mean - exact) < 4 * se


def test_identification_report_shapes_and_csv():
    m = tiger_model()
    D = m.domain_set()
    rep = identification_experiment(m, D, "degraded", constant_policy(m, "listen"), 10, 7, seed=3)
    assert rep.posteriors.shape == (7, 11, 2)
    np.testing.assert_allclose(rep.posteriors.sum(axis=2), 1.0, atol=1e-12)
    np.testing.assert_allclose(rep.posteriors[:, 0], 0.5)
    lines = rep.to_csv().splitlines()
    assert lines[0] == "step,episode,domain,posterior"
    assert len(lines) == 1 + 7 * 11 * 2
    doc = rep.to_dict()
    assert doc["domains"] == ["base", "degraded"] and len(doc["mean_true_mass"]) == 11
    again = identification_experiment(m, D, "degraded", constant_policy(m, "listen"), 10, 7, seed=3)
    assert np.array_equal(rep.posteriors, again.posteriors)


def test_identification_flags_impossible_observations():
    m = tiger_model()
    deaf = DomainSpec("deaf", {"Z": [[1.0, 0.0], [1.0, 0.0]]})
    D = DomainSet([deaf, base_domain("truth")])
    # All prior mass on a domain that never emits "hr"; the truth emits it often.
    rep = identification_experiment(
        m, D, "truth", constant_policy(m, "listen"), 20, 5, seed=0, domain_prior=[1.0, 0.0]
    )
    assert rep.flagged
    ep = min(rep.flagged)
    assert "step" in rep.flagged[ep]
    assert np.isnan(rep.posteriors[ep, -1]).all()
    assert rep.to_dict()["posteriors"][ep][-1] == [None, None]


def test_coin_posterior_stays_at_prior():
    m = coin_model()
    D = m.domain_set(["sigma", "sigma-prime"])
    rep = identification_experiment(m, D, "sigma", constant_policy(m), 25, 20, seed=2, domain_prior=[0.3, 0.7])
    np.testing.assert_allclose(rep.posteriors[:, :, 0], 0.3, atol=1e-12)
