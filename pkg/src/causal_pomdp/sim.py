"""Trajectory sampling and domain-identification experiments.

Every episode draws from its own stream ``numpy.random.default_rng([seed, episode])``
(PCG64 bit generator), so results do not depend on how episodes are scheduled.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field

import numpy as np

from .belief import product_belief, update_belief
from .errors import ImpossibleObservationError
from .interventions import DomainSpec, as_domain_set, base_domain
from .model import CausalPOMDP
from .planning.policy import PolicySpec, policy_action, policy_advance, policy_start

RNG_ALGORITHM = "numpy.random.Generator/PCG64 seeded with SeedSequence([seed, episode])"


def episode_rng(seed: int, episode: int = 0) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(episode)])


@dataclass(frozen=True)
class Step:
    state: int
    action: int
    next_state: int
    observation: int
    reward: float


@dataclass
class Trajectory:
    initial_state: int
    steps: list[Step]
    domain: str
    seed: int
    episode: int = 0
    rng: str = RNG_ALGORITHM

    def discounted_return(self, gamma: float) -> float:
        return float(sum(gamma**k * st.reward for k, st in enumerate(self.steps)))

    def to_dict(self, model: CausalPOMDP) -> dict:
        return {
            "metadata": {
                "model_hash": model.content_hash(),
                "domain": self.domain,
                "seed": self.seed,
                "episode": self.episode,
                "rng": self.rng,
            },
            "initial_state": list(model.state_of(self.initial_state)),
            "steps": [
                {
                    "state": list(model.state_of(st.state)),
                    "action": model.actions[st.action],
                    "next_state": list(model.state_of(st.next_state)),
                    "observation": dict(zip(model.observables, model.observations[st.observation])),
                    "reward": st.reward,
                }
                for st in self.steps
            ],
        }


def _cumulative(model: CausalPOMDP, domain: DomainSpec) -> np.ndarray:
    key = ("cdf",) + domain.key()
    cdf = model._kernel_cache.get(key)
    if cdf is None:
        cdf = np.cumsum(model.kernel(domain), axis=2)
        model._kernel_cache[key] = cdf
    return cdf


def _draw(cdf_row: np.ndarray, u: float) -> int:
    return min(int(np.searchsorted(cdf_row, u, side="right")), len(cdf_row) - 1)


def sample_episode(
    model: CausalPOMDP,
    true_domain: DomainSpec | None,
    policy: PolicySpec,
    steps: int,
    seed: int,
    episode: int = 0,
    initial_dist=None,
) -> Trajectory:
    """Forward-sample ``steps`` actions under ``true_domain``.

    The initial state is drawn from ``initial_dist`` (uniform by default).
    Rewards are R(s, a) for the state the action was taken in.
    """
    domain = true_domain or base_domain()
    rng = episode_rng(seed, episode)
    n = model.n_states
    b0 = np.full(n, 1.0 / n) if initial_dist is None else np.asarray(initial_dist, dtype=float)
    cdf = _cumulative(model, domain)
    s = _draw(np.cumsum(b0), rng.random())
    mem = policy_start(policy, model, b0)
    out = []
    R = model.reward_matrix
    for k in range(steps):
        a = policy_action(policy, model, mem, steps - 1 - k)
        s2 = _draw(cdf[a, s], rng.random())
        o = int(model.obs_index[s2])
        out.append(Step(s, a, s2, o, float(R[s, a])))
        mem = policy_advance(policy, model, mem, a, o)
        s = s2
    first = out[0].state if out else s
    return Trajectory(first, out, domain.name, seed, episode)


def monte_carlo_policy_value(
    model: CausalPOMDP,
    true_domain: DomainSpec | None,
    policy: PolicySpec,
    horizon: int,
    episodes: int,
    seed: int,
    initial_dist=None,
) -> tuple[float, float]:
    """Mean discounted return over ``horizon + 1`` steps and its standard error."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    returns = np.array([
        sample_episode(model, true_domain, policy, horizon + 1, seed, ep, initial_dist)
        .discounted_return(model.gamma)
        for ep in range(episodes)
    ])
    stderr = float(returns.std(ddof=1) / np.sqrt(episodes)) if episodes > 1 else 0.0
    return float(returns.mean()), stderr


@dataclass
class IdentificationReport:
    domain_names: tuple[str, ...]
    true_domain: str
    posteriors: np.ndarray  # (episodes, steps + 1, n_domains); NaN after a flagged failure
    seed: int
    flagged: dict[int, str] = field(default_factory=dict)
    rng: str = RNG_ALGORITHM

    @property
    def episodes(self) -> int:
        return self.posteriors.shape[0]

    @property
    def steps(self) -> int:
        return self.posteriors.shape[1] - 1

    @property
    def true_index(self) -> int:
        return self.domain_names.index(self.true_domain)

    def mean_true_mass(self) -> np.ndarray:
        """Mean posterior mass on the true domain at each step (0 = prior).

        Flagged episodes drop out after their failure; a step with no
        surviving episode is NaN.
        """
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return np.nanmean(self.posteriors[:, :, self.true_index], axis=0)

    def to_dict(self) -> dict:
        return {
            "true_domain": self.true_domain,
            "domains": list(self.domain_names),
            "episodes": self.episodes,
            "steps": self.steps,
            "seed": self.seed,
            "rng": self.rng,
            "mean_true_mass": self.mean_true_mass().tolist(),
            "flagged": {str(k): v for k, v in sorted(self.flagged.items())},
            "posteriors": [
                [[None if np.isnan(x) else float(x) for x in row] for row in ep]
                for ep in self.posteriors
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "episode", "domain", "posterior"])
        for ep in range(self.episodes):
            for k in range(self.steps + 1):
                for d, name in enumerate(self.domain_names):
                    x = self.posteriors[ep, k, d]
                    if not np.isnan(x):
                        w.writerow([k, ep, name, repr(float(x))])
        return buf.getvalue()


def identification_experiment(
    model: CausalPOMDP,
    domains,
    true_domain: str,
    policy: PolicySpec,
    steps: int,
    episodes: int,
    seed: int,
    state_prior=None,
    domain_prior=None,
) -> IdentificationReport:
    """Sample under the true domain, filter over the whole set, record b_D per step."""
    domains = as_domain_set(domains)
    truth = domains.get(true_domain)
    n = model.n_states
    bs = np.full(n, 1.0 / n) if state_prior is None else np.asarray(state_prior, dtype=float)
    bd = (
        np.full(len(domains), 1.0 / len(domains))
        if domain_prior is None
        else np.asarray(domain_prior, dtype=float)
    )
    prior = product_belief(bs, bd)
    post = np.full((episodes, steps + 1, len(domains)), np.nan)
    flagged = {}
    for ep in range(episodes):
        traj = sample_episode(model, truth, policy, steps, seed, ep, initial_dist=bs)
        b = prior
        post[ep, 0] = b.domain_marginal()
        for k, st in enumerate(traj.steps, start=1):
            try:
                b = update_belief(model, domains, b, st.action, st.observation)
            except ImpossibleObservationError as e:
                flagged[ep] = f"step {k}: {e}"
                break
            post[ep, k] = b.domain_marginal()
    return IdentificationReport(domains.names, true_domain, post, seed, flagged)
