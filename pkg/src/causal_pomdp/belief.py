"""Joint belief over (state, domain) and its Bayesian filter.

The domain is fixed for an episode, so the filter propagates each domain's
column through that domain's kernel and then conditions on the observation:

    b'(s', d) ∝ O(s', o) * sum_s b(s, d) * T_d(s, a, s')
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ImpossibleObservationError, NormalizationError, ShapeError
from .interventions import ARITH_TOL, DomainSet, as_domain_set
from .model import CausalPOMDP


@dataclass(frozen=True, eq=False)
class JointBelief:
    """Dense distribution ``table[s, d]`` over states x domains (read-only)."""

    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        if t.ndim != 2:
            raise ShapeError(f"joint belief must be 2-D (states x domains), got {t.shape}")
        if np.any(t < 0) or abs(t.sum() - 1.0) > ARITH_TOL:
            raise NormalizationError(f"joint belief must be a distribution (sum={t.sum()!r})")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def shape(self) -> tuple[int, int]:
        return self.table.shape

    def state_marginal(self) -> np.ndarray:
        return self.table.sum(axis=1)

    def domain_marginal(self) -> np.ndarray:
        return self.table.sum(axis=0)

    def __eq__(self, other):
        return isinstance(other, JointBelief) and np.array_equal(self.table, other.table)

    def __repr__(self):
        return f"JointBelief(shape={self.table.shape})"


@dataclass(frozen=True)
class TraceStep:
    action: str
    observation: Mapping[str, str] | tuple


def marginal_state(b: JointBelief) -> np.ndarray:
    return b.state_marginal()


def marginal_domain(b: JointBelief) -> np.ndarray:
    return b.domain_marginal()


def uniform_joint_belief(model: CausalPOMDP, domains) -> JointBelief:
    domains = as_domain_set(domains)
    n = model.n_states * len(domains)
    return JointBelief(np.full((model.n_states, len(domains)), 1.0 / n))


def product_belief(state_dist, domain_dist) -> JointBelief:
    """b(s, d) = b_S(s) * b_D(d)."""
    return JointBelief(np.outer(np.asarray(state_dist, float), np.asarray(domain_dist, float)))


def domain_kernels(model: CausalPOMDP, domains) -> np.ndarray:
    """Stacked kernels, shape ``(n_domains, n_actions, n_states, n_states)``."""
    domains = as_domain_set(domains)
    key = ("stack",) + tuple(d.key() for d in domains)
    cached = model._kernel_cache.get(key)
    if cached is None:
        cached = np.stack([model.kernel(d) for d in domains])
        cached.setflags(write=False)
        model._kernel_cache[key] = cached
    return cached


def _check(model: CausalPOMDP, domains: DomainSet, b: JointBelief):
    if b.shape != (model.n_states, len(domains)):
        raise ShapeError(f"belief shape {b.shape} != ({model.n_states}, {len(domains)})")


def _action(model: CausalPOMDP, a) -> int:
    if isinstance(a, (int, np.integer)):
        return int(a)
    try:
        return model.action_index[a]
    except KeyError:
        raise KeyError(f"unknown action {a!r}") from None


def _obs(model: CausalPOMDP, o) -> int:
    if isinstance(o, (int, np.integer)):
        return int(o)
    if isinstance(o, str):
        return model.parse_observation_key(o)
    return model.observation_index(o)


def predict(model: CausalPOMDP, domains, b: JointBelief, a) -> np.ndarray:
    """Unnormalized joint P(s', d | a, b) before observing, shape ``(n_states, n_domains)``."""
    domains = as_domain_set(domains)
    _check(model, domains, b)
    K = domain_kernels(model, domains)[:, _action(model, a)]  # (D, S, S')
    return np.einsum("sd,dst->td", b.table, K)


def observation_likelihoods(model: CausalPOMDP, domains, b: JointBelief, a) -> np.ndarray:
    """P(o | a, b) for every observation index."""
    pred = predict(model, domains, b, a)
    return np.bincount(model.obs_index, weights=pred.sum(axis=1), minlength=model.n_observations)


def observation_likelihood(model: CausalPOMDP, domains, b: JointBelief, a, o) -> float:
    pred = predict(model, domains, b, a)
    return float(pred[model.obs_index == _obs(model, o)].sum())


def condition(model: CausalPOMDP, pred: np.ndarray, o: int, action=None) -> JointBelief:
    """Condition a predicted joint on observation index ``o``."""
    mask = model.obs_index == o
    post = np.where(mask[:, None], pred, 0.0)
    z = post.sum()
    if z <= 0.0:
        raise ImpossibleObservationError(action, model.observations[o], float(z))
    return JointBelief(post / z)


def update_belief(model: CausalPOMDP, domains, b: JointBelief, a, o) -> JointBelief:
    """One step of the joint state-domain filter.

    Raises :class:`ImpossibleObservationError` when P(o | a, b) = 0.
    """
    pred = predict(model, domains, b, a)
    return condition(model, pred, _obs(model, o), action=a)


def filter_trace(model: CausalPOMDP, domains, b0: JointBelief, trace: Sequence) -> list[JointBelief]:
    """Beliefs after 0, 1, ..., len(trace) steps.

    Trace items are :class:`TraceStep` or ``(action, observation)`` pairs.
    An impossible observation is re-raised with its 1-based step index.
    """
    domains = as_domain_set(domains)
    out = [b0]
    b = b0
    for k, step in enumerate(trace, start=1):
        a, o = (step.action, step.observation) if isinstance(step, TraceStep) else step
        try:
            b = update_belief(model, domains, b, a, o)
        except ImpossibleObservationError as e:
            e.step = k
            e.args = (f"{e.args[0]} at step {k}",)
            raise
        out.append(b)
    return out


def parse_trace(model: CausalPOMDP, doc) -> list[TraceStep]:
    """Decode a trace document: ``[{"action": str, "observation": {var: value}}, ...]``."""
    if not isinstance(doc, list):
        raise ValueError("trace must be a JSON list")
    steps = []
    for i, item in enumerate(doc):
        if not isinstance(item, dict) or "action" not in item or "observation" not in item:
            raise ValueError(f"trace[{i}] needs 'action' and 'observation'")
        if item["action"] not in model.action_index:
            raise KeyError(f"trace[{i}].action: unknown action {item['action']!r}")
        obs = item["observation"]
        model.observation_index(obs)  # raises on bad labels
        steps.append(TraceStep(item["action"], dict(obs)))
    return steps
