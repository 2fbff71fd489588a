"""Policies and their exact evaluation under a known shift.

Two kinds of policy are supported:

``reactive``
    maps the last observation to an action, with a fixed first action.
``greedy``
    acts greedily on a joint belief over its own domain set, using the alpha
    set whose stage matches the remaining horizon (or the closest lower one).

A policy's internal state ("memory") is the last observation index for a
reactive policy and a :class:`JointBelief` for a greedy one.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from ..belief import product_belief, update_belief
from ..errors import BudgetExceededError
from ..interventions import DomainSet, DomainSpec, base_domain
from ..model import CausalPOMDP
from .alpha import AlphaSet, value_at

DEFAULT_NODE_BUDGET = 10**6
BUDGET_ENV = "CAUSAL_POMDP_NODE_BUDGET"


def node_budget(default: int = DEFAULT_NODE_BUDGET) -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else default


@dataclass(frozen=True)
class PolicySpec:
    kind: str
    initial: str | None = None
    mapping: Mapping[int, str] = field(default_factory=dict)
    stages: tuple[AlphaSet, ...] = ()
    domains: DomainSet | None = None

    def __post_init__(self):
        if self.kind not in ("reactive", "greedy"):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind == "greedy" and (not self.stages or self.domains is None):
            raise ValueError("a greedy policy needs alpha sets and their domain set")


def reactive_policy(model: CausalPOMDP, initial: str, mapping: Mapping) -> PolicySpec:
    """``mapping`` keys may be observation indices, label tuples, dicts or text keys."""
    if initial not in model.action_index:
        raise KeyError(f"unknown action {initial!r}")
    table = {}
    for key, action in mapping.items():
        if isinstance(key, (int, np.integer)):
            o = int(key)
        elif isinstance(key, str):
            o = model.parse_observation_key(key)
        else:
            o = model.observation_index(key)
        if action not in model.action_index:
            raise KeyError(f"unknown action {action!r}")
        table[o] = action
    missing = [model.observation_key(o) for o in range(model.n_observations) if o not in table]
    if missing:
        raise ValueError(f"reactive policy does not cover observations {missing}")
    return PolicySpec("reactive", initial=initial, mapping=table)


def constant_policy(model: CausalPOMDP, action: str | None = None) -> PolicySpec:
    """Always play ``action`` (default: the first declared action)."""
    action = action if action is not None else model.actions[0]
    return reactive_policy(model, action, {o: action for o in range(model.n_observations)})


def greedy_policy(stages, domains: DomainSet) -> PolicySpec:
    if isinstance(stages, AlphaSet):
        stages = [stages]
    return PolicySpec("greedy", stages=tuple(stages), domains=domains)


def _stage_for(policy: PolicySpec, remaining: int) -> AlphaSet:
    best = None
    for st in policy.stages:
        if st.stage <= remaining and (best is None or st.stage > best.stage):
            best = st
    return best if best is not None else min(policy.stages, key=lambda s: s.stage)


def policy_start(policy: PolicySpec, model: CausalPOMDP, b0_state):
    if policy.kind == "reactive":
        return None
    n = len(policy.domains)
    return product_belief(b0_state, np.full(n, 1.0 / n))


def policy_action(policy: PolicySpec, model: CausalPOMDP, memory, remaining: int) -> int:
    if policy.kind == "reactive":
        label = policy.initial if memory is None else policy.mapping[memory]
        return model.action_index[label]
    alphas = _stage_for(policy, remaining)
    _, i = value_at(alphas, memory)
    return int(alphas.actions[i])


def policy_advance(policy: PolicySpec, model: CausalPOMDP, memory, a: int, o: int):
    if policy.kind == "reactive":
        return o
    return update_belief(model, policy.domains, memory, a, o)


def evaluate_policy_known_shift(
    model: CausalPOMDP,
    sigma: DomainSpec | None,
    policy: PolicySpec,
    b0,
    horizon: int,
    budget: int | None = None,
) -> float:
    """Exact expected discounted return over ``horizon + 1`` steps under a fixed domain.

    Expands the belief tree level by level; each node carries its
    probability, the state distribution under ``sigma`` and the policy's
    memory.  Raises :class:`BudgetExceededError` when the tree grows past
    ``budget`` nodes.
    """
    budget = node_budget() if budget is None else budget
    sigma = sigma or base_domain()
    K = model.kernel(sigma)
    R = model.reward_matrix
    b0 = np.asarray(b0, dtype=float)
    level = [(1.0, b0, policy_start(policy, model, b0))]
    total = 0.0
    nodes = 1
    for depth in range(horizon + 1):
        remaining = horizon - depth
        nxt = []
        disc = model.gamma**depth
        for weight, bs, mem in level:
            a = policy_action(policy, model, mem, remaining)
            total += disc * weight * float(R[:, a] @ bs)
            if remaining == 0:
                continue
            pred = bs @ K[a]
            lik = np.bincount(model.obs_index, weights=pred, minlength=model.n_observations)
            for o in np.flatnonzero(lik > 0):
                child = np.where(model.obs_index == o, pred, 0.0) / lik[o]
                nxt.append((weight * lik[o], child, policy_advance(policy, model, mem, a, int(o))))
        nodes += len(nxt)
        if nodes > budget:
            raise BudgetExceededError(budget, nodes, "use Monte Carlo evaluation (--mc) instead")
        level = nxt
    return total

