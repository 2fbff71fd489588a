"""Brute-force reference values by direct recursion over the belief tree.

Nothing here uses alpha vectors: the optimal value is the literal
max-over-actions / expectation-over-observations recursion, and policy
values are the same recursion with the action fixed by the policy.
Deliberately naive; use only at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .belief import JointBelief, condition, predict, product_belief
from .errors import BudgetExceededError
from .interventions import DomainSet, DomainSpec, as_domain_set, base_domain
from .model import CausalPOMDP
from .planning.policy import PolicySpec, node_budget, policy_action, policy_advance, policy_start


@dataclass
class OracleConfig:
    max_nodes: int = 10**6
    tolerance: float = 1e-8

    def __post_init__(self):
        if self.max_nodes <= 0:
            raise ValueError("node budget must be positive")


class _Counter:
    def __init__(self, budget: int):
        self.budget = budget
        self.nodes = 0

    def tick(self, n: int = 1):
        self.nodes += n
        if self.nodes > self.budget:
            raise BudgetExceededError(self.budget, self.nodes)


def _expectimax(model, domains, b: JointBelief, n: int, counter: _Counter) -> float:
    R = model.reward_matrix
    immediate = b.table.sum(axis=1) @ R  # (A,)
    if n == 0:
        return float(immediate.max())
    best = -np.inf
    for a in range(model.n_actions):
        pred = predict(model, domains, b, a)
        lik = np.bincount(model.obs_index, weights=pred.sum(axis=1), minlength=model.n_observations)
        future = 0.0
        for o in range(model.n_observations):
            if lik[o] <= 0.0:
                continue
            counter.tick()
            child = condition(model, pred, o, action=a)
            future += lik[o] * _expectimax(model, domains, child, n - 1, counter)
        best = max(best, immediate[a] + model.gamma * future)
    return float(best)


def expectimax_value(
    model: CausalPOMDP, domains, b: JointBelief, horizon: int, config: OracleConfig | None = None
) -> float:
    """Optimal ``horizon``-step value at ``b`` by exhaustive search."""
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    config = config or OracleConfig(max_nodes=node_budget())
    return _expectimax(model, as_domain_set(domains), b, horizon, _Counter(config.max_nodes))


def expectimax_nodes(model: CausalPOMDP, domains, b: JointBelief, horizon: int) -> tuple[float, int]:
    """Value together with the number of child beliefs expanded."""
    counter = _Counter(10**12)
    v = _expectimax(model, as_domain_set(domains), b, horizon, counter)
    return v, counter.nodes


def _policy_value(model, sigma_set, policy, b: JointBelief, mem, n: int, counter) -> float:
    a = policy_action(policy, model, mem, n)
    v = float(b.table[:, 0] @ model.reward_matrix[:, a])
    if n == 0:
        return v
    pred = predict(model, sigma_set, b, a)
    lik = pred.sum(axis=1)
    future = 0.0
    for o in range(model.n_observations):
        p_o = float(lik[model.obs_index == o].sum())
        if p_o <= 0.0:
            continue
        counter.tick()
        child = condition(model, pred, o, action=a)
        future += p_o * _policy_value(
            model, sigma_set, policy, child, policy_advance(policy, model, mem, a, o), n - 1, counter
        )
    return v + model.gamma * future


def oracle_policy_value(
    model: CausalPOMDP,
    sigma: DomainSpec | None,
    policy: PolicySpec,
    b0,
    horizon: int,
    config: OracleConfig | None = None,
) -> float:
    """Value of a fixed policy from state distribution ``b0`` under the known domain ``sigma``."""
    config = config or OracleConfig(max_nodes=node_budget())
    sigma_set = DomainSet([sigma or base_domain()])
    b0 = np.asarray(b0, dtype=float)
    b = product_belief(b0, [1.0])
    return _policy_value(
        model, sigma_set, policy, b, policy_start(policy, model, b0), horizon,
        _Counter(config.max_nodes),
    )
