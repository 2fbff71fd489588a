"""Random desk-scale models for property and acceptance tests."""

from __future__ import annotations

import math

import numpy as np

from causal_pomdp.interventions import DomainSet, DomainSpec
from causal_pomdp.model import CausalPOMDP, VariableSpec

SHAPES = [(2,), (3,), (4,), (2, 2), (2, 3), (3, 2), (2, 4), (4, 2), (2, 2, 2), (8,)]


def random_model(rng: np.random.Generator, n_actions: int | None = None, max_obs: int = 3) -> CausalPOMDP:
    sizes = SHAPES[rng.integers(len(SHAPES))]
    names = [f"V{i}" for i in range(len(sizes))]
    variables = [VariableSpec(n, tuple(f"{n}_{k}" for k in range(m))) for n, m in zip(names, sizes)]
    n_actions = n_actions or int(rng.integers(1, 4))
    actions = [f"a{i}" for i in range(n_actions)]

    parents, transition = {}, {}
    for i, v in enumerate(variables):
        prev = [n for n in names if rng.random() < 0.5]
        curr = [n for n in names[:i] if rng.random() < 0.5]
        parents[v.name] = (prev, curr)
        rows = math.prod(sizes[names.index(p)] for p in prev + curr)
        transition[v.name] = {}
        for a in actions:
            t = rng.dirichlet(np.full(v.size, 0.7), rows)
            transition[v.name][a] = t

    candidates = [[]] + [[n] for n, m in zip(names, sizes) if m <= max_obs]
    observables = candidates[rng.integers(len(candidates))]
    if len(candidates) > 1 and not observables and rng.random() < 0.7:
        observables = candidates[1 + rng.integers(len(candidates) - 1)]

    reward_vars = [n for n in names if rng.random() < 0.6] or [names[0]]
    n_r = math.prod(sizes[names.index(n)] for n in reward_vars)
    reward = {a: rng.uniform(-10, 10, n_r).round(3) for a in actions}
    gamma = float(rng.uniform(0.5, 0.99))
    return CausalPOMDP(variables, actions, parents, transition, reward_vars, reward, observables, gamma)


def random_domains(rng: np.random.Generator, model: CausalPOMDP, n: int | None = None) -> DomainSet:
    n = n or int(rng.integers(1, 4))
    out = [DomainSpec("base", {})]
    for k in range(1, n):
        shifted = [v for v in model.variables if rng.random() < 0.6] or [model.variables[-1]]
        out.append(
            DomainSpec(f"d{k}", {v.name: rng.dirichlet(np.ones(v.size), v.size) for v in shifted})
        )
    return DomainSet(out)
