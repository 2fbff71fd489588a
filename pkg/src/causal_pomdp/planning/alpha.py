"""Alpha-function value iteration over the joint (state, domain) belief.

Each alpha function is a table ``alpha[s, d]``; the horizon-n value is

    V_n(b) = max_i sum_{s, d} alpha_i[s, d] * b[s, d].

Horizon 0 means a single action.  A backup builds, for every action ``a``
and observation ``o``, the projections

    g[j](s, d) = sum_{s'} O(s', o) * T_d(s, a, s') * prev_j(s', d)

and combines one projection per observation:
``alpha = R(., a) + gamma * sum_o g_o``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..belief import JointBelief, domain_kernels
from ..errors import ShapeError
from ..interventions import DomainSet, as_domain_set
from ..model import CausalPOMDP
from .prune import lp_filter, pointwise_keep, prune_indices


@dataclass(frozen=True, eq=False)
class AlphaFunction:
    values: np.ndarray  # (n_states, n_domains)
    action: int
    successors: tuple[int, ...] | None = None  # per observation index, into stage n-1


class AlphaSet:
    """Stage-n alpha functions in canonical order.

    Canonical order sorts by the flattened value table (lexicographically),
    breaking ties by action index.  No two members share a value table.
    """

    def __init__(
        self,
        stage: int,
        values: np.ndarray,
        actions: Sequence[int],
        successors: np.ndarray | None = None,
        action_labels: Sequence[str] = (),
        domain_names: Sequence[str] = (),
        canonical: bool = False,
    ):
        values = np.asarray(values, dtype=float)
        if values.ndim != 3 or len(values) == 0:
            raise ShapeError(f"alpha values must be a non-empty (K, S, D) array, got {values.shape}")
        actions = np.asarray(actions, dtype=int)
        if successors is not None:
            successors = np.asarray(successors, dtype=int)
        if not canonical:
            order = canonical_order(values, actions)
            values, actions = values[order], actions[order]
            successors = None if successors is None else successors[order]
            flat = values.reshape(len(values), -1)
            keep = np.ones(len(values), dtype=bool)
            keep[1:] = np.any(flat[1:] != flat[:-1], axis=1)
            values, actions = values[keep], actions[keep]
            successors = None if successors is None else successors[keep]
        for arr in (values, actions) + (() if successors is None else (successors,)):
            arr.setflags(write=False)
        self.stage = int(stage)
        self.values = values
        self.actions = actions
        self.successors = successors
        self.action_labels = tuple(action_labels)
        self.domain_names = tuple(domain_names)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape[1:]

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(len(self.values), -1)

    @property
    def alphas(self) -> list[AlphaFunction]:
        return [
            AlphaFunction(
                self.values[i],
                int(self.actions[i]),
                None if self.successors is None else tuple(int(x) for x in self.successors[i]),
            )
            for i in range(len(self))
        ]

    def subset(self, keep: np.ndarray) -> "AlphaSet":
        keep = np.sort(np.asarray(keep, dtype=int))
        return AlphaSet(
            self.stage,
            self.values[keep],
            self.actions[keep],
            None if self.successors is None else self.successors[keep],
            self.action_labels,
            self.domain_names,
            canonical=True,
        )

    def scaled(self, factor: float) -> "AlphaSet":
        return AlphaSet(
            self.stage, self.values * factor, self.actions, self.successors,
            self.action_labels, self.domain_names,
        )

    def identical(self, other: "AlphaSet") -> bool:
        """Bit-identical tables, actions and successor links."""
        same_succ = (self.successors is None and other.successors is None) or (
            self.successors is not None
            and other.successors is not None
            and np.array_equal(self.successors, other.successors)
        )
        return (
            self.stage == other.stage
            and self.values.shape == other.values.shape
            and self.values.tobytes() == other.values.tobytes()
            and np.array_equal(self.actions, other.actions)
            and same_succ
        )

    def __repr__(self):
        return f"AlphaSet(stage={self.stage}, size={len(self)}, shape={self.shape})"


def canonical_order(values: np.ndarray, actions: np.ndarray) -> np.ndarray:
    flat = values.reshape(len(values), -1)
    keys = (actions,) + tuple(flat.T[::-1])
    return np.lexsort(keys)


def initial_alpha_set(model: CausalPOMDP, domains) -> AlphaSet:
    """Stage 0: one alpha per action, ``alpha(s, d) = R(s, a)`` for every domain."""
    domains = as_domain_set(domains)
    R = model.reward_matrix  # (S, A)
    values = np.repeat(R.T[:, :, None], len(domains), axis=2)
    return AlphaSet(
        0, values, np.arange(model.n_actions),
        successors=np.zeros((model.n_actions, 0), dtype=int),
        action_labels=model.actions, domain_names=domains.names,
    )


def _prune_set(values: np.ndarray, mode: str, probes=None):
    """Indices to keep, plus witness beliefs when ``mode == "lp"`` (else None)."""
    flat = values.reshape(len(values), -1)
    if mode == "lp":
        return lp_filter(flat, probes=probes)
    return prune_indices(flat, mode), None


def _stack(*parts):
    parts = [p for p in parts if p is not None and len(p)]
    return np.vstack(parts) if parts else None


def projections(model: CausalPOMDP, domains: DomainSet, prev: AlphaSet) -> np.ndarray:
    """Undiscounted projections, shape ``(A, O, J, S, D)``."""
    K = domain_kernels(model, domains)  # (D, A, S, S')
    return np.einsum("dast,ot,jtd->aojsd", K, model.obs_mask, prev.values, optimize=True)


def backup(model: CausalPOMDP, domains, prev: AlphaSet, prune: str = "lp") -> AlphaSet:
    """One exact backup: stage ``prev.stage + 1`` from stage ``prev.stage``.

    The cross-sum over observations is built incrementally and pruned after
    every observation; ``prune`` selects ``"lp"`` (exact envelope),
    ``"pointwise"`` or ``"none"`` (duplicates only).
    """
    domains = as_domain_set(domains)
    if prev.shape != (model.n_states, len(domains)):
        raise ShapeError(f"previous stage has shape {prev.shape}, expected ({model.n_states}, {len(domains)})")
    G = projections(model, domains, prev)
    n_obs = model.n_observations
    S, D = prev.shape
    all_vals, all_actions, all_succ, all_wit = [], [], [], []
    for a in range(model.n_actions):
        acc = np.zeros((1, S, D))
        succ = np.zeros((1, 0), dtype=int)
        acc_wit = None
        for o in range(n_obs):
            g = G[a, o]
            gk, g_wit = _prune_set(g, prune)
            g = g[gk]
            acc = (acc[:, None] + g[None, :]).reshape(-1, S, D)
            succ = np.hstack([np.repeat(succ, len(gk), axis=0), np.tile(gk, len(succ))[:, None]])
            # A belief where one summand is maximal is a good place to look for a maximal sum.
            keep, acc_wit = _prune_set(acc, prune, probes=_stack(acc_wit, g_wit))
            acc, succ = acc[keep], succ[keep]
        vals = model.reward_matrix[:, a][None, :, None] + model.gamma * acc
        all_vals.append(vals)
        all_actions.append(np.full(len(vals), a))
        all_succ.append(succ)
        all_wit.append(acc_wit)
    values = np.concatenate(all_vals)
    actions = np.concatenate(all_actions)
    succ = np.concatenate(all_succ)
    out = AlphaSet(
        prev.stage + 1, values, actions, succ,
        action_labels=model.actions, domain_names=domains.names,
    )
    keep, _ = _prune_set(out.values, prune, probes=_stack(*all_wit))
    return out.subset(keep)


def plan(model: CausalPOMDP, domains, horizon: int, prune: str = "lp") -> list[AlphaSet]:
    """Alpha sets for stages 0..horizon."""
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    domains = as_domain_set(domains)
    stages = [initial_alpha_set(model, domains)]
    for _ in range(horizon):
        stages.append(backup(model, domains, stages[-1], prune=prune))
    return stages


def prune_pointwise(alphas: AlphaSet) -> AlphaSet:
    return alphas.subset(pointwise_keep(alphas.flat))


def prune_lp(alphas: AlphaSet) -> AlphaSet:
    return alphas.subset(prune_indices(alphas.flat, "lp"))


def _table(b) -> np.ndarray:
    return b.table if isinstance(b, JointBelief) else np.asarray(b, dtype=float)


def value_at(alphas: AlphaSet, b) -> tuple[float, int]:
    """``(max_i <alpha_i, b>, argmax)``; ties resolve to the earliest canonical alpha."""
    t = _table(b)
    if t.shape != alphas.shape:
        raise ShapeError(f"belief shape {t.shape} != alpha shape {alphas.shape}")
    scores = alphas.flat @ t.ravel()
    i = int(np.argmax(scores))
    return float(scores[i]), i


def values_at(alphas: AlphaSet, beliefs: np.ndarray) -> np.ndarray:
    """Vectorized value over a stack of beliefs of shape ``(N, S, D)``."""
    B = np.asarray(beliefs, dtype=float).reshape(len(beliefs), -1)
    return (B @ alphas.flat.T).max(axis=1)


def greedy_action(alphas: AlphaSet, b) -> str | int:
    """Action of the maximizing alpha (label when the set carries labels)."""
    _, i = value_at(alphas, b)
    a = int(alphas.actions[i])
    return alphas.action_labels[a] if alphas.action_labels else a
