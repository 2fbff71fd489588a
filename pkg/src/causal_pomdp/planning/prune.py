"""Dominance pruning for sets of alpha vectors.

All functions take a ``(K, D)`` array of flattened vectors and return the
indices of the rows to keep, in ascending order.  The upper envelope
``b -> max_k V[k] @ b`` over the probability simplex is preserved:
exactly by :func:`pointwise_keep`, and up to ``eps`` by :func:`lp_keep`.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

_BLOCK = 256
_HIGHS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


def unique_keep(V: np.ndarray) -> np.ndarray:
    """First occurrence of every distinct row."""
    if len(V) == 0:
        return np.zeros(0, dtype=int)
    _, first = np.unique(V, axis=0, return_index=True)
    return np.sort(first)


def pointwise_keep(V: np.ndarray) -> np.ndarray:
    """Drop exact duplicates (keeping the first) and pointwise-dominated rows.

    Row i is dominated if some row j satisfies ``V[j] >= V[i]`` everywhere
    and ``V[j] > V[i]`` somewhere.
    """
    idx = unique_keep(V)
    U = V[idx]
    k = len(U)
    dominated = np.zeros(k, dtype=bool)
    for lo in range(0, k, _BLOCK):
        blk = U[lo : lo + _BLOCK]  # candidates i
        ge = np.all(U[None, :, :] >= blk[:, None, :], axis=2)  # ge[i, j]: U[j] >= U[i]
        gt = np.any(U[None, :, :] > blk[:, None, :], axis=2)
        dominated[lo : lo + _BLOCK] = np.any(ge & gt, axis=1)
    return idx[~dominated]


def _best_at(V: np.ndarray, cand: np.ndarray, b: np.ndarray) -> int:
    """Member of ``cand`` maximizing ``V @ b``; ties go to the lexicographically largest row."""
    scores = V[cand] @ b
    top = cand[scores >= scores.max() - 1e-12 * max(1.0, abs(scores.max()))]
    if len(top) == 1:
        return int(top[0])
    order = np.lexsort(tuple(V[top].T[::-1]))
    return int(top[order[-1]])


def _winners(V: np.ndarray, P: np.ndarray) -> np.ndarray:
    """``_best_at(V, all, p)`` for every row ``p`` of ``P``, vectorized for the common no-tie case."""
    everyone = np.arange(len(V))
    out = np.empty(len(P), dtype=int)
    for lo in range(0, len(P), _BLOCK):
        S = P[lo : lo + _BLOCK] @ V.T
        best = S.max(axis=1)
        near = S >= (best - 1e-12 * np.maximum(1.0, np.abs(best)))[:, None]
        out[lo : lo + _BLOCK] = S.argmax(axis=1)
        for r in np.flatnonzero(near.sum(axis=1) > 1):
            out[lo + r] = _best_at(V, everyone, P[lo + r])
    return out


def _solve_witness_lp(v: np.ndarray, W: np.ndarray):
    """max delta s.t. (v - W[k]) @ b >= delta for all k, b on the simplex."""
    d = v.size
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.hstack([W - v, np.ones((len(W), 1))])
    A_eq = np.ones((1, d + 1))
    A_eq[0, -1] = 0.0
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=np.zeros(len(W)),
        A_eq=A_eq,
        b_eq=[1.0],
        bounds=[(0.0, None)] * d + [(None, None)],
        method="highs",
        options=_HIGHS,
    )
    if res.status != 0:
        return None
    b = np.clip(res.x[:d], 0.0, None)
    return float(res.x[-1]), b / b.sum()


def _witness(v: np.ndarray, W: np.ndarray, tol: float = -np.inf) -> tuple[float, np.ndarray]:
    """Solve max_{b in simplex} min_k (v - W[k]) @ b; return (margin, b).

    Uses constraint generation: the LP starts from the rows of ``W`` that
    beat ``v`` hardest at the simplex corners and centre, and adds violated
    rows until the solution is feasible for all of ``W``.  A relaxed margin
    is an upper bound on the true one, so the search stops early once it
    drops to ``tol``; the returned margin is then that bound, not the optimum.
    """
    d = v.size
    diff = W - v  # diff[k] @ b > 0 means W[k] beats v at b
    seeds = np.vstack([np.eye(d), np.full((1, d), 1.0 / d)])
    active = np.zeros(len(W), dtype=bool)
    active[np.unique(np.argmax(seeds @ diff.T, axis=1))] = True
    while True:
        sol = _solve_witness_lp(v, W[active])
        if sol is None:
            # Fall back to keeping the vector: never lose a useful one.
            return np.inf, np.full(d, 1.0 / d)
        delta, b = sol
        if delta <= tol:
            return delta, b
        slack = -(diff @ b)  # true margin against each row
        worst = slack.min()
        if worst >= delta - 1e-12 * max(1.0, abs(delta)):
            return float(worst), b
        viol = np.flatnonzero((slack < delta) & ~active)
        if len(viol) == 0:
            return float(worst), b
        pick = viol[np.argsort(slack[viol])[: max(d, 8)]]
        active[pick] = True


def _probe_beliefs(d: int, n_random: int = 64) -> np.ndarray:
    rng = np.random.default_rng(0x5EED)
    return np.vstack([np.eye(d), np.full((1, d), 1.0 / d), rng.dirichlet(np.ones(d), n_random)])


def lp_filter(V: np.ndarray, eps: float = 1e-10, probes: np.ndarray | None = None):
    """Lark's filter: keep the rows that are strictly best somewhere on the simplex.

    A row whose best margin over the kept rows is at most ``eps`` (scaled by
    the magnitude of the table) is dropped.  Rows that win at one of the
    probe beliefs (simplex corners, the centre, fixed random points and any
    extra ``probes``) are kept without solving an LP.

    Returns ``(keep, witnesses)``: ascending row indices and, for each kept
    row, a belief at which it is maximal.
    """
    idx = pointwise_keep(V)
    d = V.shape[1]
    if len(idx) <= 1:
        return idx, np.full((len(idx), d), 1.0 / d)
    U = V[idx]
    tol = eps * max(1.0, float(np.abs(U).max()))
    P = _probe_beliefs(d)
    if probes is not None and len(probes):
        P = np.vstack([P, probes])
    found: dict[int, np.ndarray] = {}
    for j, b in zip(_winners(U, P), P):
        found.setdefault(int(j), b)
    kept = list(found)
    remaining = [i for i in range(len(U)) if i not in found]
    while remaining:
        i = remaining.pop()
        margin, b = _witness(U[i], U[kept], tol)
        if margin <= tol:
            continue
        # confirm the witness directly so solver slack cannot admit junk
        direct = U[i] @ b - np.max(U[kept] @ b)
        if direct <= tol:
            continue
        cand = np.array(remaining + [i])
        j = _best_at(U, cand, b)
        kept.append(j)
        found[j] = b
        if j != i:
            remaining.remove(j)
            remaining.append(i)
    order = np.sort(np.array(kept))
    return idx[order], np.array([found[int(k)] for k in order])


def lp_keep(V: np.ndarray, eps: float = 1e-10) -> np.ndarray:
    """Indices kept by :func:`lp_filter`."""
    return lp_filter(V, eps)[0]


def prune_indices(V: np.ndarray, mode: str = "lp") -> np.ndarray:
    if mode == "lp":
        return lp_keep(V)
    if mode == "pointwise":
        return pointwise_keep(V)
    if mode == "none":
        return unique_keep(V)
    raise ValueError(f"unknown prune mode {mode!r}")
