"""Factored causal POMDP: definition, loading, validation, primitives.

States are full assignments of the declared variables, enumerated in
row-major order (the last declared variable varies fastest).  The same
index is used for CPT parent assignments, belief vectors and alpha tables.

Each CPT is stored as an array of shape ``(n_parent_assignments, |dom(V)|)``.
The parent list of a variable is ``prev + curr``: previous-slice parents
followed by next-slice parents, which must be declared earlier.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ModelParseError, ModelValidationError
from .interventions import (
    ARITH_TOL,
    DomainSet,
    DomainSpec,
    base_domain,
    shifted_cpt,
)

log = logging.getLogger(__name__)

CPT_TOL = 1e-9
# Rows closer to 1 than this are float noise from decimal input and are kept bit-exact.
_EXACT_TOL = 1e-12


@dataclass(frozen=True)
class VariableSpec:
    name: str
    values: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    @property
    def size(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Finding:
    """One violated invariant in a validation report."""

    path: str
    rule: str
    detail: str

    def to_dict(self) -> dict:
        return {"path": self.path, "rule": self.rule, "detail": self.detail}


class CausalPOMDP:
    """A factored POMDP whose transition factors follow a two-slice causal graph.

    Instances are treated as immutable; derived arrays are computed lazily
    and cached.  Use :func:`validate_model` (or :func:`load_model`, which
    calls it) before relying on the derived arrays.
    """

    def __init__(
        self,
        variables: Sequence[VariableSpec],
        actions: Sequence[str],
        parents: Mapping[str, tuple[Sequence[str], Sequence[str]]],
        transition: Mapping[str, Mapping[str, np.ndarray]],
        reward_vars: Sequence[str],
        reward_table: Mapping[str, Sequence[float]],
        observables: Sequence[str],
        gamma: float,
        domains: Iterable = (),
        adjustments: Sequence[str] = (),
    ):
        self.variables = tuple(variables)
        self.actions = tuple(actions)
        self.parents = {
            v.name: (tuple(parents.get(v.name, ((), ()))[0]), tuple(parents.get(v.name, ((), ()))[1]))
            for v in self.variables
        }
        for extra in set(parents) - set(self.parents):
            self.parents[extra] = (tuple(parents[extra][0]), tuple(parents[extra][1]))
        self.transition = {
            var: {a: _readonly(t) for a, t in per_action.items()}
            for var, per_action in transition.items()
        }
        self.reward_vars = tuple(reward_vars)
        self.reward_table = {a: _readonly(r) for a, r in reward_table.items()}
        self.observables = tuple(observables)
        self.gamma = float(gamma)
        docs = []
        for d in domains:
            if isinstance(d, DomainSpec):
                docs.append((d.name, {k: np.array(m, dtype=float) for k, m in d.shifts.items()}))
            else:
                name, shifts = d
                docs.append((name, {k: np.array(m, dtype=float) for k, m in shifts.items()}))
        self.domain_docs = tuple(docs)
        self.adjustments = tuple(adjustments)
        self._kernel_cache: dict = {}
        self._cpt_cache: dict = {}

    # -- structure ---------------------------------------------------------

    @cached_property
    def var_index(self) -> dict[str, int]:
        return {v.name: i for i, v in enumerate(self.variables)}

    @cached_property
    def sizes(self) -> tuple[int, ...]:
        return tuple(v.size for v in self.variables)

    @cached_property
    def n_states(self) -> int:
        return math.prod(self.sizes)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @cached_property
    def action_index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.actions)}

    @cached_property
    def state_values(self) -> np.ndarray:
        """``(n_states, n_vars)`` array of value indices, row-major."""
        grids = np.indices(self.sizes).reshape(len(self.sizes), -1).T
        grids.setflags(write=False)
        return grids

    @cached_property
    def _strides(self) -> np.ndarray:
        return _row_major_strides(self.sizes)

    def state_index(self, state) -> int:
        """Index of a state given as labels (tuple or dict) or value indices."""
        idx = self._value_indices(state)
        return int(np.dot(idx, self._strides))

    def state_of(self, index: int) -> tuple[str, ...]:
        vals = self.state_values[index]
        return tuple(v.values[k] for v, k in zip(self.variables, vals))

    def _value_indices(self, state) -> list[int]:
        if isinstance(state, Mapping):
            state = [state[v.name] for v in self.variables]
        if len(state) != len(self.variables):
            raise KeyError(f"state {state!r} does not assign all {len(self.variables)} variables")
        out = []
        for v, x in zip(self.variables, state):
            if isinstance(x, (int, np.integer)) and not isinstance(x, bool) and x not in v.values:
                out.append(int(x))
            else:
                try:
                    out.append(v.values.index(x))
                except ValueError:
                    raise KeyError(f"{x!r} is not a value of {v.name}") from None
        return out

    def parent_list(self, var: str) -> tuple[str, ...]:
        prev, curr = self.parents[var]
        return prev + curr

    # -- observations ------------------------------------------------------

    @cached_property
    def obs_var_indices(self) -> tuple[int, ...]:
        return tuple(self.var_index[o] for o in self.observables)

    @cached_property
    def observations(self) -> tuple[tuple[str, ...], ...]:
        """All observation symbols, row-major over the observable domains."""
        doms = [self.variables[i].values for i in self.obs_var_indices]
        return tuple(product(*doms))

    @property
    def n_observations(self) -> int:
        return len(self.observations)

    @cached_property
    def obs_index(self) -> np.ndarray:
        """Observation index emitted by each state."""
        sizes = [self.sizes[i] for i in self.obs_var_indices]
        strides = _row_major_strides(sizes)
        cols = self.state_values[:, list(self.obs_var_indices)]
        out = (cols @ strides).astype(int) if sizes else np.zeros(self.n_states, dtype=int)
        out.setflags(write=False)
        return out

    @cached_property
    def obs_mask(self) -> np.ndarray:
        """``(n_observations, n_states)`` 0/1 matrix O(s', o)."""
        m = np.zeros((self.n_observations, self.n_states))
        m[self.obs_index, np.arange(self.n_states)] = 1.0
        m.setflags(write=False)
        return m

    def observation_index(self, obs) -> int:
        """Index of an observation given as a tuple of labels or a {var: value} dict."""
        if isinstance(obs, Mapping):
            missing = [o for o in self.observables if o not in obs]
            if missing or len(obs) != len(self.observables):
                raise KeyError(f"observation {dict(obs)!r} must assign exactly {list(self.observables)}")
            obs = tuple(obs[o] for o in self.observables)
        obs = tuple(obs)
        try:
            return self.observations.index(obs)
        except ValueError:
            raise KeyError(f"{obs!r} is not an observation of this model") from None

    def observation_key(self, o: int) -> str:
        """Stable text key, e.g. ``"Z=hl"`` (``""`` when nothing is observable)."""
        return ",".join(f"{n}={v}" for n, v in zip(self.observables, self.observations[o]))

    def parse_observation_key(self, key: str) -> int:
        key = key.strip()
        if not key:
            return self.observation_index(())
        if "=" not in key and len(self.observables) == 1:
            return self.observation_index((key,))
        pairs = dict(p.split("=", 1) for p in key.split(","))
        return self.observation_index({k.strip(): v.strip() for k, v in pairs.items()})

    # -- reward ------------------------------------------------------------

    @cached_property
    def reward_matrix(self) -> np.ndarray:
        """``(n_states, n_actions)`` array of R(s, a)."""
        cols = [self.var_index[v] for v in self.reward_vars]
        strides = _row_major_strides([self.sizes[i] for i in cols])
        ridx = (self.state_values[:, cols] @ strides).astype(int) if cols else np.zeros(self.n_states, int)
        r = np.stack([np.asarray(self.reward_table[a])[ridx] for a in self.actions], axis=1)
        r.setflags(write=False)
        return r

    # -- transitions -------------------------------------------------------

    def shifted_cpts(self, domain: DomainSpec | None) -> dict[str, dict[str, np.ndarray]]:
        """Per-variable, per-action CPTs after applying ``domain``'s shifts."""
        domain = domain or base_domain()
        key = domain.key()
        if key not in self._cpt_cache:
            out = {}
            for v in self.variables:
                A = domain.shifts.get(v.name)
                out[v.name] = {
                    a: (t if A is None else shifted_cpt(t, A))
                    for a, t in self.transition[v.name].items()
                }
            self._cpt_cache[key] = out
        return self._cpt_cache[key]

    def kernel(self, domain: DomainSpec | None = None) -> np.ndarray:
        """Dense ``(n_actions, n_states, n_states)`` transition kernel under ``domain``."""
        domain = domain or base_domain()
        key = domain.key()
        cached = self._kernel_cache.get(key)
        if cached is not None:
            return cached
        cpts = self.shifted_cpts(domain)
        sv = self.state_values
        K = np.ones((self.n_actions, self.n_states, self.n_states))
        for i, v in enumerate(self.variables):
            prev, curr = self.parents[v.name]
            strides = _row_major_strides([self.sizes[self.var_index[p]] for p in prev + curr])
            pidx = np.zeros((self.n_states, self.n_states), dtype=int)
            for p, st in zip(prev, strides[: len(prev)]):
                pidx += sv[:, self.var_index[p]][:, None] * int(st)
            for p, st in zip(curr, strides[len(prev):]):
                pidx += sv[:, self.var_index[p]][None, :] * int(st)
            child = np.broadcast_to(sv[:, i][None, :], pidx.shape)
            for ai, a in enumerate(self.actions):
                K[ai] *= cpts[v.name][a][pidx, child]
        K.setflags(write=False)
        self._kernel_cache[key] = K
        return K

    # -- domains -----------------------------------------------------------

    def domain_set(self, names: Sequence[str] | str | None = None) -> DomainSet:
        """Resolve domain names declared in the model file.

        ``None`` or ``"all"`` returns every declared domain (or just the
        identity domain ``base`` when none are declared).  The name ``base``
        resolves to the identity domain unless the file defines it.
        """
        declared = [DomainSpec(n, s) for n, s in self.domain_docs]
        by_name = {d.name: d for d in declared}
        if names is None or names == "all" or list(names) == ["all"]:
            return DomainSet(declared or [base_domain()])
        if isinstance(names, str):
            names = [n.strip() for n in names.split(",") if n.strip()]
        out = []
        for n in names:
            if n in by_name:
                out.append(by_name[n])
            elif n == "base":
                out.append(base_domain())
            else:
                raise KeyError(f"unknown domain {n!r}; declared: {sorted(by_name)}")
        return DomainSet(out)

    # -- identity ----------------------------------------------------------

    def to_dict(self) -> dict:
        doc = {
            "variables": [{"name": v.name, "values": list(v.values)} for v in self.variables],
            "actions": list(self.actions),
            "parents": {
                var: {"prev": list(prev), "curr": list(curr)}
                for var, (prev, curr) in self.parents.items()
            },
            "transition": {
                var: {a: np.asarray(t).tolist() for a, t in per.items()}
                for var, per in self.transition.items()
            },
            "reward": {
                "vars": list(self.reward_vars),
                "table": {a: np.asarray(r).tolist() for a, r in self.reward_table.items()},
            },
            "observables": list(self.observables),
            "gamma": self.gamma,
        }
        if self.domain_docs:
            doc["domains"] = [
                {"name": n, "shifts": {k: m.tolist() for k, m in s.items()}}
                for n, s in self.domain_docs
            ]
        return doc

    def content_hash(self) -> str:
        return hashlib.sha256(render_model(self).encode()).hexdigest()

    def __eq__(self, other):
        if not isinstance(other, CausalPOMDP):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        return (
            f"CausalPOMDP(variables={[v.name for v in self.variables]}, "
            f"actions={list(self.actions)}, |S|={self.n_states}, gamma={self.gamma})"
        )


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _row_major_strides(sizes) -> np.ndarray:
    sizes = list(sizes)
    strides = np.ones(len(sizes), dtype=int)
    for k in range(len(sizes) - 2, -1, -1):
        strides[k] = strides[k + 1] * sizes[k + 1]
    return strides


# ---------------------------------------------------------------------------
# Primitives
# ---------------------------------------------------------------------------


def enumerate_states(model: CausalPOMDP) -> list[tuple[str, ...]]:
    return [model.state_of(i) for i in range(model.n_states)]


def transition_prob(model: CausalPOMDP, s, a: str, s2, d: DomainSpec | None = None) -> float:
    """Product of the (shifted) CPT factors, evaluated in declared variable order."""
    if a not in model.action_index:
        raise KeyError(f"unknown action {a!r}")
    cpts = model.shifted_cpts(d)
    x = model._value_indices(s)
    y = model._value_indices(s2)
    p = 1.0
    for i, v in enumerate(model.variables):
        prev, curr = model.parents[v.name]
        row = 0
        for name in prev:
            j = model.var_index[name]
            row = row * model.sizes[j] + x[j]
        for name in curr:
            j = model.var_index[name]
            row = row * model.sizes[j] + y[j]
        p *= float(cpts[v.name][a][row, y[i]])
    return p


def observe(model: CausalPOMDP, s2) -> tuple[str, ...]:
    x = model._value_indices(s2)
    return tuple(model.variables[i].values[x[i]] for i in model.obs_var_indices)


def reward(model: CausalPOMDP, s, a: str) -> float:
    return float(model.reward_matrix[model.state_index(s), model.action_index[a]])


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate_model(model: CausalPOMDP) -> list[Finding]:
    """Every violated invariant, in document order.  Empty iff the model is valid."""
    out: list[Finding] = []
    add = lambda path, rule, detail: out.append(Finding(path, rule, detail))  # noqa: E731

    names = [v.name for v in model.variables]
    if not names:
        add("variables", "non-empty", "at least one state variable is required")
    for i, v in enumerate(model.variables):
        if not v.values:
            add(f"variables[{i}].values", "non-empty", f"variable {v.name!r} has no values")
        if len(set(v.values)) != len(v.values):
            add(f"variables[{i}].values", "unique", f"duplicate value labels in {v.name!r}")
    dup = sorted({n for n in names if names.count(n) > 1})
    if dup:
        add("variables", "unique", f"duplicate variable names {dup}")
    if not model.actions:
        add("actions", "non-empty", "at least one action is required")
    if len(set(model.actions)) != len(model.actions):
        add("actions", "unique", "duplicate action labels")
    if not (0.0 <= model.gamma < 1.0) or not math.isfinite(model.gamma):
        add("gamma", "range", f"discount must lie in [0, 1), got {model.gamma!r}")

    known = {v.name: v for v in model.variables}
    order = {n: i for i, n in enumerate(names)}

    parents_ok: dict[str, bool] = {}
    for var, (prev, curr) in model.parents.items():
        ok = True
        if var not in known:
            add(f"parents.{var}", "reference", f"unknown variable {var!r}")
            continue
        for k, p in enumerate(prev):
            if p not in known:
                add(f"parents.{var}.prev[{k}]", "reference", f"unknown parent {p!r}")
                ok = False
        for k, p in enumerate(curr):
            if p not in known:
                add(f"parents.{var}.curr[{k}]", "reference", f"unknown parent {p!r}")
                ok = False
            elif order[p] >= order[var]:
                add(
                    f"parents.{var}.curr[{k}]",
                    "ordering",
                    f"next-slice parent {p!r} of {var!r} must be declared before it",
                )
                ok = False
        if len(set(prev)) != len(prev) or len(set(curr)) != len(curr):
            add(f"parents.{var}", "unique", "a parent is listed twice")
            ok = False
        parents_ok[var] = ok

    for var in model.transition:
        if var not in known:
            add(f"transition.{var}", "reference", f"unknown variable {var!r}")
    for v in model.variables:
        per = model.transition.get(v.name)
        if per is None:
            add(f"transition.{v.name}", "coverage", "missing CPTs for variable")
            continue
        for a in per:
            if a not in model.actions:
                add(f"transition.{v.name}.{a}", "reference", f"unknown action {a!r}")
        n_rows = None
        if parents_ok.get(v.name, False):
            n_rows = math.prod(known[p].size for p in model.parent_list(v.name))
        for a in model.actions:
            t = per.get(a)
            path = f"transition.{v.name}.{a}"
            if t is None:
                add(path, "coverage", f"missing CPT for action {a!r}")
                continue
            if t.ndim != 2 or t.shape[1] != v.size or (n_rows is not None and t.shape[0] != n_rows):
                want = f"({n_rows if n_rows is not None else '?'}, {v.size})"
                add(path, "shape", f"CPT shape {t.shape} != {want}")
                continue
            if not np.all(np.isfinite(t)) or np.any(t < 0):
                add(path, "range", "CPT entries must be finite and non-negative")
            sums = t.sum(axis=1)
            for row in np.flatnonzero(np.abs(sums - 1.0) > CPT_TOL):
                add(
                    f"{path}[{int(row)}]",
                    "normalization",
                    f"column for variable {v.name!r}, action {a!r}, parent assignment "
                    f"{int(row)} sums to {sums[row]!r}",
                )

    rv_ok = True
    for k, rv in enumerate(model.reward_vars):
        if rv not in known:
            add(f"reward.vars[{k}]", "reference", f"unknown variable {rv!r}")
            rv_ok = False
    n_r = math.prod(known[r].size for r in model.reward_vars) if rv_ok else None
    for a in model.reward_table:
        if a not in model.actions:
            add(f"reward.table.{a}", "reference", f"unknown action {a!r}")
    for a in model.actions:
        r = model.reward_table.get(a)
        if r is None:
            add(f"reward.table.{a}", "coverage", f"missing reward row for action {a!r}")
            continue
        if r.ndim != 1 or (n_r is not None and r.size != n_r):
            add(f"reward.table.{a}", "shape", f"expected {n_r} entries, got shape {r.shape}")
        elif not np.all(np.isfinite(r)):
            add(f"reward.table.{a}", "range", "reward entries must be finite")

    for k, o in enumerate(model.observables):
        if o not in known:
            add(
                f"observables[{k}]",
                "assumption-1",
                f"observable {o!r} is not a declared state variable",
            )
    if len(set(model.observables)) != len(model.observables):
        add("observables", "unique", "an observable is listed twice")

    dnames = [n for n, _ in model.domain_docs]
    if len(set(dnames)) != len(dnames):
        add("domains", "unique", "duplicate domain names")
    for di, (dname, shifts) in enumerate(model.domain_docs):
        for var, m in shifts.items():
            path = f"domains[{di}].shifts.{var}"
            if var not in known:
                add(path, "reference", f"unknown variable {var!r} in domain {dname!r}")
                continue
            size = known[var].size
            if m.shape != (size, size):
                add(path, "shape", f"shift matrix shape {m.shape} != ({size}, {size})")
                continue
            if not np.all(np.isfinite(m)) or np.any(m < 0) or np.any(m > 1):
                add(path, "range", "shift entries must lie in [0, 1]")
            rows = m.sum(axis=1)
            for row in np.flatnonzero(np.abs(rows - 1.0) > 1e-12):
                add(f"{path}[{int(row)}]", "normalization", f"row sums to {rows[row]!r}")
    return out


# ---------------------------------------------------------------------------
# Parsing and rendering
# ---------------------------------------------------------------------------


def _need(doc, key, kind, path):
    if not isinstance(doc, dict) or key not in doc:
        raise ModelParseError(f"{path}{key}" if path else key, "required key is missing")
    val = doc[key]
    if not isinstance(val, kind):
        raise ModelParseError(
            f"{path}{key}" if path else key, f"expected {_kind_name(kind)}, got {type(val).__name__}"
        )
    return val


def _kind_name(kind) -> str:
    if isinstance(kind, tuple):
        return " or ".join(k.__name__ for k in kind)
    return kind.__name__


def _str_list(val, path) -> list[str]:
    if not isinstance(val, list) or not all(isinstance(x, str) for x in val):
        raise ModelParseError(path, "expected a list of strings")
    return list(val)


def _number(x, path) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ModelParseError(path, f"expected a number, got {x!r}")
    return float(x)


def _matrix(val, path) -> np.ndarray:
    if not isinstance(val, list) or not val or not all(isinstance(r, list) for r in val):
        raise ModelParseError(path, "expected a non-empty list of rows")
    width = len(val[0])
    rows = []
    for i, r in enumerate(val):
        if len(r) != width:
            raise ModelParseError(f"{path}[{i}]", f"row length {len(r)} != {width}")
        rows.append([_number(x, f"{path}[{i}][{j}]") for j, x in enumerate(r)])
    return np.array(rows, dtype=float)


def parse_model(doc: dict) -> CausalPOMDP:
    """Build a model from a decoded JSON document without semantic checks.

    Raises :class:`ModelParseError` for structural schema violations.
    CPT rows within ``CPT_TOL`` of 1 are renormalized and recorded in
    ``model.adjustments``.
    """
    if not isinstance(doc, dict):
        raise ModelParseError("$", "model document must be a JSON object")
    raw_vars = _need(doc, "variables", list, "")
    variables = []
    for i, rv in enumerate(raw_vars):
        name = _need(rv, "name", str, f"variables[{i}].")
        values = _str_list(_need(rv, "values", list, f"variables[{i}]."), f"variables[{i}].values")
        variables.append(VariableSpec(name, tuple(values)))
    actions = _str_list(_need(doc, "actions", list, ""), "actions")

    parents = {}
    for var, entry in _need(doc, "parents", dict, "").items():
        if not isinstance(entry, dict):
            raise ModelParseError(f"parents.{var}", "expected an object with 'prev'/'curr'")
        unknown = set(entry) - {"prev", "curr"}
        if unknown:
            raise ModelParseError(f"parents.{var}.{sorted(unknown)[0]}", "unexpected key")
        parents[var] = (
            _str_list(entry.get("prev", []), f"parents.{var}.prev"),
            _str_list(entry.get("curr", []), f"parents.{var}.curr"),
        )

    adjustments = []
    transition = {}
    for var, per in _need(doc, "transition", dict, "").items():
        if not isinstance(per, dict):
            raise ModelParseError(f"transition.{var}", "expected an object keyed by action")
        transition[var] = {}
        for a, table in per.items():
            path = f"transition.{var}.{a}"
            t = _matrix(table, path)
            sums = t.sum(axis=1)
            fix = (np.abs(sums - 1.0) > _EXACT_TOL) & (np.abs(sums - 1.0) <= CPT_TOL) & (sums > 0)
            if np.any(fix):
                t[fix] /= sums[fix, None]
                for row in np.flatnonzero(fix):
                    msg = f"{path}[{int(row)}]: renormalized from sum {sums[row]!r}"
                    adjustments.append(msg)
                    log.info(msg)
            transition[var][a] = t

    rdoc = _need(doc, "reward", dict, "")
    reward_vars = _str_list(_need(rdoc, "vars", list, "reward."), "reward.vars")
    table = {}
    for a, row in _need(rdoc, "table", dict, "reward.").items():
        if not isinstance(row, list):
            raise ModelParseError(f"reward.table.{a}", "expected a list of numbers")
        table[a] = np.array([_number(x, f"reward.table.{a}[{j}]") for j, x in enumerate(row)])

    observables = _str_list(_need(doc, "observables", list, ""), "observables")
    gamma = _number(_need(doc, "gamma", (int, float), ""), "gamma")

    domains = []
    raw_domains = doc.get("domains", [])
    if not isinstance(raw_domains, list):
        raise ModelParseError("domains", "expected a list")
    for i, d in enumerate(raw_domains):
        name = _need(d, "name", str, f"domains[{i}].")
        shifts = _need(d, "shifts", dict, f"domains[{i}].")
        domains.append(
            (name, {var: _matrix(m, f"domains[{i}].shifts.{var}") for var, m in shifts.items()})
        )

    extra = set(doc) - {
        "variables", "actions", "parents", "transition", "reward", "observables", "gamma", "domains",
    }
    if extra:
        raise ModelParseError(sorted(extra)[0], "unexpected top-level key")

    return CausalPOMDP(
        variables, actions, parents, transition, reward_vars, table, observables, gamma,
        domains=domains, adjustments=adjustments,
    )


def load_model(text: str | bytes | dict) -> CausalPOMDP:
    """Parse and validate a model document (JSON text or an already-decoded dict)."""
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ModelParseError("$", f"invalid JSON: {e}") from None
    else:
        doc = text
    model = parse_model(doc)
    findings = validate_model(model)
    if findings:
        raise ModelValidationError(findings)
    return model


def load_model_file(path) -> CausalPOMDP:
    with open(path, "r", encoding="utf-8") as fh:
        return load_model(fh.read())


def render_model(model: CausalPOMDP) -> str:
    return json.dumps(model.to_dict(), indent=2)


def check_kernel(model: CausalPOMDP, domain: DomainSpec | None = None, tol: float = ARITH_TOL) -> bool:
    """Every (s, a) row of the dense kernel sums to one."""
    K = model.kernel(domain)
    return bool(np.all(np.abs(K.sum(axis=2) - 1.0) <= tol))
