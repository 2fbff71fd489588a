"""Stochastic shift interventions.

A shift on a discrete variable X with ``m`` values is an ``m x m``
row-stochastic matrix ``A``.  Entry ``A[i, j]`` is the probability that a
draw of ``x_i`` is remapped to ``x_j``, so a conditional distribution
``p`` becomes ``A.T @ p``.

A *domain* bundles one such matrix per shifted variable; variables that are
not mentioned keep the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import NormalizationError, ShapeError

INPUT_TOL = 1e-12
ARITH_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def shift_matrix(data, tol: float = INPUT_TOL) -> np.ndarray:
    """Validate ``data`` as a row-stochastic square matrix and return a read-only copy."""
    a = np.asarray(data, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ShapeError(f"shift matrix must be square and non-empty, got shape {a.shape}")
    if not np.all(np.isfinite(a)) or np.any(a < 0) or np.any(a > 1):
        raise NormalizationError("shift matrix entries must lie in [0, 1]")
    rows = a.sum(axis=1)
    bad = np.flatnonzero(np.abs(rows - 1.0) > tol)
    if bad.size:
        raise NormalizationError(f"row {int(bad[0])} of shift matrix sums to {rows[bad[0]]!r}")
    return _frozen(a)


def is_shift_matrix(a, tol: float = ARITH_TOL) -> bool:
    a = np.asarray(a, dtype=float)
    return (
        a.ndim == 2
        and a.shape[0] == a.shape[1]
        and bool(np.all(a >= -tol))
        and bool(np.all(np.abs(a.sum(axis=1) - 1.0) <= tol))
    )


def identity_shift(m: int) -> np.ndarray:
    if m < 1:
        raise ShapeError(f"identity shift needs size >= 1, got {m}")
    return _frozen(np.eye(m))


def apply_shift(A, p) -> np.ndarray:
    """Push the distribution ``p`` through the shift ``A``: ``out_j = sum_i A[i, j] p_i``."""
    A = np.asarray(A, dtype=float)
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or A.shape != (p.size, p.size):
        raise ShapeError(f"shift of shape {A.shape} cannot act on vector of length {p.size}")
    if abs(p.sum() - 1.0) > ARITH_TOL:
        raise NormalizationError(f"input distribution sums to {p.sum()!r}")
    return A.T @ p


def shift_to_target(target, tol: float = ARITH_TOL) -> np.ndarray:
    """Return a shift mapping *every* distribution onto ``target``.

    Every row equals ``target``, so the starting distribution is irrelevant.
    """
    t = np.asarray(target, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ShapeError("target must be a non-empty vector")
    if np.any(t < 0) or abs(t.sum() - 1.0) > tol:
        raise NormalizationError(f"target sums to {t.sum()!r}")
    return _frozen(np.tile(t, (t.size, 1)))


def shifted_cpt(cpt, A) -> np.ndarray:
    """Apply ``A`` to every conditional column of a CPT.

    ``cpt`` has shape ``(n_parent_assignments, m)``: one row per parent
    assignment, each row a distribution over the ``m`` child values.
    """
    cpt = np.asarray(cpt, dtype=float)
    A = np.asarray(A, dtype=float)
    if cpt.ndim != 2 or A.shape != (cpt.shape[1], cpt.shape[1]):
        raise ShapeError(f"shift of shape {A.shape} does not fit CPT of shape {cpt.shape}")
    if np.array_equal(A, np.eye(A.shape[0])):
        return cpt.copy()
    return cpt @ A


@dataclass(frozen=True)
class DomainSpec:
    """A named environment configuration: variable name -> shift matrix."""

    name: str
    shifts: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "shifts", {var: shift_matrix(m) for var, m in dict(self.shifts).items()}
        )

    def matrix_for(self, var: str, size: int) -> np.ndarray:
        m = self.shifts.get(var)
        return identity_shift(size) if m is None else m

    @property
    def is_identity(self) -> bool:
        return all(np.array_equal(m, np.eye(m.shape[0])) for m in self.shifts.values())

    def key(self) -> tuple:
        """Hashable content key (used to cache kernels)."""
        return (self.name,) + tuple(
            (var, m.shape[0], m.tobytes()) for var, m in sorted(self.shifts.items())
        )

    def __eq__(self, other):
        if not isinstance(other, DomainSpec):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def to_dict(self) -> dict:
        return {"name": self.name, "shifts": {v: m.tolist() for v, m in self.shifts.items()}}


def base_domain(name: str = "base") -> DomainSpec:
    return DomainSpec(name, {})


class DomainSet(Sequence):
    """Ordered, non-empty collection of domains with unique names."""

    def __init__(self, domains: Iterable[DomainSpec]):
        self._domains = tuple(domains)
        if not self._domains:
            raise ShapeError("a domain set needs at least one domain")
        names = [d.name for d in self._domains]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate domain names in {names}")
        self._index = {n: i for i, n in enumerate(names)}

    def __getitem__(self, i):
        return self._domains[i]

    def __len__(self) -> int:
        return len(self._domains)

    def __iter__(self) -> Iterator[DomainSpec]:
        return iter(self._domains)

    def __eq__(self, other):
        return isinstance(other, DomainSet) and self._domains == other._domains

    def __hash__(self):
        return hash(self._domains)

    def __repr__(self):
        return f"DomainSet({list(self.names)})"

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self._domains)

    def index(self, name: str) -> int:  # type: ignore[override]
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown domain {name!r}; known: {list(self.names)}") from None

    def get(self, name: str) -> DomainSpec:
        return self._domains[self.index(name)]


def as_domain_set(domains) -> DomainSet:
    if isinstance(domains, DomainSet):
        return domains
    if isinstance(domains, DomainSpec):
        return DomainSet([domains])
    return DomainSet(domains)


def kernels_equal(model, d1: DomainSpec, d2: DomainSpec, tol: float = 1e-12) -> bool:
    """True iff both domains induce the same transition kernel for every action."""
    k1 = model.kernel(d1)
    k2 = model.kernel(d2)
    return bool(np.max(np.abs(k1 - k2)) <= tol)
