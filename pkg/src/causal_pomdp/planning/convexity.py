"""Empirical check that a value function is piecewise linear and convex."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .alpha import AlphaSet

TOL = 1e-9


@dataclass
class ConvexityReport:
    samples: int
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"samples": self.samples, "violations": list(self.violations)}


def check_convexity(
    alphas: AlphaSet,
    samples: int = 1000,
    seed: int = 0,
    value_fn: Callable[[np.ndarray], np.ndarray] | None = None,
    tol: float = TOL,
) -> ConvexityReport:
    """Sample belief segments and test convexity along each.

    For random beliefs ``b1, b2`` (uniform on the simplex) and ``lam`` in
    [0, 1], two things are checked on ``b = lam*b1 + (1-lam)*b2``:

    * ``V(b) <= lam*V(b1) + (1-lam)*V(b2) + tol``;
    * ``V(b)`` equals the max over alphas of the interpolated endpoint
      values ``lam*<a, b1> + (1-lam)*<a, b2>`` within ``tol``.

    ``value_fn`` overrides how V is measured (it receives a ``(N, S*D)``
    stack of flattened beliefs); by default V is the alpha-set maximum.
    Passing something other than a max of linear functions is how the
    checker is tested against non-convex inputs.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    F = alphas.flat
    dim = F.shape[1]
    b1 = rng.dirichlet(np.ones(dim), samples)
    b2 = rng.dirichlet(np.ones(dim), samples)
    lam = rng.random(samples)
    bm = lam[:, None] * b1 + (1 - lam)[:, None] * b2

    measure = value_fn or (lambda B: (B @ F.T).max(axis=1))
    v1, v2, vm = measure(b1), measure(b2), measure(bm)
    chord = lam * v1 + (1 - lam) * v2
    envelope = (lam[:, None] * (b1 @ F.T) + (1 - lam)[:, None] * (b2 @ F.T)).max(axis=1)

    report = ConvexityReport(samples)
    gap_convex = vm - chord
    gap_affine = np.abs(vm - envelope)
    for k in np.flatnonzero((gap_convex > tol) | (gap_affine > tol)):
        report.violations.append(
            {"lambda": float(lam[k]), "gap": float(max(gap_convex[k], gap_affine[k]))}
        )
    return report
