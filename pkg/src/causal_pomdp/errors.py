"""Exception types shared across the package."""

from __future__ import annotations


class CausalPOMDPError(Exception):
    """Base class for all library errors."""


class ModelParseError(CausalPOMDPError):
    """The model document does not match the schema.

    ``path`` points at the offending element, e.g. ``transition.Z.listen[1]``.
    """

    def __init__(self, path: str, detail: str):
        super().__init__(f"{path}: {detail}")
        self.path = path
        self.detail = detail


class ModelValidationError(CausalPOMDPError):
    """A parsed model violates one or more semantic invariants."""

    def __init__(self, findings):
        self.findings = list(findings)
        first = self.findings[0]
        more = f" (+{len(self.findings) - 1} more)" if len(self.findings) > 1 else ""
        super().__init__(f"{first.path}: [{first.rule}] {first.detail}{more}")


class ShapeError(CausalPOMDPError, ValueError):
    """Dimension mismatch between matrices, vectors, or tables."""


class NormalizationError(CausalPOMDPError, ValueError):
    """A vector or matrix row that should sum to one does not."""


class ImpossibleObservationError(CausalPOMDPError):
    """An observation has zero probability under the current belief.

    ``likelihood`` is the computed P(o | a, b) (always 0.0) and ``step``
    is filled in by trace filtering.
    """

    def __init__(self, action, observation, likelihood: float = 0.0, step: int | None = None):
        self.action = action
        self.observation = observation
        self.likelihood = likelihood
        self.step = step
        where = f" at step {step}" if step is not None else ""
        super().__init__(
            f"observation {observation!r} after action {action!r} has probability "
            f"{likelihood}{where}"
        )


class BudgetExceededError(CausalPOMDPError):
    """A belief-tree recursion would expand more nodes than allowed."""

    def __init__(self, budget: int, needed: int | None = None, hint: str = ""):
        self.budget = budget
        self.needed = needed
        msg = f"belief tree exceeds node budget of {budget}"
        if needed is not None:
            msg += f" (needs at least {needed})"
        if hint:
            msg += f"; {hint}"
        super().__init__(msg)
