"""Finite-horizon planning over the joint state-domain belief."""

from .alpha import (
    AlphaFunction,
    AlphaSet,
    backup,
    greedy_action,
    initial_alpha_set,
    plan,
    projections,
    prune_lp,
    prune_pointwise,
    value_at,
    values_at,
)
from .convexity import ConvexityReport, check_convexity
from .policy import (
    PolicySpec,
    constant_policy,
    evaluate_policy_known_shift,
    greedy_policy,
    node_budget,
    policy_action,
    policy_advance,
    policy_start,
    reactive_policy,
)
