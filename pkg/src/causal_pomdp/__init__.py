"""Planning in factored causal POMDPs under stochastic shift interventions."""

from .belief import (
    JointBelief,
    TraceStep,
    filter_trace,
    marginal_domain,
    marginal_state,
    observation_likelihood,
    product_belief,
    uniform_joint_belief,
    update_belief,
)
from .errors import (
    BudgetExceededError,
    CausalPOMDPError,
    ImpossibleObservationError,
    ModelParseError,
    ModelValidationError,
    NormalizationError,
    ShapeError,
)
from .examples import coin_model, tiger_model
from .interventions import (
    DomainSet,
    DomainSpec,
    apply_shift,
    base_domain,
    identity_shift,
    kernels_equal,
    shift_matrix,
    shift_to_target,
    shifted_cpt,
)
from .model import (
    CausalPOMDP,
    VariableSpec,
    enumerate_states,
    load_model,
    load_model_file,
    observe,
    render_model,
    reward,
    transition_prob,
    validate_model,
)

__version__ = "0.1.0"
