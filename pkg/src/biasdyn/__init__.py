"""Opinion dynamics with biased assimilation on weighted directed networks.

The package simulates a discrete-time opinion update in which each agent
mixes its own opinion with neighbor influence weighted by how well it agrees
with the agent's current leaning, catalogs the socially meaningful fixed
points of that map, and certifies their local stability from the
linearization.
"""

from .conformance import REGIMES, run_regime
from .dynamics import (
    Trajectory,
    as_bias_profile,
    as_opinion_state,
    bias_response,
    classify_bias,
    simulate,
    step,
    write_trajectory_csv,
)
from .equilibria import (
    EquilibriumPoint,
    FixedPointSearch,
    canonical_equilibria,
    find_equilibrium_near,
    is_equilibrium,
    polarization_state,
    star_equilibria,
)
from .errors import (
    BiasDynError,
    BoundaryBiasError,
    ConstructionInfeasibleError,
    FamilyUndefinedError,
    GenerationFailedError,
    HypothesisViolatedError,
    InvalidParameterError,
    IsolatedAgentError,
    NotAnEquilibriumError,
    OutOfFamilyError,
    SingularInputError,
)
from .harness import (
    OUTCOME_LABELS,
    ExperimentConfig,
    ExperimentResult,
    batch,
    classify_outcome,
    component_seed,
    load_preset,
    run_experiment,
)
from .network import (
    InfluenceNetwork,
    TwoIslandSpec,
    is_strongly_connected,
    make_complete,
    make_path,
    make_random_graph,
    make_regular_ring,
    make_small_world,
    make_star,
    make_two_island,
    randomize_weights,
    read_edge_list,
    write_edge_list,
)
from .stability import (
    JacobianResult,
    MonotoneCertificate,
    StabilityReport,
    classify,
    conjecture_sweep,
    jacobian,
    monotone_certificate,
    neutral_jacobian,
    polarization_jacobian,
    power_iteration_radius,
    spectral_radius,
)

__version__ = "0.1.0"

__all__ = [
    "BiasDynError",
    "BoundaryBiasError",
    "ConstructionInfeasibleError",
    "EquilibriumPoint",
    "ExperimentConfig",
    "ExperimentResult",
    "FamilyUndefinedError",
    "FixedPointSearch",
    "GenerationFailedError",
    "HypothesisViolatedError",
    "InfluenceNetwork",
    "InvalidParameterError",
    "IsolatedAgentError",
    "JacobianResult",
    "MonotoneCertificate",
    "NotAnEquilibriumError",
    "OUTCOME_LABELS",
    "OutOfFamilyError",
    "REGIMES",
    "SingularInputError",
    "StabilityReport",
    "Trajectory",
    "TwoIslandSpec",
    "as_bias_profile",
    "as_opinion_state",
    "batch",
    "bias_response",
    "canonical_equilibria",
    "classify",
    "classify_bias",
    "classify_outcome",
    "component_seed",
    "conjecture_sweep",
    "find_equilibrium_near",
    "is_equilibrium",
    "is_strongly_connected",
    "jacobian",
    "load_preset",
    "make_complete",
    "make_path",
    "make_random_graph",
    "make_regular_ring",
    "make_small_world",
    "make_star",
    "make_two_island",
    "monotone_certificate",
    "neutral_jacobian",
    "polarization_jacobian",
    "polarization_state",
    "power_iteration_radius",
    "randomize_weights",
    "read_edge_list",
    "run_experiment",
    "run_regime",
    "simulate",
    "spectral_radius",
    "star_equilibria",
    "step",
    "write_edge_list",
    "write_trajectory_csv",
]
