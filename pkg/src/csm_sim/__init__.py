"""Finite-dimensional simulator of context-to-context measurement statistics.

The library models a measurement setup as a *context* (an orthonormal basis
of C^N) whose outcomes, the *modalities*, are certain and repeatable within
that context but only probabilistically related to the outcomes of any
other context.  On top of that it provides: exact transition and return
probabilities (probability-summed vs. amplitude-summed routes through an
intermediate context), meter-mediated measurements of tunable strength
parametrized by the meter-state overlap matrix, decoherence under repeated
meter couplings, and stochastic trajectories with entropy production
statistics.
"""

from ._version import __version__
from .errors import (
    CsmSimError,
    DimensionMismatch,
    IndexOutOfRange,
    InitialMismatch,
    InternalConsistencyError,
    InvalidDistribution,
    InvalidGramMatrix,
    InvalidMeterStates,
    LengthMismatch,
    MeterNotOrthogonal,
    NonOrthonormalInput,
    NotPositiveSemidefinite,
    ScenarioParseError,
    ScenarioValidationError,
    StrengthOutOfRange,
    ZeroProbabilityPath,
)
from .hilbert import (
    Context,
    ContextSpec,
    Modality,
    build_context,
    computational_context,
    context_change_unitary,
    explicit_context,
    fourier_context,
    haar_context,
    haar_random_unitary,
    projector,
    rotation_context,
)
from .measurement import (
    born_probability,
    interference_return,
    irreversible_return,
    point_mass,
    propagate,
    return_path_amplitudes,
    reversible_return,
    transition_matrix,
    uniform_distribution,
    validate_distribution,
)
from .qnd import (
    composite_return_probability,
    entangle,
    gram_uniform,
    meter_chain_reduced_state,
    meter_return_probability,
    meter_states_from_gram,
    partial_trace_meter,
    post_measurement_state,
    reduced_system_state,
    validate_gram,
    von_neumann_entropy,
)
from .runner import (
    build_scenario_objects,
    report_to_json,
    run_scenario,
    sweep_rows,
    verify_report,
    verify_scenario,
)
from .scenario import GramSpec, MeterSpec, ProtocolSpec, Scenario, SweepSpec, parse_scenario
from .trajectory import (
    ExhaustiveStats,
    Protocol,
    Trajectory,
    TrajectoryEnsembleStats,
    backward_log_prob,
    entropy_production,
    exhaustive_entropy_production,
    final_marginal,
    forward_log_prob,
    mean_entropy_production,
    meter_protocol_entropy,
    sample_trajectory,
    shannon_entropy,
    step_transition_matrices,
)

__all__ = [name for name in dir() if not name.startswith("_")]
