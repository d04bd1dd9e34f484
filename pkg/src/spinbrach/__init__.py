"""Time-optimal control of a spin-1 system in a magnetic field of fixed magnitude."""

from .brachistochrone import (
    AlignmentAngle,
    SolveResult,
    alignment_alpha,
    arrival_time_minus,
    arrival_time_zero,
    first_hitting_time,
    minimal_time_minus,
    optimize_field,
    solve_example2,
    speed_limit_bound,
)
from .errors import (
    CapabilityError,
    DegenerateSpanError,
    DomainError,
    NoSolutionError,
    NormalizationError,
    SpinBrachError,
    UnreachableBySearchError,
)
from .propagator import (
    Propagator,
    Trajectory,
    analytic_state_minus,
    analytic_state_zero,
    closed_form_propagator,
    evolve,
    sample_trajectory,
    scalar_exp_identity,
    spectral_propagator,
)
from .reachability import ReachabilityReport, classify_target, modulus_conditions, phase_condition
from .spin_algebra import (
    CanonicalState,
    FieldDirection,
    StateVector,
    canonicalize,
    direction_to_unit,
    fidelity,
    inner_product,
    spin_matrices,
    spin_projection,
)
from .subspace import (
    ResidualProfile,
    SpanBasis,
    orthonormal_span,
    projection_residual,
    trajectory_residual_profile,
)

__version__ = "0.1.0"
