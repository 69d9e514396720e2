"""chainflux: steady states, currents, and rectification diagnostics for
boundary-driven spin chains, plus the classical graded-oscillator contrast
model."""

__version__ = "0.1.0"

from .chain import (
    ChainSpec,
    GradedProfile,
    build_hamiltonian,
    energy_current_field_op,
    energy_current_xxz_op,
    expand_graded,
    spin_current_op,
)
from .classical import (
    ClassicalChainSpec,
    LinearizedSetup,
    RectificationReport,
    bond_flux,
    conductivity_gap,
    linearized_middle_amplitude,
    rectification_experiment,
    steady_temps,
)
from .errors import (
    ChainFluxError,
    DomainError,
    EmptyChainError,
    NoConvergenceError,
    NonUniqueSteadyStateError,
    NumericalError,
    ShapeError,
    SpecError,
)
from .lindblad import (
    CurrentsProfile,
    DissipatorSpec,
    Liouvillian,
    SolverConfig,
    StateDiagnostics,
    TargetZ,
    TwistedXY,
    build_liouvillian,
    chain_steady_state,
    currents_profile,
    evolve,
    expectation,
    jump_operators,
    liouvillian_residual,
    state_diagnostics,
    steady_state,
    unvectorize,
    validate_state,
    vectorize,
)
from .pauli import (
    adjoint,
    anticommutator,
    commutator,
    embed,
    is_hermitian,
    kron_chain,
    pauli,
    trace,
)
from .symmetry import (
    BathInversion,
    ConjugationReport,
    DirectionScan,
    ParityReport,
    check_conjugation_identity,
    energy_current_direction_scan,
    invert_baths,
    parity_report,
    u_r,
    u_x,
)

__all__ = [
    "__version__",
    "ChainSpec",
    "GradedProfile",
    "build_hamiltonian",
    "energy_current_field_op",
    "energy_current_xxz_op",
    "expand_graded",
    "spin_current_op",
    "ClassicalChainSpec",
    "LinearizedSetup",
    "RectificationReport",
    "bond_flux",
    "conductivity_gap",
    "linearized_middle_amplitude",
    "rectification_experiment",
    "steady_temps",
    "ChainFluxError",
    "DomainError",
    "EmptyChainError",
    "NoConvergenceError",
    "NonUniqueSteadyStateError",
    "NumericalError",
    "ShapeError",
    "SpecError",
    "CurrentsProfile",
    "DissipatorSpec",
    "Liouvillian",
    "SolverConfig",
    "StateDiagnostics",
    "TargetZ",
    "TwistedXY",
    "build_liouvillian",
    "chain_steady_state",
    "currents_profile",
    "evolve",
    "expectation",
    "jump_operators",
    "liouvillian_residual",
    "state_diagnostics",
    "steady_state",
    "unvectorize",
    "validate_state",
    "vectorize",
    "BathInversion",
    "ConjugationReport",
    "DirectionScan",
    "ParityReport",
    "check_conjugation_identity",
    "energy_current_direction_scan",
    "invert_baths",
    "parity_report",
    "u_r",
    "u_x",
]
