"""Lindblad dynamics of a spin qubit in a resonator driven by a modulated electron beam."""

from .analysis import (
    CoherenceReport,
    build_report,
    count_oscillations,
    extract_observables,
    fit_exponential_envelope,
    fit_single_exponential,
)
from .config import ConfigError, RunConfig, parse_config, render_config
from .engine import (
    DivergenceError,
    IntegratorConfig,
    StepSizeError,
    TrajectoryRecord,
    integrate_rk4,
    propagate_expm_piecewise,
    run_experiment,
)
from .linalg import (
    BASIS_LABELS,
    basis_projector,
    hermitian_eigenvalues,
    matrix_exponential,
    partial_trace_resonator,
    tensor_product,
    validate_density,
)
from .model import (
    Liouvillian,
    ModelParameters,
    build_hamiltonian,
    lindblad_rhs,
    liouvillian_superoperator,
    preset,
)
from .physics import (
    BeamParameters,
    CavityGeometry,
    beam_field_at_distance,
    beam_kinematics,
    cavity_resonance_frequency,
    distance_for_target_field,
    validate_assumptions,
)

__version__ = "0.1.0"

__all__ = [
    "BASIS_LABELS",
    "BeamParameters",
    "CavityGeometry",
    "CoherenceReport",
    "ConfigError",
    "DivergenceError",
    "IntegratorConfig",
    "Liouvillian",
    "ModelParameters",
    "RunConfig",
    "StepSizeError",
    "TrajectoryRecord",
    "basis_projector",
    "beam_field_at_distance",
    "beam_kinematics",
    "build_hamiltonian",
    "build_report",
    "cavity_resonance_frequency",
    "count_oscillations",
    "distance_for_target_field",
    "extract_observables",
    "fit_exponential_envelope",
    "fit_single_exponential",
    "hermitian_eigenvalues",
    "integrate_rk4",
    "lindblad_rhs",
    "liouvillian_superoperator",
    "matrix_exponential",
    "parse_config",
    "partial_trace_resonator",
    "preset",
    "propagate_expm_piecewise",
    "render_config",
    "run_experiment",
    "tensor_product",
    "validate_assumptions",
    "validate_density",
]
