"""Periodically driven spin-boson work-to-work converter.

Exact wavefunction propagation of a driven two-level system coupled to a
discretized Ohmic bath (short iterative Lanczos), steady-state powers and
fluctuations, linear-response Onsager analysis, maximum-efficiency
performance, and static/dynamic thermodynamic uncertainty bounds, with
closed-form weak-coupling and Toulouse (alpha = 1/2) cross-checks.
"""

from .bath import BathSpec, BathModes, discretize_bath, spectral_density, bose_occupation
from .basis import TruncatedBasis, enumerate_basis, hilbert_dimension, BasisTooLargeError
from .operators import DriveSpec, apply_operator, apply_hamiltonian, expectation, initial_state
from .sil import (
    SilConfig,
    Trajectory,
    default_dt,
    propagate,
    two_time_correlator,
    save_checkpoint,
    load_checkpoint,
    ToleranceError,
)
from .observables import (
    channel_power,
    standard_observables,
    period_average,
    detect_steady_state,
    power_fluctuations,
    reduce_state,
    trace_distance,
    witness_measure,
    write_power_csv,
    records_from_trajectory,
)
from .linres import (
    CorrelationFunction,
    OnsagerMatrix,
    MEPoint,
    equilibrium_correlation,
    thermal_equilibrium_correlation,
    half_line_fourier,
    onsager_from_correlation,
    mean_powers,
    me_line_and_performance,
    NoConversionError,
)
from .analytic import (
    WeakCouplingParams,
    ToulouseParams,
    delta_eff,
    kondo_frequency,
    complex_digamma,
    weak_coupling_correlation,
    weak_coupling_onsager,
    weak_coupling_slopes,
    toulouse_response,
    toulouse_response_quadrature,
    toulouse_onsager,
    toulouse_fluctuation_asymptote,
)
from .tur import TurPoint, tradeoff_q, dynamic_bound, sweep_tur, STATIC_BOUND

__version__ = "0.1.0"

__all__ = [
    "BathSpec", "BathModes", "discretize_bath", "spectral_density", "bose_occupation",
    "TruncatedBasis", "enumerate_basis", "hilbert_dimension", "BasisTooLargeError",
    "DriveSpec", "apply_operator", "apply_hamiltonian", "expectation", "initial_state",
    "SilConfig", "Trajectory", "default_dt", "propagate", "two_time_correlator",
    "save_checkpoint", "load_checkpoint", "ToleranceError",
    "channel_power", "standard_observables", "period_average", "detect_steady_state",
    "power_fluctuations", "reduce_state", "trace_distance", "witness_measure",
    "write_power_csv", "records_from_trajectory",
    "CorrelationFunction", "OnsagerMatrix", "MEPoint", "equilibrium_correlation",
    "thermal_equilibrium_correlation", "half_line_fourier", "onsager_from_correlation",
    "mean_powers", "me_line_and_performance", "NoConversionError",
    "WeakCouplingParams", "ToulouseParams", "delta_eff", "kondo_frequency",
    "complex_digamma", "weak_coupling_correlation", "weak_coupling_onsager",
    "weak_coupling_slopes", "toulouse_response", "toulouse_response_quadrature",
    "toulouse_onsager", "toulouse_fluctuation_asymptote",
    "TurPoint", "tradeoff_q", "dynamic_bound", "sweep_tur", "STATIC_BOUND",
]
