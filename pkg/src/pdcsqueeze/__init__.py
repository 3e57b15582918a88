"""Microwave squeezing in two resonators coupled through a SQUID.

Circuit model and normal modes, down-conversion coupling and Kerr constants,
moment-equation dynamics and closed-form steady states.
"""

from .circuit import (
    CONSTANTS,
    CircuitParameters,
    DerivedCircuit,
    PhysicalConstants,
    derive,
    effective_josephson_energy,
    josephson_inductance,
    junction_capacitance,
    reference_circuit,
    thermal_occupation,
    validate_regime,
)
from .coupling import (
    CouplingConstants,
    compute_coupling,
    coupling_map,
    coupling_strength,
    drive_flux_amplitude,
    flux_for_coupling,
    kerr_coefficient,
)
from .drive import DriveParameters, reference_drive
from .dynamics import (
    MomentState,
    VarianceTrace,
    default_initial_state,
    integrate,
    kerr_comparison,
    mean_field_rhs,
    minimum_variance_scan,
    moment_rhs,
)
from .errors import (
    ConfigError,
    DegenerateMode,
    DetunedCircuit,
    FluxOutOfRange,
    NonPhysical,
    NumericalError,
    PDCSqueezeError,
    RootNotFound,
    ToleranceFailure,
    ZeroDrive,
)
from .modes import ModeSolution, fundamental_mode, solve_modes, solve_wavevectors
from .steady import (
    SteadyStateSolution,
    critical_coupling,
    jpa_baseline,
    linear_stability,
    mean_field_branches,
    steady_state,
    steady_variances_a,
    steady_variances_b,
)

__version__ = "0.1.0"
