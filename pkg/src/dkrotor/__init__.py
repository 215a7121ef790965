"""Double kicked rotor simulations at quantum resonance.

Evolves the exact resonant rotor and its detuning limit map side by side,
and extracts the spreading laws (ballistic, cubic, saturation) from the
energy time series.
"""

from .potentials import (
    BALLISTIC,
    EXPONENTIAL,
    SUPERBALLISTIC,
    Cosine,
    PiecewiseLinear,
    PiecewiseQuadratic,
    Potential,
    PotentialError,
    SymmetryTags,
    by_name,
    classify_symmetries,
    cosine,
    predict_regime,
    va,
    vb,
    vc,
    vd,
    wrap_angle,
)
from .quantum import (
    AliasingError,
    DEFAULT_KICK,
    DoubleKickOperator,
    PlanckSpec,
    QuantumState,
    ballistic_coefficient,
    default_grid_size,
    evolve,
    free_phase,
    momentum_eigenstate,
    operator_column,
    random_state,
    step,
)
from .pseudoclassical import (
    ClassicalEnsemble,
    RescaledParams,
    axis_persistence,
    cubic_energy,
    cubic_energy_rescaled,
    evolve_ensemble,
    map_step,
    off_axis_fraction,
    phase_portrait,
    saturation_estimates,
    uniform_ensemble,
    va_one_step,
)
from .series import EnergySeries, log_record_times, read_csv, write_csv

__version__ = "0.1.0"
