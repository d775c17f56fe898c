"""Kicked collective-spin resonance analysis toolkit.

A periodically kicked collective spin is analyzed side by side in its
quantum form (Floquet quasienergies of a finite spin-J matrix) and its
classical limit (a kicked flow on the unit sphere). The package locates
nonlinear resonances, reduces their island chains to an effective
pendulum, and compares the measured quasienergy splittings of resonant
doublets with the pendulum predictions across kick strength and spin
size.
"""

from .cache import cached_spectrum, load_spectrum, save_spectrum, spectrum_cache_path
from .config import (
    DriveConfig,
    ModelConfig,
    NumericsConfig,
    OutputConfig,
    PoincareConfig,
    ResonanceConfig,
    RunConfig,
    config_from_dict,
    config_to_dict,
    echo_config,
    load_config,
    log_grid,
)
from .classical import (
    ClassicalResonance,
    PhasePoint,
    Trajectory,
    apply_kick,
    classical_energy,
    classical_period,
    classical_resonance,
    energy_stddev,
    find_resonant_energy,
    hamilton_rhs,
    integrate_flow,
    poincare_section,
    rotational_z,
    scan_energy_stddev,
    strobe_energy_stddev,
    strobe_orbit,
    stroboscopic_map,
    warm_up,
)
from .errors import (
    ConfigError,
    DegenerateIslandError,
    EnergyRangeError,
    FitError,
    FixedPointError,
    IntegrationAccuracyError,
    IslandNotFoundError,
    KickedLmgError,
    MonodromyError,
    SpectrumError,
    TracingError,
    TrackingLostError,
    UnitarityError,
    UnstableOrbitError,
)
from .extraction import (
    ExtractionResult,
    IslandGeometry,
    MonodromyResult,
    PendulumParams,
    SeparatrixScan,
    epsilon_max,
    epsilon_max_crossing,
    extract_island,
    harmonic_splitting,
    harmonic_splitting_scaled,
    locate_fixed_point,
    monodromy_matrix,
    pendulum_levels,
    pendulum_params,
    rat_splitting,
    rat_splitting_scaled,
    scan_separatrix,
    splitting_phase,
    trace_separatrix_branches,
)
from .floquet import (
    FloquetBuilder,
    PairSample,
    QuasiSpectrum,
    ResonantPair,
    build_floquet,
    circular_distance,
    diagonalize_floquet,
    identify_resonant_pair,
    pair_sweep,
    quasienergy_splitting,
    scaled_splitting,
)
from .model import (
    ModelParams,
    ResonanceSpec,
    SpinOperators,
    StaticSpectrum,
    build_h0,
    build_spin_matrices,
    build_static_spectrum,
    calibrate_tau,
    coherent_state,
    compute_spectrum,
    hbar_eff,
    parity_operator,
    quantum_period,
    resonance_spec,
    select_index_by_energy,
    select_resonant_index,
)
from .scaling import (
    ChainRow,
    FitResult,
    QuantumSweep,
    SplittingCurve,
    SplittingRow,
    SweepRow,
    ValidityRow,
    area_fit,
    build_splitting_curve,
    chain_table,
    crossing_vs_analytic,
    loglog_fit,
    quantum_splitting_sweep,
    scaling_epsilon_max,
    strength_fit,
    sweep_splitting,
    validity_edge_fit,
    validity_edge_table,
)

__version__ = "0.1.0"
