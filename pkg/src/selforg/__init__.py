"""Semiclassical quench dynamics of atoms with cavity-mediated long-range forces.

N-body and mean-field stochastic engines for the damped, driven
self-organization transition, equilibrium sampling of the thermal state,
linear (Vlasov) stability rates, and a quench/ensemble harness with
deterministic seeding.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    NeverCrossesError,
    NoExponentialStageError,
    NotStationaryError,
    PhysicsError,
    SamplerConvergenceError,
    SelforgError,
    StabilityError,
    TrajectoryDivergedError,
    VlasovStableError,
)
from .params import (
    DerivedParams,
    ModelParams,
    derive_params,
    path_b_convert,
    threshold_curve,
)
from .state import PhaseState, load_phase_state, save_phase_state
from .backend import HAS_NUMBA, backend_name, get_backend
from .observables import (
    CSV_HEADER,
    EnsembleSeries,
    TStarResult,
    kurtosis,
    order_parameter,
    phi11,
    photon_estimate,
    recording_grid,
    relative_localization,
    t_star,
)
from .vlasov import (
    GrowthRateResult,
    StageOneFit,
    dispersion_lhs,
    erfcx,
    fit_stage_one,
    growth_rate,
)
from .sampler import BurnDiagnostics, metropolis_burn, sample_equilibrium
from .nbody import (
    IntegratorConfig,
    dissipative_drift,
    energy,
    force,
    noise_amplitude,
    run_trajectory,
    step,
)
from .meanfield import MfEnsemble, build_mf_ensemble, mf_force, mf_step, run_mf_trajectory
from .harness import (
    QuenchProtocol,
    ScalingFit,
    compare_engines,
    fit_scaling,
    run_quench,
    scaling_sweep,
)
from .configio import load_config, protocol_from_config

__all__ = [name for name in dir() if not name.startswith("_")]
