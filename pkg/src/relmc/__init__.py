"""Particle methods for relaxation approximations of conservation laws.

Direct Monte Carlo and gradient-based (derivative-sampling) Monte Carlo
solvers for scalar laws and small hyperbolic systems, with deterministic
reference solvers, error analysis utilities, benchmark presets, and a CSV
command-line front end.
"""

from .errors import (
    CflViolation,
    ConfigError,
    DegenerateCell,
    NegativeDensity,
    NegativeDepth,
    NegativeEquilibrium,
    NonConvergence,
    RelmcError,
    SubcharacteristicViolation,
    ZeroMass,
    ZeroReference,
    ZeroVariation,
)
from .models import (
    CharacteristicModel,
    FluxModel,
    RelaxationConfig,
    SystemModel,
    awr_characteristic,
    awr_system,
    burgers,
    custom_flux,
    equilibrium_split,
    gradient_probabilities,
    isentropic_euler_system,
    lwr,
    scalar_as_characteristic,
    scalar_as_system,
    swe_characteristic,
    swe_system,
)
from .particles import (
    ParticleEnsemble,
    make_rng,
    sample_gbmc_initial,
    sample_mc_initial,
    stochastic_round,
    transport,
)
from .reconstruct import FieldOnGrid, Grid, batch_cdf, cdf_blended, histogram
from .results import RunResult
from .mc_scalar import run_mc
from .gbmc_scalar import run_gbmc
from .systems import run_gbmc_characteristic, run_gbmc_meshed, run_mc_systems
from .reference import godunov_scalar, relaxation_fv_system, swe_exact_riemann
from .analysis import (
    ErrorReport,
    cdf_variance_check,
    cellwise_variance_fraction,
    convergence_study,
    fit_slope,
    lp_error,
    optimal_dx,
)
from .studies import scalar_error_study
from .presets import PRESETS, preset_names, run_preset

__version__ = "0.1.0"
