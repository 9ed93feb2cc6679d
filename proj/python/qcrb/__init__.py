"""Quantum Cramer-Rao bounds for SU(2) and SU(1,1) interferometers."""

from ._qcrb import (
    AssumptionViolation,
    ConfigError,
    CutoffTooSmall,
    DegenerateStatistics,
    Error,
    Estimation,
    GammaDomain,
    InvalidArgument,
    ModeStatistics,
    NonFiniteObjective,
    NonpositiveInformation,
    SingularComplement,
    Target,
    __version__,
    c_matrix_single,
    c_matrix_two,
    correlations,
    gamma_opt_single,
    lbs_moments,
    nbs_moments,
    optimal_bound_single,
    optimize_gamma_single,
    oracle_moments,
    overestimation,
    qcrb,
    qfim_matrix,
    run_point,
    run_scan,
    two_param_bound,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
