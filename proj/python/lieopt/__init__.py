"""Momentum optimization on matrix Lie groups for leading (generalized) eigenproblems."""

from ._core import (
    ConfigError,
    DataError,
    DimensionMismatch,
    DissipationSchedule,
    Error,
    GroundTruth,
    IntegratorKind,
    NoConvergence,
    NotPositiveDefinite,
    NumericalError,
    OptimizerState,
    ProblemKind,
    ProblemSpec,
    SingularSolve,
    advance,
    cayley,
    cholesky,
    commutator,
    energy,
    error_metrics,
    extract_solution,
    force,
    gen_goe,
    gen_negative_wishart,
    gha_euler_step,
    gha_rk4_step,
    ground_truth,
    group_drift,
    initial_state,
    jacobi_eigh,
    normalize_pair,
    objective,
    pade22_exp,
    parse_idx,
    read_pair_blob,
    remove_eigengap,
    run,
    spectral_norm,
    write_pair_blob,
)

__all__ = [name for name in dir() if not name.startswith("_")]
