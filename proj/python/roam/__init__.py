"""Python bindings for the roam duelling-bandit simulator."""

from ._roam import (  # noqa: F401
    AGGREGATE_CSV_HEADER,
    TRAJECTORY_CSV_HEADER,
    ConfigError,
    ConvergenceError,
    DesignState,
    IoError,
    NumericError,
    RunConfig,
    check_concentration,
    check_lambda_min_condition,
    compute_alpha,
    compute_beta,
    compute_kappa_sigmoid,
    critical_ratio,
    export_batch,
    extreme_eigenvalues,
    moving_average,
    preset,
    read_aggregate_csv,
    run_batch,
    run_single,
    sigmoid,
    sigmoid_derivative,
    solve_mle,
    weighted_norm,
    win_probability,
)

__version__ = "0.1.0"
