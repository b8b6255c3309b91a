"""Cumulant-based higher-order orthogonal treatment-effect estimation.

Thin python surface over the C++ core: moment/cumulant machinery, the
orthogonalizing polynomial, lasso nuisance fitting, the DML and higher-order
estimators, and the synthetic demand-estimation Monte Carlo harness.
"""

from ._core import (
    CapacityError,
    DegenerateDesignError,
    LinearPredictor,
    WeakIdentificationError,
    ace_estimate,
    bell_number,
    block_size_profiles,
    cubic_estimators,
    cumulants_to_moments,
    debiased_moments,
    dml_estimate,
    gen_dataset,
    insensitivity_rhs,
    j_coefficients,
    j_recursive_coefficients,
    lambda_default,
    lasso_fit,
    moments_to_cumulants,
    partition_weighted_sum,
    raw_moments,
    run_monte_carlo,
)

__all__ = [
    "CapacityError",
    "DegenerateDesignError",
    "LinearPredictor",
    "WeakIdentificationError",
    "ace_estimate",
    "bell_number",
    "block_size_profiles",
    "cubic_estimators",
    "cumulants_to_moments",
    "debiased_moments",
    "dml_estimate",
    "gen_dataset",
    "insensitivity_rhs",
    "j_coefficients",
    "j_recursive_coefficients",
    "lambda_default",
    "lasso_fit",
    "moments_to_cumulants",
    "partition_weighted_sum",
    "raw_moments",
    "run_monte_carlo",
]
