"""Expected costs of random splitting, their fluctuations, and backoff counter laws."""

from ._core import (
    NonConvergence,
    PrecisionLoss,
    chain_distribution,
    dyadic_periodic_f,
    dyadic_sum,
    dyadic_sum_representation,
    estimate_mean_cost,
    h_density,
    h_fence,
    h_survival,
    limit_distribution_cdf,
    mean_cost,
    periodic_f,
    periodic_f_mean,
    poisson_transform,
    solve_recurrence,
    solve_recurrence_exact,
)

__all__ = [
    "NonConvergence",
    "PrecisionLoss",
    "chain_distribution",
    "dyadic_periodic_f",
    "dyadic_sum",
    "dyadic_sum_representation",
    "estimate_mean_cost",
    "h_density",
    "h_fence",
    "h_survival",
    "limit_distribution_cdf",
    "mean_cost",
    "periodic_f",
    "periodic_f_mean",
    "poisson_transform",
    "solve_recurrence",
    "solve_recurrence_exact",
]
