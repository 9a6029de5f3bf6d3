"""Gilbert-Elliott parameters for thresholded Gaussian fading."""

from ._core import (
    DomainError,
    GeParams,
    asymptotic_persistence,
    bivariate_orthant_cdf,
    estimate_transitions,
    ge_params,
    ge_params_from_rho,
    markov_gap_empirical,
    markov_gap_exact,
    normal_cdf,
    one_step_correlation,
    owens_t,
    report,
    simulate,
    trivariate_orthant,
)

__all__ = [
    "DomainError",
    "GeParams",
    "asymptotic_persistence",
    "bivariate_orthant_cdf",
    "estimate_transitions",
    "ge_params",
    "ge_params_from_rho",
    "markov_gap_empirical",
    "markov_gap_exact",
    "normal_cdf",
    "one_step_correlation",
    "owens_t",
    "report",
    "simulate",
    "trivariate_orthant",
]
