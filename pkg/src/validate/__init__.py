"""Monte Carlo validators for the concentration inequalities."""

from .concentration import (
    validate_cov_tail,
    validate_max_inequality,
    validate_opnorm_tail,
    validate_selfcov_norm_tail,
    validate_subgamma_mgf,
    validate_subgamma_tail,
    validate_sum_tail,
)
from .registry import CORE_VALIDATORS, VALIDATORS, ValidationRunner

__all__ = [
    "CORE_VALIDATORS",
    "VALIDATORS",
    "ValidationRunner",
    "validate_cov_tail",
    "validate_max_inequality",
    "validate_opnorm_tail",
    "validate_selfcov_norm_tail",
    "validate_subgamma_mgf",
    "validate_subgamma_tail",
    "validate_sum_tail",
]
