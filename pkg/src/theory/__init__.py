"""Closed-form contraction coefficients, lower bounds and the signed-permutation identity."""

from .channels import (
    GaussianJoint,
    MixtureChannel,
    coordinate_selection_channel,
    expected_gram,
    random_mixture_channel,
)
from .csdpi import csdpi_mixture, csdpi_naive_upper, csdpi_product, mean_shift_ratio, top_direction
from .gaussian import sdpi_gaussian, symmetric_sdpi_gaussian
from .lower_bounds import (
    BoundConvention,
    BoundInputs,
    LowerBound,
    lower_bound_fr,
    lower_bound_fr_cross,
    lower_bound_multi,
    lower_bound_op,
    lower_bound_op_cross,
)
from .signed_perm import signed_perm_expectation

__all__ = [
    "BoundConvention",
    "BoundInputs",
    "GaussianJoint",
    "LowerBound",
    "MixtureChannel",
    "coordinate_selection_channel",
    "csdpi_mixture",
    "csdpi_naive_upper",
    "csdpi_product",
    "expected_gram",
    "lower_bound_fr",
    "lower_bound_fr_cross",
    "lower_bound_multi",
    "lower_bound_op",
    "lower_bound_op_cross",
    "mean_shift_ratio",
    "random_mixture_channel",
    "sdpi_gaussian",
    "signed_perm_expectation",
    "symmetric_sdpi_gaussian",
    "top_direction",
]
