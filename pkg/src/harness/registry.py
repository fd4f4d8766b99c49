"""
Name -> callable registry behind `dcme theory OP --args JSON`.

Every entry takes JSON-decoded keyword arguments and returns a JSON-ready value.
"""

import math
from fractions import Fraction
from typing import Any, Callable, Dict

import numpy as np
from pydantic import BaseModel, ValidationError

from core.errors import InvalidInputError
from core.models import NormKind
from quantize.bounds import net_bits_theoretical, net_eps_for_budget, packing_log_lower
from theory import csdpi, gaussian, lower_bounds
from theory.channels import GaussianJoint, MixtureChannel
from theory.signed_perm import signed_perm_expectation


def to_jsonable(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, np.ndarray):
        return [to_jsonable(x) for x in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [to_jsonable(x) for x in value]
    if isinstance(value, dict):
        return {k: to_jsonable(v) for k, v in value.items()}
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def _channel(states) -> MixtureChannel:
    """states: [[matrix, probability], ...]."""
    try:
        return MixtureChannel.from_lists([s[0] for s in states], [s[1] for s in states])
    except (TypeError, IndexError, KeyError) as e:
        raise InvalidInputError("states must be a list of [matrix, probability] pairs") from e


def _joint(args: Dict[str, Any]) -> GaussianJoint:
    if "cov" in args:
        return GaussianJoint.from_covariance(args["cov"], int(args["d1"]))
    return GaussianJoint(args["c11"], args["c12"], args["c22"])


def _bound(fn):
    def evaluate(**kwargs):
        return fn(lower_bounds.BoundInputs(**kwargs))
    return evaluate


def _product(ch1, ch2):
    product, coefficient = csdpi.csdpi_product(_channel(ch1), _channel(ch2))
    return {"coefficient": coefficient,
            "states": [[A, p] for A, p in product.states]}


def _signed_perm(B, mode="exact", trials=100_000, seed=0):
    matrix = np.array(B, dtype=object if all(isinstance(x, int) for row in B for x in row) else float)
    mean, stderr = signed_perm_expectation(matrix, mode=mode, trials=trials, seed=seed, return_stderr=True)
    return {"expectation": mean, "stderr": stderr}


THEORY_OPERATIONS: Dict[str, Callable[..., Any]] = {
    "csdpi_mixture": lambda states: csdpi.csdpi_mixture(_channel(states)),
    "csdpi_naive_upper": lambda states: csdpi.csdpi_naive_upper(_channel(states)),
    "mean_shift_ratio": lambda states, mu: csdpi.mean_shift_ratio(_channel(states), mu),
    "csdpi_product": _product,
    "sdpi_gaussian": lambda **args: gaussian.sdpi_gaussian(_joint(args)),
    "symmetric_sdpi_gaussian": lambda **args: gaussian.symmetric_sdpi_gaussian(_joint(args)),
    "lower_bound_op": _bound(lower_bounds.lower_bound_op),
    "lower_bound_fr": _bound(lower_bounds.lower_bound_fr),
    "lower_bound_op_cross": _bound(lower_bounds.lower_bound_op_cross),
    "lower_bound_fr_cross": _bound(lower_bounds.lower_bound_fr_cross),
    "lower_bound_multi": lambda sigma, m, dims, budgets: lower_bounds.lower_bound_multi(sigma, m, dims, budgets),
    "signed_perm_expectation": _signed_perm,
    "net_bits_theoretical": net_bits_theoretical,
    "net_eps_for_budget": net_eps_for_budget,
    "packing_log_lower": lambda rows, cols, r, eps, norm="op": packing_log_lower(rows, cols, r, eps, NormKind(norm)),
}


def evaluate(name: str, args: Dict[str, Any]) -> Any:
    """Evaluate a registered operation and return its JSON-ready result."""
    if name not in THEORY_OPERATIONS:
        raise InvalidInputError(f"unknown operation {name!r}; choose from {sorted(THEORY_OPERATIONS)}")
    try:
        result = THEORY_OPERATIONS[name](**args)
    except (TypeError, ValidationError) as e:
        raise InvalidInputError(f"bad arguments for {name}: {e}") from e
    return to_jsonable(result)
