"""
Minimax lower bounds on the expected distortion of distributed covariance estimation.

Two-agent bounds carry the explicit sigma^2/32 prefactor. The multi-agent bound
is only known up to a constant and is returned as the rate expression
(constant 1); every result says which convention it follows.
"""

import math
from enum import Enum
from typing import Dict, List

from pydantic import BaseModel, Field

from core.errors import InvalidInputError

PREFACTOR = 1.0 / 32
OP_CAP = 2.0
FR_DIVISOR = 7.0


class BoundConvention(str, Enum):
    EXPLICIT = "explicit"
    RATE = "rate"


class BoundInputs(BaseModel):
    """Arguments of the lower bounds. Budgets and m may be math.inf."""
    sigma: float = Field(..., gt=0)
    m: float = Field(..., gt=0)
    d1: int = Field(..., ge=1)
    d2: int = Field(..., ge=1)
    B1: float = Field(..., gt=0)
    B2: float = Field(..., gt=0)

    @property
    def d(self) -> int:
        return self.d1 + self.d2

    @property
    def d_max(self) -> int:
        return max(self.d1, self.d2)

    @property
    def d_min(self) -> int:
        return min(self.d1, self.d2)


class LowerBound(BaseModel):
    value: float
    convention: BoundConvention
    terms: Dict[str, float] = Field(default_factory=dict)


def alpha_terms(inp: BoundInputs) -> Dict[str, float]:
    """Communication (cc) and sample (sc) complexity terms."""
    d1, d2, d = inp.d1, inp.d2, inp.d
    B1, B2, m = inp.B1, inp.B2, inp.m
    return {
        "op_cc": max(math.sqrt(d1 * inp.d_max / (2 * B1)), math.sqrt(d2 * inp.d_max / (2 * B2))),
        "op_sc": math.sqrt(d / (3 * m)),
        "fr_cc": math.sqrt(d1 * d2 / 14 * max(d1 / B1, d2 / B2)),
        "fr_sc_cross": math.sqrt(d * inp.d_min / (42 * m)),
        "fr_sc": math.sqrt(d * d / (42 * m)),
        "fr_cc_self": (4 / 7) * max(math.sqrt(d1) * 2.0 ** (-16 * B1 / d1 ** 2),
                                    math.sqrt(d2) * 2.0 ** (-16 * B2 / d2 ** 2)),
    }


def lower_bound_op(inp: BoundInputs) -> LowerBound:
    """(sigma^2/32) * min(max(op_cc, op_sc), 2)."""
    a = alpha_terms(inp)
    value = inp.sigma ** 2 * PREFACTOR * min(max(a["op_cc"], a["op_sc"]), OP_CAP)
    return LowerBound(value=value, convention=BoundConvention.EXPLICIT,
                      terms={k: a[k] for k in ("op_cc", "op_sc")})


def lower_bound_op_cross(inp: BoundInputs) -> LowerBound:
    """The operator-norm bound holds for the cross block alone."""
    return lower_bound_op(inp)


def lower_bound_fr_cross(inp: BoundInputs) -> LowerBound:
    """(sigma^2/32) * min(max(fr_cc, fr_sc_cross), sqrt(d_min)/7)."""
    a = alpha_terms(inp)
    cap = math.sqrt(inp.d_min) / FR_DIVISOR
    value = inp.sigma ** 2 * PREFACTOR * min(max(a["fr_cc"], a["fr_sc_cross"]), cap)
    return LowerBound(value=value, convention=BoundConvention.EXPLICIT,
                      terms={k: a[k] for k in ("fr_cc", "fr_sc_cross")})


def lower_bound_fr(inp: BoundInputs) -> LowerBound:
    """(sigma^2/32) * max(min(max(fr_cc, fr_sc), sqrt(d)/7), fr_cc_self)."""
    a = alpha_terms(inp)
    cap = math.sqrt(inp.d) / FR_DIVISOR
    inner = min(max(a["fr_cc"], a["fr_sc"]), cap)
    value = inp.sigma ** 2 * PREFACTOR * max(inner, a["fr_cc_self"])
    return LowerBound(value=value, convention=BoundConvention.EXPLICIT,
                      terms={k: a[k] for k in ("fr_cc", "fr_sc", "fr_cc_self")})


def lower_bound_multi(sigma: float, m: float, dims: List[int], budgets: List[float]) -> LowerBound:
    """sigma^2 * sqrt(max(d * max_k d_k/B_k, d/m)), rate convention."""
    if sigma <= 0 or m <= 0:
        raise InvalidInputError("sigma and m must be positive")
    if not dims or len(dims) != len(budgets):
        raise InvalidInputError("one budget per agent dimension required")
    if any(d_k < 1 for d_k in dims) or any(b <= 0 for b in budgets):
        raise InvalidInputError("dimensions and budgets must be positive")
    d = sum(dims)
    cc = d * max(d_k / b for d_k, b in zip(dims, budgets))
    sc = d / m
    return LowerBound(value=sigma ** 2 * math.sqrt(max(cc, sc)),
                      convention=BoundConvention.RATE,
                      terms={"cc": cc, "sc": sc})

