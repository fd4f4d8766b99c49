"""
Bit-count formulas for quantizing norm balls of matrices.

These are the reference numbers the constructive grid codec is compared to:
the covering-net upper bound and the packing lower bound.
"""

import math

from core.errors import InvalidInputError
from core.models import NormKind


def _check_shape(rows: int, cols: int):
    if rows < 1 or cols < 1:
        raise InvalidInputError(f"matrix shape must be positive, got {rows}x{cols}")


def net_bits_theoretical(rows: int, cols: int, r: float, eps: float) -> float:
    """rows*cols*log2(3r/eps): bits of an eps-net of the operator-norm ball of radius r."""
    _check_shape(rows, cols)
    if r <= 0 or eps <= 0:
        raise InvalidInputError("radius and eps must be positive")
    if eps >= 3 * r:
        raise InvalidInputError(f"eps = {eps} must be below 3r = {3 * r}")
    return rows * cols * math.log2(3 * r / eps)


def net_eps_for_budget(rows: int, cols: int, r: float, bits: float) -> float:
    """Error an eps-net achieves with `bits` bits: 3r * 2^(-bits/(rows*cols))."""
    _check_shape(rows, cols)
    if r <= 0:
        raise InvalidInputError("radius must be positive")
    if bits < 0:
        raise InvalidInputError("bits must be non-negative")
    return 3 * r * 2.0 ** (-bits / (rows * cols))


def packing_log_lower(rows: int, cols: int, r: float, eps: float,
                      norm: NormKind = NormKind.OP) -> float:
    """
    Lower bound on log2 of the packing number of the radius-r ball.

    op: rows*cols*log2(r/eps); fr: rows*cols*log2(r*sqrt(min(rows, cols))/(14 eps)).
    The value may be negative when eps is large; it is returned as is.
    """
    _check_shape(rows, cols)
    if r <= 0 or eps <= 0:
        raise InvalidInputError("radius and eps must be positive")
    norm = NormKind(norm)
    if norm == NormKind.OP:
        return rows * cols * math.log2(r / eps)
    return rows * cols * math.log2(r * math.sqrt(min(rows, cols)) / (14 * eps))
