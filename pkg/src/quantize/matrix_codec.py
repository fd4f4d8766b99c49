"""
Constructive entrywise matrix quantizer.

Stands in for the existential epsilon-net quantizer of an operator-norm ball:
every entry of M (|M_ij| <= ||M||_op <= r) is rounded to the nearest point of
the zero-aligned grid {(k - k0)*delta}, k0 = ceil(r/delta), which covers [-r, r]
with floor(2r/delta) + 2 points. With delta = 2*eps/sqrt(rows*cols) the reconstruction
error satisfies ||M_hat - M||_F <= eps, hence also in operator norm.
The price over the net is a log(rows*cols) factor in bits; every report
carries both numbers.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict

from core.covariance import operator_norm
from core.errors import InsufficientBudgetError, InvalidInputError
from .bounds import net_bits_theoretical, net_eps_for_budget

logger = structlog.get_logger(__name__)

# alphabet travels as a u32 in the payload frame
MAX_SYMBOL_BITS = 31
FLOOR_TOL = 1e-9
NORM_TOL = 1e-12


def symbol_bits(alphabet: int) -> int:
    """Bits per packed symbol: ceil(log2(alphabet))."""
    if alphabet < 2:
        raise InvalidInputError(f"alphabet must be >= 2, got {alphabet}")
    return (alphabet - 1).bit_length()


@dataclass(frozen=True)
class QuantizedMatrix:
    """Wire-level quantized matrix: shape, alphabet and row-major codes."""
    rows: int
    cols: int
    alphabet: int
    codes: np.ndarray

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.uint64).reshape(-1)
        if self.rows < 0 or self.cols < 0:
            raise InvalidInputError("negative dimensions")
        if codes.size != self.rows * self.cols:
            raise InvalidInputError(
                f"{codes.size} codes for a {self.rows}x{self.cols} matrix"
            )
        if self.alphabet < 2 or self.alphabet >= 2 ** 32:
            raise InvalidInputError(f"alphabet {self.alphabet} outside [2, 2^32)")
        if codes.size and int(codes.max()) >= self.alphabet:
            raise InvalidInputError("code outside alphabet")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)

    @property
    def bits_per_symbol(self) -> int:
        return symbol_bits(self.alphabet)

    @property
    def bits_used(self) -> int:
        return int(self.codes.size) * self.bits_per_symbol

    def __eq__(self, other):
        if not isinstance(other, QuantizedMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.alphabet) == (other.rows, other.cols, other.alphabet) \
            and np.array_equal(self.codes, other.codes)

    __hash__ = None


class CodecReport(BaseModel):
    """Bit cost and error guarantees of one encoded matrix."""
    model_config = ConfigDict(frozen=True)

    bits_used: int
    max_entry_error: float
    op_error_bound: float
    net_bits: float
    net_eps: Optional[float] = None


@dataclass(frozen=True)
class MatrixGrid:
    """Shared grid metadata: shape, radius r and spacing delta."""
    rows: int
    cols: int
    radius: float
    delta: float

    @property
    def entries(self) -> int:
        return self.rows * self.cols

    @property
    def alphabet(self) -> int:
        return int(math.floor(2 * self.radius / self.delta + FLOOR_TOL)) + 2

    @property
    def origin(self) -> int:
        """Index of the grid point 0."""
        return int(math.ceil(self.radius / self.delta - FLOOR_TOL))

    @property
    def bits_per_symbol(self) -> int:
        return symbol_bits(self.alphabet)

    @property
    def bits(self) -> int:
        return self.entries * self.bits_per_symbol

    @property
    def eps(self) -> float:
        """Frobenius (hence operator) error guarantee: delta/2 * sqrt(entries)."""
        return self.delta / 2 * math.sqrt(self.entries)

    @classmethod
    def from_target(cls, rows: int, cols: int, radius: float, eps: float) -> "MatrixGrid":
        if eps <= 0:
            raise InvalidInputError(f"target error must be positive, got {eps}")
        if radius <= 0:
            raise InvalidInputError(f"radius must be positive, got {radius}")
        if rows * cols < 1:
            raise InvalidInputError("cannot build a grid for an empty matrix")
        return cls(rows, cols, radius, 2 * eps / math.sqrt(rows * cols))

    @classmethod
    def from_budget(cls, rows: int, cols: int, radius: float, bits: int) -> "MatrixGrid":
        """Smallest spacing whose packed code fits in `bits` bits."""
        if radius <= 0:
            raise InvalidInputError(f"radius must be positive, got {radius}")
        entries = rows * cols
        if entries < 1:
            raise InvalidInputError("cannot build a grid for an empty matrix")
        per_entry = bits // entries
        if per_entry < 1:
            raise InsufficientBudgetError(bits, entries)
        b = min(per_entry, MAX_SYMBOL_BITS)
        if b == 1:
            # two points, -4r and 0: every entry of [-r, r] rounds to 0
            delta = 4 * radius
        else:
            delta = 2 * radius / (2 ** b - 2)
        grid = cls(rows, cols, radius, delta)
        assert grid.bits <= bits, (grid.bits, bits)
        return grid


def encode_on_grid(M, grid: MatrixGrid) -> Tuple[QuantizedMatrix, CodecReport]:
    """Round every entry of M to its nearest grid point (ties toward -inf)."""
    A = np.asarray(M, dtype=float)
    if A.shape != (grid.rows, grid.cols):
        raise InvalidInputError(f"matrix shape {A.shape} does not match grid {(grid.rows, grid.cols)}")
    norm = operator_norm(A)
    if norm > grid.radius * (1 + NORM_TOL):
        raise InvalidInputError(f"||M||_op = {norm:.6g} exceeds cap r = {grid.radius:.6g}")

    u = A / grid.delta
    k = np.clip(np.ceil(u - 0.5) + grid.origin, 0, grid.alphabet - 1).astype(np.uint64)
    q = QuantizedMatrix(grid.rows, grid.cols, grid.alphabet, k.reshape(-1))
    recon = decode_on_grid(q, grid)

    report = CodecReport(
        bits_used=q.bits_used,
        max_entry_error=float(np.max(np.abs(recon - A), initial=0.0)),
        op_error_bound=grid.eps,
        net_bits=net_bits_theoretical(grid.rows, grid.cols, grid.radius, grid.eps)
        if grid.eps < 3 * grid.radius else 0.0,
        net_eps=net_eps_for_budget(grid.rows, grid.cols, grid.radius, q.bits_used),
    )
    return q, report


def decode_on_grid(q: QuantizedMatrix, grid: MatrixGrid) -> np.ndarray:
    if (q.rows, q.cols) != (grid.rows, grid.cols):
        raise InvalidInputError(
            f"payload shape {(q.rows, q.cols)} does not match grid {(grid.rows, grid.cols)}"
        )
    if q.alphabet != grid.alphabet:
        raise InvalidInputError(f"payload alphabet {q.alphabet} does not match grid {grid.alphabet}")
    values = (q.codes.astype(np.float64) - grid.origin) * grid.delta
    return values.reshape(q.rows, q.cols)


def matrix_uniform_encode(M, r: float, eps: float,
                          rng_unused=None) -> Tuple[QuantizedMatrix, CodecReport]:
    """Quantize M (||M||_op <= r) so that ||M_hat - M||_op <= eps."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2:
        raise InvalidInputError(f"expected a matrix, got shape {A.shape}")
    grid = MatrixGrid.from_target(A.shape[0], A.shape[1], r, eps)
    return encode_on_grid(A, grid)


def matrix_uniform_decode(q: QuantizedMatrix, grid: MatrixGrid) -> np.ndarray:
    return decode_on_grid(q, grid)


def encode_within_budget(M, r: float, bits: int) -> Tuple[QuantizedMatrix, CodecReport, MatrixGrid]:
    """Quantize M at the finest grid that fits `bits`; report the achieved error."""
    A = np.asarray(M, dtype=float)
    grid = MatrixGrid.from_budget(A.shape[0], A.shape[1], r, bits)
    q, report = encode_on_grid(A, grid)
    logger.debug("matrix_encoded", shape=A.shape, radius=r, budget=bits,
                 bits_used=q.bits_used, achieved_eps=grid.eps, net_eps=report.net_eps)
    return q, report, grid
