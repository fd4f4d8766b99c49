"""
Theorem-driven parameter choices for the estimation protocols.

The sample counts and budgets required by the achievability proofs are very
conservative. Both factories therefore accept overrides for the quantities an
experiment actually runs with, and report the theorem values alongside.
"""

import math
from typing import List, Optional, Sequence

import structlog
from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.errors import InvalidInputError
from core.models import NormKind
from quantize.dither import ScalarDitherConfig

logger = structlog.get_logger(__name__)

# two-agent constants
BETA_NUMERATOR = 6912
SAMPLE_FACTOR = 2 ** 19
BUDGET_FACTOR = 2 ** 18
FR_LOG_NUMERATOR = 528
HIGH_DISTORTION_FACTOR = 512
SELFCOV_CAP = 11.0
DATA_CAP = 6.0

# multi-agent constants
MULTI_EPS_DIVISOR = 1520

CEIL_TOL = 1e-9


def _ceil(x: float) -> int:
    """Ceiling that ignores floating-point noise just above an integer."""
    return int(math.ceil(x - CEIL_TOL * max(1.0, abs(x))))


class SchemeParamsTwoAgent(BaseModel):
    """Parameters of the two-agent scheme, theorem values and the values in use."""
    model_config = ConfigDict(frozen=True)

    sigma: float = Field(..., gt=0)
    eps: float = Field(..., gt=0)
    norm: NormKind
    d1: int = Field(..., ge=1)
    d2: int = Field(..., ge=1)
    eps_tilde: float
    beta: float
    m_min: int
    B_min: List[int]
    high_distortion: bool = False

    m: int = Field(..., ge=1)
    budgets: List[int]
    n: int = Field(..., ge=1)

    @model_validator(mode="after")
    def check_consistency(self):
        if self.n > self.m:
            raise ValueError(f"n = {self.n} exceeds m = {self.m}")
        if len(self.budgets) != 2 or any(b < 1 for b in self.budgets):
            raise ValueError("two positive budgets required")
        return self

    @property
    def d(self) -> int:
        return self.d1 + self.d2

    @property
    def dims(self):
        return (self.d1, self.d2)

    @property
    def selfcov_radius(self) -> float:
        return SELFCOV_CAP * self.sigma ** 2

    def data_radius(self, d_k: int) -> float:
        return DATA_CAP * self.sigma * math.sqrt(d_k + self.n)


def two_agent_params(sigma: float, eps: float, d1: int, d2: int,
                     norm: NormKind = NormKind.OP,
                     m: Optional[int] = None,
                     budgets: Optional[Sequence[int]] = None,
                     n: Optional[int] = None) -> SchemeParamsTwoAgent:
    """
    Build the two-agent parameters for target distortion eps.

    op:  eps_tilde = eps / sigma^2, B_min[k] = 2^18 beta d_k d / eps_tilde^2
    fr:  eps_tilde = eps / (sigma^2 sqrt(d)),
         B_min[k] = max(2^18 beta d_k d_min / eps_tilde^2, 2 d_k^2 log2(528 / eps_tilde))
    with beta = 2 log2(6912 / eps_tilde) and m_min = 2^19 d / eps_tilde^2.
    Frobenius targets eps >= 512 sigma^2 sqrt(d_min) switch to the
    block-diagonal high-distortion mode.
    """
    norm = NormKind(norm)
    if sigma <= 0:
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    if eps <= 0:
        raise InvalidInputError(f"eps must be positive, got {eps}")
    if d1 < 1 or d2 < 1:
        raise InvalidInputError(f"both agents need at least one dimension, got ({d1}, {d2})")

    d = d1 + d2
    d_min = min(d1, d2)
    high = norm == NormKind.FR and eps >= HIGH_DISTORTION_FACTOR * sigma ** 2 * math.sqrt(d_min)

    if norm == NormKind.OP:
        eps_tilde = eps / sigma ** 2
    else:
        eps_tilde = eps / (sigma ** 2 * math.sqrt(d))
    if eps_tilde > 1 and not high:
        raise InvalidInputError(
            f"eps = {eps} outside the admissible range (normalised target {eps_tilde:.6g} > 1)"
        )

    beta = 2 * math.log2(BETA_NUMERATOR / eps_tilde) if eps_tilde < BETA_NUMERATOR else 0.0
    m_min = _ceil(SAMPLE_FACTOR * d / eps_tilde ** 2)

    B_min = []
    for d_k in (d1, d2):
        if norm == NormKind.OP:
            bits = BUDGET_FACTOR * beta * d_k * d / eps_tilde ** 2
        else:
            bits = max(BUDGET_FACTOR * beta * d_k * d_min / eps_tilde ** 2,
                       2 * d_k ** 2 * math.log2(FR_LOG_NUMERATOR / eps_tilde))
        if high:
            # all bits go to the self-covariance, which needs one bit per entry
            bits = max(bits, d_k ** 2)
        B_min.append(max(1, _ceil(bits)))

    m_used = m_min if m is None else int(m)
    budgets_used = list(B_min) if budgets is None else [int(b) for b in budgets]
    if len(budgets_used) != 2:
        raise InvalidInputError(f"expected two budgets, got {budgets_used}")
    if m_used < 1 or any(b < 1 for b in budgets_used):
        raise InvalidInputError("m and budgets must be positive")

    if n is not None:
        n_used = int(n)
        if not 1 <= n_used <= m_used:
            raise InvalidInputError(f"n = {n_used} must lie in [1, m = {m_used}]")
    elif high or beta <= 0:
        n_used = 1
    else:
        per_dim = min(budgets_used[0] / d1, budgets_used[1] / d2)
        n_used = max(1, min(int(math.floor(per_dim / beta)), m_used))

    params = SchemeParamsTwoAgent(
        sigma=sigma, eps=eps, norm=norm, d1=d1, d2=d2,
        eps_tilde=eps_tilde, beta=beta, m_min=m_min, B_min=B_min,
        high_distortion=high, m=m_used, budgets=budgets_used, n=n_used,
    )
    if high:
        logger.info("high_distortion_mode", eps=eps, threshold=HIGH_DISTORTION_FACTOR * sigma ** 2 * math.sqrt(d_min))
    return params


class SchemeParamsMulti(BaseModel):
    """Parameters of the multi-agent dithered scheme."""
    model_config = ConfigDict(frozen=True)

    sigma: float = Field(..., gt=0)
    eps: float = Field(..., gt=0)
    d: int = Field(..., ge=1)
    eps_tilde: float
    n: int = Field(..., ge=1)
    beta_fail: float
    dither: ScalarDitherConfig
    B_per_dim: float

    @model_validator(mode="after")
    def check_budget(self):
        if self.B_per_dim < self.n:
            raise ValueError("B_per_dim must be at least n")
        return self

    @property
    def L(self) -> float:
        return self.dither.L

    @property
    def bits_per_dim(self) -> int:
        """Packed bits one coordinate sends: n * ceil(log2(2N + 1))."""
        return self.n * self.dither.bits_per_symbol

    def agent_bits(self, d_k: int) -> int:
        return d_k * self.bits_per_dim


def multi_agent_params(sigma: float, eps: float, d: int,
                       n: Optional[int] = None,
                       clip_radius: Optional[float] = None,
                       levels: Optional[int] = None) -> SchemeParamsMulti:
    """
    eps_tilde = eps / (1520 sigma^2), n = d / eps_tilde^2, beta = eps / (2 sigma^2),
    L = sigma sqrt(2 ln(d n / beta)), grid step sigma * eps_tilde, N = ceil(L / step).

    `n`, `clip_radius` and `levels` override the theorem choices; with `levels`
    the step becomes L / levels.
    """
    if sigma <= 0:
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    if d < 1:
        raise InvalidInputError(f"d must be positive, got {d}")
    if not 0 < eps <= sigma ** 2:
        raise InvalidInputError(f"eps = {eps} must lie in (0, sigma^2 = {sigma ** 2}]")

    eps_tilde = eps / (MULTI_EPS_DIVISOR * sigma ** 2)
    n_used = max(1, _ceil(d / eps_tilde ** 2)) if n is None else int(n)
    if n_used < 1:
        raise InvalidInputError(f"n must be positive, got {n_used}")
    beta_fail = eps / (2 * sigma ** 2)

    if clip_radius is None:
        L = sigma * math.sqrt(2 * math.log(d * n_used / beta_fail))
    else:
        L = float(clip_radius)
    if L <= 0:
        raise InvalidInputError(f"clip radius must be positive, got {L}")

    if levels is None:
        dither = ScalarDitherConfig.from_radius(L, sigma * eps_tilde)
    else:
        dither = ScalarDitherConfig.from_levels(L, int(levels))

    return SchemeParamsMulti(
        sigma=sigma, eps=eps, d=d, eps_tilde=eps_tilde, n=n_used,
        beta_fail=beta_fail, dither=dither,
        B_per_dim=n_used * math.log2(dither.alphabet),
    )
