"""
Randomized (dithered) scalar quantizer on the grid {-N*step, ..., 0, ..., N*step}.

A value in [j*step, (j+1)*step) is sent to (j+1)*step with probability
(x - j*step)/step and to j*step otherwise, so E[decode(encode(x)) | x] = x.
Codes are grid indices shifted by N, i.e. in [0, 2N].
"""

import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.errors import InvalidInputError
from core.seeding import ensure_rng

ON_GRID_TOL = 1e-12


class ScalarDitherConfig(BaseModel):
    """Clip radius L, grid step and level count N with N * step == L."""
    model_config = ConfigDict(frozen=True)

    L: float = Field(..., gt=0)
    step: float = Field(..., gt=0)
    N: int = Field(..., ge=1)

    @model_validator(mode="after")
    def check_grid(self):
        if not math.isclose(self.N * self.step, self.L, rel_tol=1e-12):
            raise ValueError(f"N * step = {self.N * self.step} does not equal L = {self.L}")
        return self

    @classmethod
    def from_radius(cls, radius: float, step: float) -> "ScalarDitherConfig":
        """N = ceil(radius/step); L is inflated to N*step exactly."""
        if radius <= 0 or step <= 0:
            raise InvalidInputError("radius and step must be positive")
        N = max(1, math.ceil(radius / step - ON_GRID_TOL))
        return cls(L=N * step, step=step, N=N)

    @classmethod
    def from_levels(cls, radius: float, levels: int) -> "ScalarDitherConfig":
        """Fix N directly; step = radius / N."""
        if radius <= 0 or levels < 1:
            raise InvalidInputError("radius must be positive and levels >= 1")
        return cls(L=radius, step=radius / levels, N=levels)

    @property
    def alphabet(self) -> int:
        return 2 * self.N + 1

    @property
    def bits_per_symbol(self) -> int:
        return max(1, math.ceil(math.log2(self.alphabet)))


def dither_encode_array(x, cfg: ScalarDitherConfig,
                        rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Vectorised dither_encode; returns integer codes with the shape of x."""
    rng = ensure_rng(rng)
    values = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(values)):
        raise InvalidInputError("cannot quantize non-finite values")
    if values.size and np.max(np.abs(values)) > cfg.L:
        raise InvalidInputError(
            f"|x| = {np.max(np.abs(values)):.6g} exceeds clip radius L = {cfg.L:.6g}"
        )

    t = values / cfg.step
    nearest = np.rint(t)
    on_grid = np.abs(t - nearest) <= ON_GRID_TOL
    j = np.where(on_grid, nearest, np.floor(t))
    frac = np.where(on_grid, 0.0, t - j)
    up = rng.random(size=values.shape) < frac
    codes = j.astype(np.int64) + up.astype(np.int64) + cfg.N
    return np.clip(codes, 0, 2 * cfg.N)


def dither_encode(x: float, cfg: ScalarDitherConfig,
                  rng: Optional[np.random.Generator] = None) -> int:
    """Encode one scalar with |x| <= L to a code in [0, 2N]."""
    return int(dither_encode_array(np.array([x]), cfg, rng)[0])


def dither_decode_array(codes, cfg: ScalarDitherConfig) -> np.ndarray:
    c = np.asarray(codes)
    if c.size and (np.min(c) < 0 or np.max(c) > 2 * cfg.N):
        raise InvalidInputError(f"dither codes must lie in [0, {2 * cfg.N}]")
    return (c.astype(np.float64) - cfg.N) * cfg.step


def dither_decode(code: int, cfg: ScalarDitherConfig) -> float:
    return float(dither_decode_array(np.array([code]), cfg)[0])
