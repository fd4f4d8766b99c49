"""
Data models for the DCME toolkit.
Pydantic records for experiment configuration, trial results and reports.
"""

from enum import Enum
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class SourceFamily(str, Enum):
    """Sub-Gaussian source families a CovarianceModel can sample from."""
    GAUSSIAN = "gaussian"
    SCALED_RADEMACHER = "scaled_rademacher"
    UNIFORM_BALL = "uniform_ball"


class NormKind(str, Enum):
    """Distortion norm."""
    OP = "op"
    FR = "fr"


class Scheme(str, Enum):
    """Estimation protocols the harness can drive."""
    TWO_AGENT_OP = "two_agent_op"
    TWO_AGENT_FR = "two_agent_fr"
    MULTI_AGENT = "multi_agent"
    INTERACTIVE = "interactive"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


RECORD_COLUMNS = [
    "scheme", "d1", "d2", "m", "n", "B1", "B2", "trial", "seed",
    "dist_op", "dist_fr", "bits1", "bits2", "error",
]


# Experiment Models

class ExperimentConfig(BaseModel):
    """One sweep: a ground-truth model, a protocol and the axes to sweep."""
    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    scheme: Scheme
    d1: int = Field(..., ge=1)
    d2: int = Field(default=0, ge=0)
    sigma: float = Field(default=1.0, gt=0)
    delta: float = Field(default=0.0, ge=0, le=1)
    d_seed: int = 0
    source: SourceFamily = SourceFamily.GAUSSIAN

    # Sweep axes
    m: List[int] = Field(..., min_length=1)
    budget: List[int] = Field(default_factory=list)
    eps: List[float] = Field(default_factory=list)
    levels: List[int] = Field(default_factory=list)

    # Overrides of the theorem-driven constants
    n: Optional[int] = Field(default=None, ge=1)
    clip_radius: Optional[float] = Field(default=None, gt=0)
    agent_dims: List[int] = Field(default_factory=list)

    trials: int = Field(default=1, ge=1)
    master_seed: int = 0
    out: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV

    @field_validator("m", "budget", "eps", "levels", "agent_dims", mode="before")
    @classmethod
    def promote_scalar(cls, v):
        """Scalars given for list keys become one-element lists."""
        if v is None:
            return []
        if isinstance(v, (list, tuple)):
            return list(v)
        return [v]

    @field_validator("m", "budget", "levels", "agent_dims")
    @classmethod
    def positive_entries(cls, v):
        if any(x < 1 for x in v):
            raise ValueError("entries must be positive integers")
        return v

    @field_validator("eps")
    @classmethod
    def positive_eps(cls, v):
        if any(x <= 0 for x in v):
            raise ValueError("eps entries must be positive")
        return v

    @model_validator(mode="after")
    def check_scheme_requirements(self):
        if self.scheme != Scheme.MULTI_AGENT and self.d2 < 1:
            raise ValueError(f"scheme {self.scheme.value} needs d2 >= 1")
        if self.scheme in (Scheme.TWO_AGENT_OP, Scheme.TWO_AGENT_FR, Scheme.INTERACTIVE) and not self.budget:
            raise ValueError(f"scheme {self.scheme.value} needs at least one budget value")
        if self.scheme == Scheme.MULTI_AGENT and self.budget:
            raise ValueError("multi_agent budgets are set through levels, not budget")
        if self.source == SourceFamily.UNIFORM_BALL:
            raise ValueError("uniform_ball sources are reserved for validators")
        if self.agent_dims and sum(self.agent_dims) != self.d1 + self.d2:
            raise ValueError(
                f"agent_dims sum to {sum(self.agent_dims)}, expected d1 + d2 = {self.d1 + self.d2}"
            )
        return self

    @property
    def d(self) -> int:
        return self.d1 + self.d2


class TrialRecord(BaseModel):
    """One Monte Carlo trial: distortions, bits used and error flag."""
    scheme: str
    d1: int
    d2: int
    m: int
    n: int
    B1: int
    B2: int
    trial: int
    seed: int
    dist_op: float = Field(..., ge=0)
    dist_fr: float = Field(..., ge=0)
    bits1: int
    bits2: int
    error: bool

    @model_validator(mode="after")
    def check_budget_law(self):
        # interactive B1 records Alice's unbudgeted broadcast, so bits1 == B1 there
        if not self.error and (self.bits1 > self.B1 or self.bits2 > self.B2):
            raise ValueError(
                f"bits ({self.bits1}, {self.bits2}) exceed budgets ({self.B1}, {self.B2})"
            )
        return self


class RecordFile(BaseModel):
    """Schema of the JSON results file."""
    schema_version: Literal[1] = 1
    columns: List[str] = Field(default_factory=lambda: list(RECORD_COLUMNS))
    records: List[TrialRecord] = Field(default_factory=list)

    @field_validator("columns")
    @classmethod
    def exact_columns(cls, v):
        if v != RECORD_COLUMNS:
            raise ValueError(f"columns must be exactly {RECORD_COLUMNS}")
        return v


class ScalingFit(BaseModel):
    """Log-log least-squares fit of mean distortion against a sweep axis."""
    slope: float
    intercept: float
    stderr: float
    points: int
    axis: str
    response: str


# Validation Models

class ValidationReport(BaseModel):
    """Outcome of one Monte Carlo concentration check."""
    name: str
    grid: List[float]
    labels: List[str] = Field(default_factory=list)
    empirical: List[float]
    stderr: List[float]
    bound: List[float]
    raw_bound: List[float]
    passed: bool
    trials: int
    seed: int
    parameters: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_lengths(self):
        n = len(self.grid)
        for name in ("empirical", "stderr", "bound", "raw_bound"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} has {len(getattr(self, name))} entries, grid has {n}")
        return self
