"""
Named validators for `dcme validate`.
"""

from typing import Callable, Dict, List, Optional, Sequence

import structlog

from core.errors import InvalidInputError
from core.models import ValidationReport
from . import concentration

VALIDATORS: Dict[str, Callable[..., ValidationReport]] = {
    "cov_tail": concentration.validate_cov_tail,
    "opnorm_tail": concentration.validate_opnorm_tail,
    "subgamma_mgf": concentration.validate_subgamma_mgf,
    "sum_tail": concentration.validate_sum_tail,
    "max_inequality": concentration.validate_max_inequality,
    "selfcov_norm_tail": concentration.validate_selfcov_norm_tail,
    "subgamma_tail": concentration.validate_subgamma_tail,
}

CORE_VALIDATORS = ["cov_tail", "opnorm_tail", "subgamma_mgf", "sum_tail", "max_inequality"]

logger = structlog.get_logger(__name__)


class ValidationRunner:
    """Runs a selection of validators with shared trial count, seed and chunking."""

    def __init__(self, trials: int, seed: int, chunk_size: int = concentration.DEFAULT_CHUNK):
        self.trials = trials
        self.seed = seed
        self.chunk_size = chunk_size

    def run(self, names: Optional[Sequence[str]] = None) -> List[ValidationReport]:
        names = list(names) if names else list(VALIDATORS)
        unknown = [name for name in names if name not in VALIDATORS]
        if unknown:
            raise InvalidInputError(f"unknown validators {unknown}; choose from {sorted(VALIDATORS)}")

        reports = []
        for name in names:
            logger.info("validator_started", validator=name, trials=self.trials, seed=self.seed)
            reports.append(VALIDATORS[name](trials=self.trials, seed=self.seed, chunk_size=self.chunk_size))

        failed = [r.name for r in reports if not r.passed]
        if failed:
            logger.error("validators_failed", failed=failed)
        else:
            logger.info("validators_passed", count=len(reports))
        return reports
