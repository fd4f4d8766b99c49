"""
Exception hierarchy for the DCME toolkit.

Protocol error *signals* (an agent tripping a norm or clip threshold) are not
exceptions; they travel as ERROR messages and make the server return zero.
"""


class DCMEError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(DCMEError, ValueError):
    """A precondition on an argument was violated."""


class InsufficientBudgetError(DCMEError):
    """A bit budget cannot pay for even one bit per quantized entry."""

    def __init__(self, budget: int, entries: int, what: str = "matrix"):
        self.budget = budget
        self.entries = entries
        super().__init__(
            f"Budget of {budget} bits cannot encode {entries} {what} entries "
            f"(need at least 1 bit per entry)"
        )


class FrameError(DCMEError, ValueError):
    """A payload frame is truncated or malformed."""


class ConfigError(DCMEError):
    """Configuration file or environment override is invalid."""
