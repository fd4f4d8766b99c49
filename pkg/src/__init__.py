"""
Distributed Covariance Matrix Estimation toolkit.
"""

from . import core
from . import harness
from . import protocol
from . import quantize
from . import theory
from . import validate

__all__ = ["core", "harness", "protocol", "quantize", "theory", "validate"]
