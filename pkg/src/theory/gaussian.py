"""
SDPI coefficients of jointly Gaussian pairs: the squared top canonical correlation.
"""

import numpy as np
import structlog
from scipy import linalg as sla

from core.covariance import operator_norm
from core.errors import InvalidInputError
from .channels import GaussianJoint

logger = structlog.get_logger(__name__)

EIGEN_FLOOR = 1e-12


def inverse_sqrt_pd(M, name: str = "block") -> np.ndarray:
    """M^{-1/2} for symmetric positive definite M; tiny eigenvalues are floored with a warning."""
    A = np.asarray(M, dtype=float)
    w, V = sla.eigh((A + A.T) / 2)
    top = float(np.max(np.abs(w), initial=0.0))
    if w.size == 0 or w[0] <= 0:
        raise InvalidInputError(f"{name} is singular (min eigenvalue {w[0] if w.size else 0:.3e})")
    floor = EIGEN_FLOOR * top
    if w[0] < floor:
        logger.warning("near_singular_marginal", block=name, min_eigenvalue=float(w[0]),
                       floored_to=floor, relative_error=float(floor / w[0]))
        w = np.maximum(w, floor)
    return (V / np.sqrt(w)) @ V.T


def sdpi_gaussian(joint: GaussianJoint) -> float:
    """||C11^{-1/2} C12 C22^{-1/2}||_op^2."""
    K = inverse_sqrt_pd(joint.c11, "C11") @ joint.c12 @ inverse_sqrt_pd(joint.c22, "C22")
    return operator_norm(K) ** 2


def symmetric_sdpi_gaussian(joint: GaussianJoint) -> float:
    """Symmetric (interactive) SDPI coefficient; for Gaussian pairs it equals the SDPI coefficient."""
    return sdpi_gaussian(joint)
