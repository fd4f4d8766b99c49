"""
Ground-truth covariance models and the matrix utilities the protocols share.

Covers block covariance construction, seeded sub-Gaussian sampling, operator
and Frobenius norms, symmetric eigendecomposition, projection onto the PSD
cone and the KL divergence between centred Gaussians.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import structlog
from scipy import linalg as sla

from .errors import InvalidInputError
from .models import SourceFamily
from .seeding import make_rng

logger = structlog.get_logger(__name__)

SYMMETRY_RTOL = 1e-12
PSD_RTOL = 1e-10
CONTRACTION_TOL = 1e-12


def _as_matrix(M, name: str = "matrix") -> np.ndarray:
    A = np.asarray(M, dtype=float)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if A.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-dimensional, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return A


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues (descending) and orthonormal eigenvectors of a symmetric matrix."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


@dataclass(frozen=True)
class CovarianceModel:
    """Block covariance [[C11, C12], [C21, C22]] with a sub-Gaussian source family."""
    d1: int
    d2: int
    sigma: float
    cov: np.ndarray
    source: SourceFamily = SourceFamily.GAUSSIAN

    def __post_init__(self):
        cov = _as_matrix(self.cov, "cov")
        d = self.d1 + self.d2
        if self.d1 < 1 or self.d2 < 0:
            raise InvalidInputError(f"invalid block dimensions d1={self.d1}, d2={self.d2}")
        if cov.shape != (d, d):
            raise InvalidInputError(f"cov has shape {cov.shape}, expected {(d, d)}")
        if self.sigma < 0:
            raise InvalidInputError("sigma must be non-negative")

        scale = float(np.max(np.abs(cov))) if cov.size else 0.0
        if np.max(np.abs(cov - cov.T), initial=0.0) > SYMMETRY_RTOL * max(scale, 1e-300):
            raise InvalidInputError("cov is not symmetric")

        eigenvalues = np.linalg.eigvalsh((cov + cov.T) / 2)
        op = float(np.max(np.abs(eigenvalues), initial=0.0))
        if eigenvalues.size and eigenvalues[0] < -PSD_RTOL * op:
            raise InvalidInputError(f"cov is not PSD (min eigenvalue {eigenvalues[0]:.3e})")
        if op > self.sigma ** 2 * (1 + PSD_RTOL) + 1e-300:
            raise InvalidInputError(
                f"||cov||_op = {op:.6g} exceeds sigma^2 = {self.sigma ** 2:.6g}"
            )
        object.__setattr__(self, "cov", cov)

    @property
    def d(self) -> int:
        return self.d1 + self.d2

    @property
    def c11(self) -> np.ndarray:
        return self.cov[: self.d1, : self.d1]

    @property
    def c12(self) -> np.ndarray:
        return self.cov[: self.d1, self.d1:]

    @property
    def c22(self) -> np.ndarray:
        return self.cov[self.d1:, self.d1:]


@dataclass(frozen=True)
class SampleMatrix:
    """Samples stored column-wise: rows are coordinates, columns are draws."""
    data: np.ndarray

    def __post_init__(self):
        data = _as_matrix(self.data, "samples")
        if data.shape[1] < 1:
            raise InvalidInputError("a SampleMatrix needs at least one column")
        object.__setattr__(self, "data", data)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def head(self, n: int) -> np.ndarray:
        """First n samples (columns)."""
        if n > self.cols:
            raise InvalidInputError(f"requested {n} samples, only {self.cols} available")
        return self.data[:, :n]

    def block(self, start: int, stop: int) -> "SampleMatrix":
        """Coordinates [start, stop) of every sample, as an agent would observe them."""
        return SampleMatrix(self.data[start:stop, :])

    def split(self, dims) -> Tuple["SampleMatrix", ...]:
        """Split coordinates into consecutive agent blocks of the given sizes."""
        if sum(dims) != self.rows:
            raise InvalidInputError(f"agent dims {list(dims)} do not sum to {self.rows}")
        offsets = np.cumsum([0, *dims])
        return tuple(self.block(int(a), int(b)) for a, b in zip(offsets[:-1], offsets[1:]))

    def empirical_covariance(self) -> np.ndarray:
        return self.data @ self.data.T / self.cols


def symmetric_eig(M) -> EigenDecomposition:
    """Eigendecomposition of (M + M^T)/2, eigenvalues in descending order."""
    A = _as_matrix(M)
    if A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got {A.shape}")
    w, V = sla.eigh((A + A.T) / 2)
    order = np.argsort(w)[::-1]
    return EigenDecomposition(eigenvalues=w[order], eigenvectors=V[:, order])


def sqrtm_psd(M) -> np.ndarray:
    """Symmetric square root; eigenvalues below zero are clamped first."""
    eig = symmetric_eig(M)
    V = eig.eigenvectors
    return (V * np.sqrt(np.clip(eig.eigenvalues, 0.0, None))) @ V.T


def operator_norm(M) -> float:
    """Largest singular value."""
    A = _as_matrix(M)
    if A.size == 0:
        return 0.0
    return float(sla.svdvals(A)[0])


def frobenius_norm(M) -> float:
    A = _as_matrix(M)
    return float(np.sqrt(np.sum(A * A)))


def psd_project(M) -> np.ndarray:
    """Keep the non-negative part of the spectrum of (M + M^T)/2."""
    eig = symmetric_eig(M)
    keep = eig.eigenvalues >= 0
    V = eig.eigenvectors[:, keep]
    P = (V * eig.eigenvalues[keep]) @ V.T
    return (P + P.T) / 2


def kl_centered_gaussian(S1, S0) -> float:
    """KL( N(0, S1) || N(0, S0) ) for positive definite S1, S0."""
    A1 = _as_matrix(S1, "S1")
    A0 = _as_matrix(S0, "S0")
    if A1.shape != A0.shape or A1.shape[0] != A1.shape[1]:
        raise InvalidInputError(f"shape mismatch: {A1.shape} vs {A0.shape}")
    try:
        c0 = sla.cho_factor((A0 + A0.T) / 2)
    except sla.LinAlgError as e:
        raise InvalidInputError("S0 must be positive definite") from e
    try:
        c1 = sla.cho_factor((A1 + A1.T) / 2)
    except sla.LinAlgError as e:
        raise InvalidInputError("S1 must be positive definite") from e

    d = A0.shape[0]
    trace_term = float(np.trace(sla.cho_solve(c0, A1))) - d
    logdet0 = 2.0 * float(np.sum(np.log(np.diag(c0[0]))))
    logdet1 = 2.0 * float(np.sum(np.log(np.diag(c1[0]))))
    return max(0.5 * (trace_term - (logdet1 - logdet0)), 0.0)


def build_block_covariance(d1: int, d2: int, sigma: float, delta: float, D=None,
                           source: SourceFamily = SourceFamily.GAUSSIAN) -> CovarianceModel:
    """(sigma^2/2) [[I, delta D^T], [delta D, I]] with ||D||_op <= 1."""
    if not 0.0 <= delta <= 1.0:
        raise InvalidInputError(f"delta must lie in [0, 1], got {delta}")
    if D is None:
        D = np.zeros((d2, d1))
    D = np.asarray(D, dtype=float).reshape(d2, d1)
    if D.size and operator_norm(D) > 1 + CONTRACTION_TOL:
        raise InvalidInputError(f"||D||_op = {operator_norm(D):.6g} exceeds 1")

    d = d1 + d2
    C = np.eye(d)
    C[d1:, :d1] = delta * D
    C[:d1, d1:] = delta * D.T
    return CovarianceModel(d1=d1, d2=d2, sigma=sigma, cov=(sigma ** 2 / 2) * C, source=source)


def random_contraction(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Random rows x cols matrix with singular values uniform on [0, 1]."""
    k = min(rows, cols)
    if k == 0:
        return np.zeros((rows, cols))
    U, _ = np.linalg.qr(rng.standard_normal((rows, k)))
    V, _ = np.linalg.qr(rng.standard_normal((cols, k)))
    s = np.sort(rng.uniform(0.0, 1.0, size=k))[::-1]
    return (U * s) @ V.T


def sample(model: CovarianceModel, count: int, seed: int,
           rng: Optional[np.random.Generator] = None) -> SampleMatrix:
    """Draw `count` i.i.d. zero-mean columns with covariance model.cov."""
    if count < 1:
        raise InvalidInputError(f"count must be >= 1, got {count}")
    rng = make_rng(seed) if rng is None else rng
    d = model.d
    root = sqrtm_psd(model.cov)

    if model.source == SourceFamily.GAUSSIAN:
        base = rng.standard_normal((d, count))
    elif model.source == SourceFamily.SCALED_RADEMACHER:
        base = rng.choice(np.array([-1.0, 1.0]), size=(d, count))
    elif model.source == SourceFamily.UNIFORM_BALL:
        # uniform on the ball of radius sqrt(d + 2) has identity covariance
        g = rng.standard_normal((d, count))
        g /= np.linalg.norm(g, axis=0, keepdims=True)
        radius = np.sqrt(d + 2) * rng.uniform(size=count) ** (1.0 / d)
        base = g * radius
    else:
        raise InvalidInputError(f"unknown source family {model.source}")

    return SampleMatrix(root @ base)
