"""
Gaussian mixture channels Y = A_V X + Z_V and jointly Gaussian pairs.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.covariance import operator_norm
from core.errors import InvalidInputError

PROB_TOL = 1e-12
CONTRACTION_TOL = 1e-10


@dataclass(frozen=True)
class MixtureChannel:
    """States (A_v, p_v) with A_v of shape d_Y x d_X, A_v A_v^T <= I and sum p_v = 1."""
    states: Tuple[Tuple[np.ndarray, float], ...]

    def __post_init__(self):
        if not self.states:
            raise InvalidInputError("a mixture channel needs at least one state")
        states = []
        shape = None
        for A, p in self.states:
            A = np.atleast_2d(np.asarray(A, dtype=float))
            if shape is None:
                shape = A.shape
            elif A.shape != shape:
                raise InvalidInputError(f"state matrices differ in shape: {A.shape} vs {shape}")
            if p < 0:
                raise InvalidInputError(f"negative state probability {p}")
            if operator_norm(A) ** 2 > 1 + CONTRACTION_TOL:
                raise InvalidInputError("state matrix violates A A^T <= I")
            A.setflags(write=False)
            states.append((A, float(p)))
        total = sum(p for _, p in states)
        if abs(total - 1.0) > PROB_TOL:
            raise InvalidInputError(f"state probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "states", tuple(states))

    @classmethod
    def from_lists(cls, matrices: Sequence, probabilities: Sequence[float]) -> "MixtureChannel":
        if len(matrices) != len(probabilities):
            raise InvalidInputError("one probability per state matrix required")
        return cls(tuple(zip(matrices, probabilities)))

    @property
    def d_x(self) -> int:
        return self.states[0][0].shape[1]

    @property
    def d_y(self) -> int:
        return self.states[0][0].shape[0]

    @property
    def matrices(self) -> List[np.ndarray]:
        return [A for A, _ in self.states]

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for _, p in self.states])


def expected_gram(channel: MixtureChannel) -> np.ndarray:
    """E_V[A_V^T A_V]."""
    G = sum(p * (A.T @ A) for A, p in channel.states)
    return (G + G.T) / 2


def coordinate_selection_channel(d: int) -> MixtureChannel:
    """Uniform state v in [d] with A_v = e_v^T: the output sees one random coordinate."""
    if d < 1:
        raise InvalidInputError(f"d must be positive, got {d}")
    eye = np.eye(d)
    return MixtureChannel(tuple((eye[v:v + 1, :], 1.0 / d) for v in range(d)))


def random_mixture_channel(d_x: int, d_y: int, num_states: int,
                           rng: np.random.Generator,
                           probabilities: Optional[Sequence[float]] = None) -> MixtureChannel:
    """Random states with operator norms uniform on [0, 1] and Dirichlet probabilities."""
    matrices = []
    for _ in range(num_states):
        G = rng.standard_normal((d_y, d_x))
        G *= rng.uniform() / max(operator_norm(G), 1e-300)
        matrices.append(G)
    if probabilities is None:
        p = rng.dirichlet(np.ones(num_states))
        p[-1] = 1.0 - p[:-1].sum()
        probabilities = p
    return MixtureChannel.from_lists(matrices, list(probabilities))


@dataclass(frozen=True)
class GaussianJoint:
    """Covariance blocks of a jointly Gaussian pair (X, Y)."""
    c11: np.ndarray
    c12: np.ndarray
    c22: np.ndarray

    def __post_init__(self):
        c11 = np.atleast_2d(np.asarray(self.c11, dtype=float))
        c12 = np.atleast_2d(np.asarray(self.c12, dtype=float))
        c22 = np.atleast_2d(np.asarray(self.c22, dtype=float))
        d1, d2 = c11.shape[0], c22.shape[0]
        if c11.shape != (d1, d1) or c22.shape != (d2, d2) or c12.shape != (d1, d2):
            raise InvalidInputError(
                f"inconsistent block shapes {c11.shape}, {c12.shape}, {c22.shape}"
            )
        joint = np.block([[c11, c12], [c12.T, c22]])
        w = np.linalg.eigvalsh((joint + joint.T) / 2)
        if w[0] < -1e-10 * max(abs(w[-1]), 1.0):
            raise InvalidInputError(f"joint covariance is not PSD (min eigenvalue {w[0]:.3e})")
        object.__setattr__(self, "c11", c11)
        object.__setattr__(self, "c12", c12)
        object.__setattr__(self, "c22", c22)

    @classmethod
    def from_covariance(cls, cov, d1: int) -> "GaussianJoint":
        C = np.asarray(cov, dtype=float)
        return cls(C[:d1, :d1], C[:d1, d1:], C[d1:, d1:])

    @property
    def d1(self) -> int:
        return self.c11.shape[0]

    @property
    def d2(self) -> int:
        return self.c22.shape[0]
