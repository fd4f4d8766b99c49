"""
Contraction coefficients of Gaussian mixture channels.

For Y = A_V X + Z_V the conditional SDPI coefficient has the closed form
||E_V[A_V^T A_V]||_op.
"""

from typing import Tuple

import numpy as np
from scipy import linalg as sla

from core.covariance import operator_norm
from core.errors import InvalidInputError
from .channels import MixtureChannel, expected_gram

PROB_TOL = 1e-12


def csdpi_mixture(channel: MixtureChannel) -> float:
    """||sum_v p_v A_v^T A_v||_op."""
    return float(np.max(sla.eigvalsh(expected_gram(channel)), initial=0.0))


def csdpi_naive_upper(channel: MixtureChannel) -> float:
    """sum_v p_v ||A_v^T A_v||_op, the bound obtained by moving the norm inside the average."""
    return float(sum(p * operator_norm(A) ** 2 for A, p in channel.states))


def mean_shift_ratio(channel: MixtureChannel, mu) -> float:
    """Rayleigh quotient mu^T E[A^T A] mu / ||mu||^2 of a shifted Gaussian input."""
    mu = np.asarray(mu, dtype=float).reshape(-1)
    if mu.shape[0] != channel.d_x:
        raise InvalidInputError(f"mu has length {mu.shape[0]}, channel input is {channel.d_x}")
    norm_sq = float(mu @ mu)
    if norm_sq == 0.0:
        raise InvalidInputError("mu must be non-zero")
    return float(mu @ expected_gram(channel) @ mu) / norm_sq


def top_direction(channel: MixtureChannel) -> np.ndarray:
    """Unit input direction attaining csdpi_mixture."""
    w, V = sla.eigh(expected_gram(channel))
    return V[:, int(np.argmax(w))]


def product_channel(ch1: MixtureChannel, ch2: MixtureChannel) -> MixtureChannel:
    """Pair states by index: A_v = diag(A1_v, A2_v) under a shared state V."""
    if len(ch1.states) != len(ch2.states):
        raise InvalidInputError(
            f"state counts differ: {len(ch1.states)} vs {len(ch2.states)}"
        )
    if np.max(np.abs(ch1.probabilities - ch2.probabilities)) > PROB_TOL:
        raise InvalidInputError("paired states must have identical probabilities")
    return MixtureChannel(tuple(
        (sla.block_diag(A1, A2), p1)
        for (A1, p1), (A2, _) in zip(ch1.states, ch2.states)
    ))


def csdpi_product(ch1: MixtureChannel, ch2: MixtureChannel) -> Tuple[MixtureChannel, float]:
    product = product_channel(ch1, ch2)
    return product, csdpi_mixture(product)
