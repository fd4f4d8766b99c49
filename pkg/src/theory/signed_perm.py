"""
E[A^T B A] for A uniform over signed permutation matrices, which equals (Tr(B)/d) I.

With A e_i = s_i e_{pi(i)}, (A^T B A)_ij = s_i s_j B_{pi(i) pi(j)}.
"""

import itertools
import math
from fractions import Fraction
from typing import Optional, Tuple, Union

import numpy as np

from core.errors import InvalidInputError
from core.seeding import make_rng

MAX_EXACT_DIM = 5
MC_BATCH = 10_000


def _is_rational(B: np.ndarray) -> bool:
    return B.dtype == object or np.issubdtype(B.dtype, np.integer)


def _exact(B: np.ndarray) -> np.ndarray:
    d = B.shape[0]
    rational = _is_rational(B)
    # accumulate in exact rationals; floats convert to Fraction without rounding
    B = np.array([[x if isinstance(x, Fraction) else Fraction(int(x)) if rational else Fraction(float(x))
                   for x in row] for row in B], dtype=object)
    total = [[Fraction(0)] * d for _ in range(d)]
    for perm in itertools.permutations(range(d)):
        for signs in itertools.product((1, -1), repeat=d):
            for i in range(d):
                for j in range(d):
                    total[i][j] += signs[i] * signs[j] * B[perm[i], perm[j]]
    count = math.factorial(d) * 2 ** d
    if rational:
        return np.array([[x / count for x in row] for row in total], dtype=object)
    return np.array([[float(x / count) for x in row] for row in total])


def _montecarlo(B: np.ndarray, trials: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    d = B.shape[0]
    rng = make_rng(seed)
    total = np.zeros((d, d))
    total_sq = np.zeros((d, d))
    done = 0
    while done < trials:
        batch = min(MC_BATCH, trials - done)
        perms = np.argsort(rng.random((batch, d)), axis=1)
        signs = rng.choice(np.array([-1.0, 1.0]), size=(batch, d))
        samples = B[perms[:, :, None], perms[:, None, :]] * signs[:, :, None] * signs[:, None, :]
        total += samples.sum(axis=0)
        total_sq += (samples ** 2).sum(axis=0)
        done += batch
    mean = total / trials
    var = np.maximum(total_sq / trials - mean ** 2, 0.0)
    return mean, np.sqrt(var / trials)


def signed_perm_expectation(B, mode: str = "exact", trials: int = 100_000,
                            seed: int = 0, return_stderr: bool = False
                            ) -> Union[np.ndarray, Tuple[np.ndarray, np.ndarray]]:
    """
    Exact enumeration (d <= 5) or Monte Carlo estimate of E[A^T B A].

    Integer or Fraction inputs are averaged in rational arithmetic in exact
    mode and come back as an object array of Fractions.
    """
    B = np.asarray(B)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise InvalidInputError(f"B must be square, got shape {B.shape}")

    if mode == "exact":
        if B.shape[0] > MAX_EXACT_DIM:
            raise InvalidInputError(
                f"exact enumeration supports d <= {MAX_EXACT_DIM}, got d = {B.shape[0]}"
            )
        result = _exact(B)
        stderr = np.zeros(B.shape)
    elif mode == "montecarlo":
        if trials < 1:
            raise InvalidInputError("trials must be positive")
        result, stderr = _montecarlo(B.astype(float), trials, seed)
    else:
        raise InvalidInputError(f"unknown mode {mode!r}; use 'exact' or 'montecarlo'")

    if return_stderr:
        return result, stderr
    return result


def trace_identity(B) -> np.ndarray:
    """(Tr(B)/d) I."""
    B = np.asarray(B, dtype=float)
    d = B.shape[0]
    return np.trace(B) / d * np.eye(d)
