"""
Monte Carlo checks of the concentration inequalities behind the protocols.

Each validator draws its trials in fixed-size chunks, every chunk seeded by
derive_seed(seed, chunk_index), and compares empirical tail frequencies or
moments with the analytical bound. A grid point passes when
empirical <= bound + 3 * stderr; probability bounds are clamped to 1 and the
raw value is reported alongside.
"""

import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import structlog

from core.errors import InvalidInputError
from core.models import SourceFamily, ValidationReport
from core.seeding import derive_seed, make_rng

logger = structlog.get_logger(__name__)

SLACK_STDERR = 3.0
DEFAULT_CHUNK = 1000
MIN_TRIALS = 1000


def _draw(rng: np.random.Generator, shape, sigma: float, source: SourceFamily) -> np.ndarray:
    """Coordinates with sub-Gaussian parameter sigma and variance sigma^2."""
    if source == SourceFamily.GAUSSIAN:
        return sigma * rng.standard_normal(shape)
    if source == SourceFamily.SCALED_RADEMACHER:
        return sigma * rng.choice(np.array([-1.0, 1.0]), size=shape)
    raise InvalidInputError(f"validators support gaussian and scaled_rademacher sources, not {source}")


def run_chunked(trials: int, seed: int, draw: Callable[[np.random.Generator, int], np.ndarray],
                chunk_size: int = DEFAULT_CHUNK) -> np.ndarray:
    """Concatenate per-trial statistics from seeded chunks, in chunk order."""
    if trials < 1:
        raise InvalidInputError("trials must be positive")
    out = []
    for chunk, start in enumerate(range(0, trials, chunk_size)):
        batch = min(chunk_size, trials - start)
        out.append(np.asarray(draw(make_rng(derive_seed(seed, chunk)), batch)))
    return np.concatenate(out, axis=0)


def _frequency(events: np.ndarray):
    p = float(np.mean(events))
    return p, math.sqrt(p * (1 - p) / events.shape[0])


def _mean(values: np.ndarray):
    mean = float(np.mean(values))
    if values.shape[0] < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(values.shape[0]))


def _report(name: str, grid: Sequence[float], empirical: List[float], stderr: List[float],
            raw_bound: List[float], probability: Sequence[bool], trials: int, seed: int,
            parameters: Dict, labels: Optional[List[str]] = None) -> ValidationReport:
    bound = [min(1.0, b) if is_prob else b for b, is_prob in zip(raw_bound, probability)]
    passed = all(e <= b + SLACK_STDERR * s for e, b, s in zip(empirical, bound, stderr))
    report = ValidationReport(
        name=name, grid=[float(g) for g in grid], labels=labels or [],
        empirical=empirical, stderr=stderr, bound=bound, raw_bound=raw_bound,
        passed=passed, trials=trials, seed=seed, parameters=parameters,
    )
    log = logger.info if passed else logger.warning
    log("validator_finished", validator=name, passed=passed, trials=trials, seed=seed)
    return report


def _check_trials(trials: int):
    if trials < MIN_TRIALS:
        raise InvalidInputError(f"validators need at least {MIN_TRIALS} trials, got {trials}")


def _correlated_pairs(rng, batch: int, m: int, d1: int, d2: int, sigma1: float, sigma2: float,
                      rho: float, source: SourceFamily):
    """X ~ sigma1 * noise; Y = sigma2 * (rho * P X / sigma1 + sqrt(1 - rho^2) * noise)."""
    X = _draw(rng, (batch, m, d1), 1.0, source)
    W = _draw(rng, (batch, m, d2), 1.0, source)
    k = min(d1, d2)
    Y = math.sqrt(1 - rho ** 2) * W
    Y[:, :, :k] += rho * X[:, :, :k]
    return sigma1 * X, sigma2 * Y


def _cross_truth(d1: int, d2: int, sigma1: float, sigma2: float, rho: float) -> np.ndarray:
    C = np.zeros((d1, d2))
    k = min(d1, d2)
    C[:k, :k] = rho * sigma1 * sigma2 * np.eye(k)
    return C


def validate_cov_tail(d1: int = 2, d2: int = 2, m: int = 100, sigma1: float = 1.0,
                      sigma2: float = 1.0, t_grid: Sequence[float] = (0.5, 1.0, 2.0),
                      trials: int = 10_000, seed: int = 0, rho: float = 0.5,
                      source: SourceFamily = SourceFamily.GAUSSIAN,
                      chunk_size: int = DEFAULT_CHUNK) -> ValidationReport:
    """P[||C~_XY - C_XY||_op >= 10 s1 s2 t] <= 9^(d1+d2) exp(-m min(t, t^2))."""
    _check_trials(trials)
    if not 0 <= rho <= 1:
        raise InvalidInputError("rho must lie in [0, 1]")
    truth = _cross_truth(d1, d2, sigma1, sigma2, rho)

    def draw(rng, batch):
        X, Y = _correlated_pairs(rng, batch, m, d1, d2, sigma1, sigma2, rho, source)
        C = np.einsum("bmi,bmj->bij", X, Y) / m
        return np.linalg.norm(C - truth, ord=2, axis=(1, 2))

    norms = run_chunked(trials, seed, draw, chunk_size)
    empirical, stderr, raw = [], [], []
    for t in t_grid:
        p, s = _frequency(norms >= 10 * sigma1 * sigma2 * t)
        empirical.append(p)
        stderr.append(s)
        raw.append(math.exp((d1 + d2) * math.log(9) - m * min(t, t * t)))
    return _report("cov_tail", t_grid, empirical, stderr, raw, [True] * len(t_grid), trials, seed,
                   dict(d1=d1, d2=d2, m=m, sigma1=sigma1, sigma2=sigma2, rho=rho, source=SourceFamily(source).value))


def validate_selfcov_norm_tail(d1: int = 2, d2: int = 2, m_grid: Sequence[int] = (8, 16, 32),
                               sigma1: float = 1.0, sigma2: float = 1.0,
                               trials: int = 10_000, seed: int = 0, rho: float = 0.5,
                               source: SourceFamily = SourceFamily.GAUSSIAN,
                               chunk_size: int = DEFAULT_CHUNK) -> ValidationReport:
    """P[||C~_XY||_op >= 11 s1 s2] <= exp(3(d1 + d2) - m), over a grid of m."""
    _check_trials(trials)
    empirical, stderr, raw = [], [], []
    for index, m in enumerate(m_grid):
        def draw(rng, batch, m=m):
            X, Y = _correlated_pairs(rng, batch, m, d1, d2, sigma1, sigma2, rho, source)
            return np.linalg.norm(np.einsum("bmi,bmj->bij", X, Y) / m, ord=2, axis=(1, 2))

        norms = run_chunked(trials, derive_seed(seed, index), draw, chunk_size)
        p, s = _frequency(norms >= 11 * sigma1 * sigma2)
        empirical.append(p)
        stderr.append(s)
        raw.append(math.exp(min(3 * (d1 + d2) - m, 700)))
    return _report("selfcov_norm_tail", m_grid, empirical, stderr, raw, [True] * len(m_grid), trials, seed,
                   dict(d1=d1, d2=d2, sigma1=sigma1, sigma2=sigma2, rho=rho, source=SourceFamily(source).value))


def validate_opnorm_tail(d: int = 4, n: int = 4, sigma: float = 1.0,
                         trials: int = 10_000, seed: int = 0,
                         source: SourceFamily = SourceFamily.GAUSSIAN,
                         chunk_size: int = DEFAULT_CHUNK) -> ValidationReport:
    """
    For A (d x n) with independent sigma-sub-Gaussian columns:
    P[||A||_op >= 6 sigma sqrt(d+n)] <= exp(-2(d+n)), E||A||_op <= 9 sigma sqrt(d+n),
    E||A||_op^2 <= 36 sigma^2 (d+n).
    """
    _check_trials(trials)
    if sigma < 0:
        raise InvalidInputError("sigma must be non-negative")

    def draw(rng, batch):
        A = _draw(rng, (batch, d, n), sigma, source)
        return np.linalg.norm(A, ord=2, axis=(1, 2))

    norms = run_chunked(trials, seed, draw, chunk_size)
    threshold = 6 * sigma * math.sqrt(d + n)
    # a zero threshold (sigma = 0) must not count the trivial event 0 >= 0
    tail, tail_se = _frequency((norms >= threshold) & (norms > 0))
    mean, mean_se = _mean(norms)
    second, second_se = _mean(norms ** 2)
    return _report(
        "opnorm_tail", [threshold, 1.0, 2.0],
        [tail, mean, second], [tail_se, mean_se, second_se],
        [math.exp(-2 * (d + n)), 9 * sigma * math.sqrt(d + n), 36 * sigma ** 2 * (d + n)],
        [True, False, False], trials, seed,
        dict(d=d, n=n, sigma=sigma, source=SourceFamily(source).value),
        labels=["tail", "mean", "second_moment"],
    )


def _centered_products(rng, shape, sigma1: float, sigma2: float) -> np.ndarray:
    return sigma1 * sigma2 * rng.standard_normal(shape) * rng.standard_normal(shape)


def validate_subgamma_mgf(sigma1: float = 1.0, sigma2: float = 1.0,
                          lambda_grid: Sequence[float] = (-0.3, -0.1, 0.0, 0.1, 0.3),
                          trials: int = 10_000, seed: int = 0,
                          chunk_size: int = DEFAULT_CHUNK) -> ValidationReport:
    """E exp(lambda Z) <= exp(25 lambda^2 s^2 / (2 (1 - 2.5 |lambda| s))), Z = XY - E[XY], s = s1 s2."""
    _check_trials(trials)
    s = sigma1 * sigma2
    for lam in lambda_grid:
        if abs(lam) * 2.5 * s >= 1:
            raise InvalidInputError(f"|lambda| = {abs(lam)} must be below 1 / (2.5 s1 s2)")

    Z = run_chunked(trials, seed, lambda rng, batch: _centered_products(rng, batch, sigma1, sigma2), chunk_size)
    empirical, stderr, raw = [], [], []
    for lam in lambda_grid:
        mean, se = _mean(np.exp(lam * Z))
        empirical.append(mean)
        stderr.append(se)
        raw.append(math.exp(25 * lam ** 2 * s ** 2 / (2 * (1 - 2.5 * abs(lam) * s))))
    return _report("subgamma_mgf", lambda_grid, empirical, stderr, raw, [False] * len(lambda_grid),
                   trials, seed, dict(sigma1=sigma1, sigma2=sigma2))


def validate_subgamma_tail(sigma1: float = 1.0, sigma2: float = 1.0,
                           t_grid: Sequence[float] = (0.0, 1.0, 2.0, 5.0, 10.0),
                           trials: int = 10_000, seed: int = 0,
                           chunk_size: int = DEFAULT_CHUNK) -> ValidationReport:
    """P[Z >= t] <= exp(-t^2 / (2 (v^2 + a t))) with (v, a) = (5 s1 s2, 2.5 s1 s2)."""
    _check_trials(trials)
    v, a = 5 * sigma1 * sigma2, 2.5 * sigma1 * sigma2
    Z = run_chunked(trials, seed, lambda rng, batch: _centered_products(rng, batch, sigma1, sigma2), chunk_size)
    empirical, stderr, raw = [], [], []
    for t in t_grid:
        p, se = _frequency(Z >= t)
        empirical.append(p)
        stderr.append(se)
        raw.append(math.exp(-t * t / (2 * (v * v + a * t))) if v > 0 else float(t <= 0))
    return _report("subgamma_tail", t_grid, empirical, stderr, raw, [True] * len(t_grid),
                   trials, seed, dict(sigma1=sigma1, sigma2=sigma2))


def validate_sum_tail(sigma1: float = 1.0, sigma2: float = 1.0, m: int = 50,
                      t_grid: Sequence[float] = (0.0, 0.1, 0.25, 0.5),
                      trials: int = 10_000, seed: int = 0,
                      chunk_size: int = DEFAULT_CHUNK) -> ValidationReport:
    """P[(1/m) sum Z_i >= 10 s1 s2 t] <= exp(-m min(t, t^2))."""
    _check_trials(trials)
    means = run_chunked(
        trials, seed,
        lambda rng, batch: _centered_products(rng, (batch, m), sigma1, sigma2).mean(axis=1),
        chunk_size,
    )
    empirical, stderr, raw = [], [], []
    for t in t_grid:
        p, se = _frequency(means >= 10 * sigma1 * sigma2 * t)
        empirical.append(p)
        stderr.append(se)
        raw.append(math.exp(-m * min(t, t * t)))
    return _report("sum_tail", t_grid, empirical, stderr, raw, [True] * len(t_grid),
                   trials, seed, dict(sigma1=sigma1, sigma2=sigma2, m=m))


def validate_max_inequality(sigma: float = 1.0, alpha: float = 1.0,
                            n_grid: Sequence[int] = (1, 16, 1024),
                            trials: int = 10_000, seed: int = 0,
                            chunk_size: int = DEFAULT_CHUNK) -> ValidationReport:
    """
    E[max_i X_i] <= sigma sqrt(2 ln n) + alpha ln n for n sub-Gamma(sigma, alpha) variables.

    The variables are centred Gaussian products s * g * h with s = min(sigma/5, alpha/2.5),
    which are sub-Gamma(5s, 2.5s) and hence sub-Gamma(sigma, alpha). With alpha = 0
    they are N(0, sigma^2) instead.
    """
    _check_trials(trials)
    if sigma < 0 or alpha < 0:
        raise InvalidInputError("sigma and alpha must be non-negative")

    def variables(rng, shape):
        if alpha == 0:
            return sigma * rng.standard_normal(shape)
        s = min(sigma / 5, alpha / 2.5)
        return s * rng.standard_normal(shape) * rng.standard_normal(shape)

    empirical, stderr, raw = [], [], []
    for index, n in enumerate(n_grid):
        if n < 1:
            raise InvalidInputError("n must be positive")
        maxima = run_chunked(trials, derive_seed(seed, index),
                             lambda rng, batch, n=n: variables(rng, (batch, n)).max(axis=1),
                             chunk_size)
        mean, se = _mean(maxima)
        empirical.append(mean)
        stderr.append(se)
        raw.append(sigma * math.sqrt(2 * math.log(n)) + alpha * math.log(n))
    return _report("max_inequality", n_grid, empirical, stderr, raw, [False] * len(n_grid),
                   trials, seed, dict(sigma=sigma, alpha=alpha))
