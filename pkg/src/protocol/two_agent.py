"""
Two-agent distributed covariance estimation.

Each agent observes one block of coordinates. It sends its quantized
self-covariance and its quantized first n samples, each within half of its
budget, or an error signal when either norm exceeds its cap. The server
estimates the cross block from the quantized samples, assembles the full
matrix and projects it onto the PSD cone.
"""

from typing import Optional, Tuple

import numpy as np
import structlog

from core.covariance import SampleMatrix, operator_norm, psd_project
from core.errors import InvalidInputError
from quantize.matrix_codec import MatrixGrid, decode_on_grid, encode_within_budget
from .messages import AgentMessage, ServerEstimate, zero_estimate
from .params import SchemeParamsTwoAgent

logger = structlog.get_logger(__name__)


def _as_samples(samples) -> SampleMatrix:
    return samples if isinstance(samples, SampleMatrix) else SampleMatrix(samples)


def split_budget(budget: int, high_distortion: bool) -> Tuple[int, int]:
    """(self-covariance bits, data bits)."""
    if high_distortion:
        return budget, 0
    half = budget // 2
    return half, half


def two_agent_encode(samples, params: SchemeParamsTwoAgent, budget: int,
                     rng: Optional[np.random.Generator] = None,
                     agent_id: int = 0) -> AgentMessage:
    """
    Encode one agent's samples (d_k x m).

    Returns an error message when ||X X^T / m||_op > 11 sigma^2 or
    ||X[:, :n]||_op >= 6 sigma sqrt(d_k + n). The quantizers are
    deterministic, so `rng` is accepted only for interface symmetry.
    """
    X = _as_samples(samples)
    if X.cols < params.n:
        raise InvalidInputError(f"agent {agent_id} has {X.cols} samples, needs n = {params.n}")
    d_k = X.rows
    selfcov_bits, data_bits = split_budget(int(budget), params.high_distortion)

    selfcov = X.empirical_covariance()
    selfcov_norm = operator_norm(selfcov)
    if selfcov_norm > params.selfcov_radius:
        logger.info("agent_error_signal", agent_id=agent_id, threshold="selfcov",
                    observed=selfcov_norm, limit=params.selfcov_radius)
        return AgentMessage.error(agent_id)

    head = None
    if not params.high_distortion:
        head = X.head(params.n)
        data_norm = operator_norm(head)
        limit = params.data_radius(d_k)
        if data_norm >= limit:
            logger.info("agent_error_signal", agent_id=agent_id, threshold="data",
                        observed=data_norm, limit=limit)
            return AgentMessage.error(agent_id)

    sections, reports = [], []
    q, report, _ = encode_within_budget(selfcov, params.selfcov_radius, selfcov_bits)
    sections.append(q)
    reports.append(report)
    if head is not None:
        q, report, _ = encode_within_budget(head, params.data_radius(d_k), data_bits)
        sections.append(q)
        reports.append(report)

    message = AgentMessage.payload(agent_id, sections, reports)
    assert message.bits_used <= budget, (message.bits_used, budget)
    return message


def _decode_sections(message: AgentMessage, params: SchemeParamsTwoAgent, d_k: int, budget: int):
    selfcov_bits, data_bits = split_budget(budget, params.high_distortion)
    expected = 1 if params.high_distortion else 2
    if len(message.sections) != expected:
        raise InvalidInputError(
            f"agent {message.agent_id} sent {len(message.sections)} sections, expected {expected}"
        )
    grid = MatrixGrid.from_budget(d_k, d_k, params.selfcov_radius, selfcov_bits)
    selfcov = decode_on_grid(message.sections[0], grid)
    data = None
    if not params.high_distortion:
        grid = MatrixGrid.from_budget(d_k, params.n, params.data_radius(d_k), data_bits)
        data = decode_on_grid(message.sections[1], grid)
    return selfcov, data


def two_agent_decode(msg1: AgentMessage, msg2: AgentMessage,
                     params: SchemeParamsTwoAgent) -> ServerEstimate:
    """Assemble the block estimate and project it onto the PSD cone."""
    d1, d2 = params.dims
    bits = (msg1.bits_used, msg2.bits_used)
    if msg1.is_error or msg2.is_error:
        return zero_estimate(d1, d2, bits)

    c11, x1 = _decode_sections(msg1, params, d1, params.budgets[0])
    c22, x2 = _decode_sections(msg2, params, d2, params.budgets[1])

    if params.high_distortion:
        c_hat = np.zeros((d1 + d2, d1 + d2))
        c_hat[:d1, :d1] = psd_project(c11)
        c_hat[d1:, d1:] = psd_project(c22)
        c12 = np.zeros((d1, d2))
    else:
        c12 = x1 @ x2.T / params.n
        c_star = np.block([[c11, c12], [c12.T, c22]])
        c_hat = psd_project(c_star)
        c12 = c_hat[:d1, d1:]

    return ServerEstimate(c_hat=c_hat, c12_hat=c12, error_triggered=False,
                          bits_total=sum(bits), bits=bits)


def plug_in_estimate(x1, x2, n: int) -> np.ndarray:
    """Unquantized counterpart of the server estimate before projection."""
    X1 = _as_samples(x1)
    X2 = _as_samples(x2)
    c12 = X1.head(n) @ X2.head(n).T / n
    return np.block([[X1.empirical_covariance(), c12], [c12.T, X2.empirical_covariance()]])


def run_two_agent(x1, x2, params: SchemeParamsTwoAgent,
                  rng: Optional[np.random.Generator] = None) -> Tuple[ServerEstimate, Tuple[AgentMessage, AgentMessage]]:
    """Encode both agents and decode at the server."""
    msg1 = two_agent_encode(x1, params, params.budgets[0], rng, agent_id=1)
    msg2 = two_agent_encode(x2, params, params.budgets[1], rng, agent_id=2)
    return two_agent_decode(msg1, msg2, params), (msg1, msg2)
