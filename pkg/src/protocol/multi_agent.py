"""
Multi-agent distributed covariance estimation with dithered scalar quantization.

An agent holding d_k coordinates acts as d_k virtual agents: each coordinate
of its first n samples is dither-quantized independently. Any sample beyond
the clip radius L makes the agent send an error signal instead.
"""

from typing import List, Optional, Sequence

import numpy as np
import structlog

from core.covariance import SampleMatrix
from core.errors import InvalidInputError
from core.seeding import ensure_rng
from quantize.dither import dither_decode_array, dither_encode_array
from quantize.matrix_codec import QuantizedMatrix
from .messages import AgentMessage, ServerEstimate
from .params import SchemeParamsMulti

logger = structlog.get_logger(__name__)


def multi_agent_encode(samples, params: SchemeParamsMulti,
                       rng: Optional[np.random.Generator] = None,
                       agent_id: int = 0) -> AgentMessage:
    X = samples if isinstance(samples, SampleMatrix) else SampleMatrix(samples)
    if X.cols < params.n:
        raise InvalidInputError(f"agent {agent_id} has {X.cols} samples, needs n = {params.n}")
    head = X.head(params.n)

    peak = float(np.max(np.abs(head)))
    if peak > params.L:
        logger.info("agent_error_signal", agent_id=agent_id, threshold="clip",
                    observed=peak, limit=params.L)
        return AgentMessage.error(agent_id)

    codes = dither_encode_array(head, params.dither, ensure_rng(rng))
    q = QuantizedMatrix(X.rows, params.n, params.dither.alphabet, codes.reshape(-1))
    assert q.bits_used == params.agent_bits(X.rows)
    return AgentMessage.payload(agent_id, [q])


def multi_agent_decode(messages: Sequence[Optional[AgentMessage]],
                       params: SchemeParamsMulti) -> ServerEstimate:
    """Stack the dequantized blocks and return their Gram matrix over n."""
    if any(message is None for message in messages):
        missing = [i for i, message in enumerate(messages) if message is None]
        raise InvalidInputError(f"missing messages from agents {missing}")
    bits = tuple(message.bits_used for message in messages)

    if any(message.is_error for message in messages):
        d = params.d
        return ServerEstimate(c_hat=np.zeros((d, d)), c12_hat=np.zeros((d, 0)),
                              error_triggered=True, bits_total=sum(bits), bits=bits)

    blocks: List[np.ndarray] = []
    for message in messages:
        if len(message.sections) != 1:
            raise InvalidInputError(f"agent {message.agent_id} sent {len(message.sections)} sections, expected 1")
        q = message.sections[0]
        if q.cols != params.n or q.alphabet != params.dither.alphabet:
            raise InvalidInputError(
                f"agent {message.agent_id} payload {q.rows}x{q.cols} / alphabet {q.alphabet} "
                f"does not match n = {params.n}, alphabet = {params.dither.alphabet}"
            )
        blocks.append(dither_decode_array(q.codes, params.dither).reshape(q.rows, q.cols))

    X_hat = np.vstack(blocks)
    if X_hat.shape[0] != params.d:
        raise InvalidInputError(f"agent dimensions sum to {X_hat.shape[0]}, expected d = {params.d}")
    c_hat = X_hat @ X_hat.T / params.n
    c_hat = (c_hat + c_hat.T) / 2
    return ServerEstimate(c_hat=c_hat, c12_hat=c_hat[:, :0], error_triggered=False,
                          bits_total=sum(bits), bits=bits)


def run_multi_agent(samples, agent_dims: Sequence[int], params: SchemeParamsMulti,
                    rng: Optional[np.random.Generator] = None):
    """Split coordinates by agent, encode each block and decode at the server."""
    X = samples if isinstance(samples, SampleMatrix) else SampleMatrix(samples)
    rng = ensure_rng(rng)
    messages = [
        multi_agent_encode(block, params, rng, agent_id=k)
        for k, block in enumerate(X.split(agent_dims))
    ]
    return multi_agent_decode(messages, params), messages
