"""
Interactive cross-covariance estimation over a shared board.

Round 1: Alice stays silent and Bob posts his quantized first n samples.
Round 2: Alice estimates C12 against her raw samples, clips it to the
operator-norm ball of radius sigma^2 and broadcasts it quantized at eps/2,
so both parties end up holding the same estimate.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import structlog

from core.covariance import SampleMatrix, operator_norm
from core.errors import InvalidInputError
from core.models import NormKind
from quantize.matrix_codec import MatrixGrid, decode_on_grid, matrix_uniform_encode
from .messages import AgentMessage, serialize_payload
from .params import SchemeParamsTwoAgent, two_agent_params
from .two_agent import split_budget, two_agent_encode

logger = structlog.get_logger(__name__)

ALICE = 1
BOB = 2
# Alice's own budget is unconstrained
UNLIMITED_BITS = 2 ** 62


@dataclass(frozen=True)
class BoardEntry:
    round: int
    author: str
    bits: int
    frame: bytes = b""


@dataclass(frozen=True)
class InteractiveResult:
    """Shared estimate of C12 (None on error) plus the board transcript."""
    c12_hat: Optional[np.ndarray]
    error_triggered: bool
    transcript_bits: int
    entries: List[BoardEntry] = field(default_factory=list)
    swapped: bool = False
    params: Optional[SchemeParamsTwoAgent] = None

    @property
    def bits_by_author(self):
        totals = {}
        for entry in self.entries:
            totals[entry.author] = totals.get(entry.author, 0) + entry.bits
        return totals


def clip_operator_norm(M, radius: float) -> np.ndarray:
    """Clip singular values at `radius`."""
    U, s, Vt = np.linalg.svd(np.asarray(M, dtype=float), full_matrices=False)
    return (U * np.minimum(s, radius)) @ Vt


def interactive_run(alice, bob, sigma: float, eps: float,
                    rng: Optional[np.random.Generator] = None,
                    budget_bob: Optional[int] = None,
                    n: Optional[int] = None) -> InteractiveResult:
    """
    Run both rounds. The party with more coordinates plays Alice; the shared
    estimate is always returned as (alice rows) x (bob rows) of the inputs.
    """
    A = alice if isinstance(alice, SampleMatrix) else SampleMatrix(alice)
    B = bob if isinstance(bob, SampleMatrix) else SampleMatrix(bob)
    if A.cols != B.cols:
        raise InvalidInputError(f"sample counts differ: {A.cols} vs {B.cols}")
    if not 0 < eps <= sigma ** 2:
        raise InvalidInputError(f"eps = {eps} must lie in (0, sigma^2 = {sigma ** 2}]")

    swapped = A.rows < B.rows
    if swapped:
        A, B = B, A
    d1, d2 = A.rows, B.rows

    base = two_agent_params(sigma, eps, d1, d2, NormKind.OP, m=A.cols)
    B2 = base.B_min[1] if budget_bob is None else int(budget_bob)
    params = two_agent_params(sigma, eps, d1, d2, NormKind.OP, m=A.cols,
                              budgets=(UNLIMITED_BITS, B2), n=n)

    entries = [BoardEntry(round=1, author="alice", bits=0)]
    message = two_agent_encode(B, params, B2, rng, agent_id=BOB)
    # only the data section goes on the board
    if not message.is_error:
        message = AgentMessage.payload(BOB, message.sections[1:], message.reports[1:])
    entries.append(BoardEntry(round=1, author="bob", bits=message.bits_used,
                              frame=serialize_payload(message)))

    if message.is_error:
        logger.info("interactive_aborted", round=1, author="bob")
        return InteractiveResult(c12_hat=None, error_triggered=True,
                                 transcript_bits=message.bits_used, entries=entries,
                                 swapped=swapped, params=params)

    _, data_bits = split_budget(B2, high_distortion=False)
    grid = MatrixGrid.from_budget(d2, params.n, params.data_radius(d2), data_bits)
    x2_hat = decode_on_grid(message.sections[0], grid)
    c12 = A.head(params.n) @ x2_hat.T / params.n

    radius = sigma ** 2
    if operator_norm(c12) > radius:
        c12 = clip_operator_norm(c12, radius)
    q, report = matrix_uniform_encode(c12, radius, eps / 2)
    broadcast = AgentMessage.payload(ALICE, [q], [report])
    entries.append(BoardEntry(round=2, author="alice", bits=broadcast.bits_used,
                              frame=serialize_payload(broadcast)))

    shared = decode_on_grid(q, MatrixGrid.from_target(d1, d2, radius, eps / 2))
    transcript_bits = sum(entry.bits for entry in entries)
    logger.debug("interactive_complete", d1=d1, d2=d2, n=params.n,
                 bob_bits=message.bits_used, alice_bits=broadcast.bits_used)
    return InteractiveResult(
        c12_hat=shared.T if swapped else shared,
        error_triggered=False,
        transcript_bits=transcript_bits,
        entries=entries,
        swapped=swapped,
        params=params,
    )
