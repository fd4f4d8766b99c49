"""
Agent messages, server estimates and their byte-level serialization.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Tuple

import numpy as np
import structlog

from core.errors import FrameError
from quantize.frame import HEADER_BYTES, FrameKind, frame_overhead_bits, pack_frame, unpack_frame
from quantize.matrix_codec import CodecReport, QuantizedMatrix

logger = structlog.get_logger(__name__)

MessageKind = FrameKind


@dataclass(frozen=True)
class AgentMessage:
    """One agent's message: an error signal or an ordered tuple of quantized sections."""
    agent_id: int
    kind: MessageKind
    sections: Tuple[QuantizedMatrix, ...] = ()
    reports: Tuple[CodecReport, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", MessageKind(self.kind))
        object.__setattr__(self, "sections", tuple(self.sections))
        if self.kind == MessageKind.ERROR and self.sections:
            raise FrameError("an error message carries no payload")

    @classmethod
    def error(cls, agent_id: int) -> "AgentMessage":
        return cls(agent_id=agent_id, kind=MessageKind.ERROR)

    @classmethod
    def payload(cls, agent_id: int, sections, reports=()) -> "AgentMessage":
        return cls(agent_id=agent_id, kind=MessageKind.PAYLOAD,
                   sections=tuple(sections), reports=tuple(reports))

    @property
    def is_error(self) -> bool:
        return self.kind == MessageKind.ERROR

    @property
    def bits_used(self) -> int:
        """Code bits only; framing is accounted separately."""
        return sum(q.bits_used for q in self.sections)


@dataclass(frozen=True)
class ServerEstimate:
    """Server output: full estimate, its cross block, error flag and bits received."""
    c_hat: np.ndarray
    c12_hat: np.ndarray
    error_triggered: bool
    bits_total: int
    bits: Tuple[int, ...] = ()


def message_overhead_bits(message: AgentMessage) -> int:
    """Header, section headers and padding: frame bits that are not code bits."""
    if message.is_error:
        return 8 * HEADER_BYTES
    return frame_overhead_bits(message.sections)


def serialize_payload(message: AgentMessage) -> bytes:
    frame = pack_frame(message.agent_id, message.kind, message.sections)
    logger.debug("frame_serialized", agent_id=message.agent_id, kind=message.kind.name,
                 code_bits=message.bits_used, overhead_bits=message_overhead_bits(message))
    return frame


def deserialize_payload(buf: bytes) -> AgentMessage:
    agent_id, kind, sections = unpack_frame(buf)
    return AgentMessage(agent_id=agent_id, kind=kind, sections=sections)


def zero_estimate(d1: int, d2: int, bits: Tuple[int, ...] = ()) -> ServerEstimate:
    d = d1 + d2
    return ServerEstimate(
        c_hat=np.zeros((d, d)),
        c12_hat=np.zeros((d1, d2)),
        error_triggered=True,
        bits_total=int(sum(bits)),
        bits=tuple(bits),
    )


def write_frames(messages, directory, prefix: str = "msg") -> None:
    """Write each message's frame to `directory` for byte-level inspection."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for index, message in enumerate(messages):
        if message is None:
            continue
        (out / f"{prefix}_{index:03d}_agent{message.agent_id}.bin").write_bytes(serialize_payload(message))
