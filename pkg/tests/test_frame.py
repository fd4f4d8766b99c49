import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from structlog.testing import CapturingLogger

from core.errors import FrameError
from protocol.messages import AgentMessage, deserialize_payload, message_overhead_bits, serialize_payload, write_frames
from quantize.frame import HEADER_BYTES, FrameKind, pack_codes, pack_frame, unpack_codes, unpack_frame
from quantize.matrix_codec import QuantizedMatrix, matrix_uniform_encode


def test_error_frame_is_six_bytes():
    frame = serialize_payload(AgentMessage.error(7))
    assert len(frame) == HEADER_BYTES == 6
    assert frame[:2] == struct.pack("<H", 0xDC3E)
    message = deserialize_payload(frame)
    assert message.is_error
    assert message.agent_id == 7
    assert message.bits_used == 0


def test_empty_payload_is_header_only():
    frame = serialize_payload(AgentMessage.payload(1, []))
    assert len(frame) == HEADER_BYTES + 1
    message = deserialize_payload(frame)
    assert message.kind == FrameKind.PAYLOAD
    assert message.sections == ()


def test_empty_section_roundtrip():
    q = QuantizedMatrix(0, 3, 2, np.zeros(0))
    agent_id, kind, sections = unpack_frame(pack_frame(3, FrameKind.PAYLOAD, [q]))
    assert sections == (q,)


def test_codes_pack_msb_first():
    assert pack_codes(np.array([1, 0, 3]), 2) == bytes([0b01001100])
    np.testing.assert_array_equal(unpack_codes(bytes([0b01001100]), 3, 2), [1, 0, 3])


def test_payload_roundtrip(rng):
    A = rng.standard_normal((3, 4))
    q1, _ = matrix_uniform_encode(A / np.linalg.norm(A, 2), 1.0, 0.01)
    q2 = QuantizedMatrix(2, 2, 5, [0, 4, 2, 1])
    message = AgentMessage.payload(12, [q1, q2])
    frame = serialize_payload(message)
    assert deserialize_payload(frame) == message
    assert 8 * len(frame) == message.bits_used + message_overhead_bits(message)


@pytest.mark.parametrize("mutate", [
    lambda f: f[:-1],
    lambda f: f + b"\x00",
    lambda f: b"\x00\x00" + f[2:],
    lambda f: f[:2] + b"\x02" + f[3:],
    lambda f: f[:5] + b"\x09" + f[6:],
    lambda f: f[:3],
])
def test_malformed_frames_are_rejected(mutate):
    frame = serialize_payload(AgentMessage.payload(1, [QuantizedMatrix(1, 3, 5, [1, 2, 3])]))
    with pytest.raises(FrameError):
        deserialize_payload(mutate(frame))


def test_nonzero_padding_and_bad_codes_are_rejected():
    q = QuantizedMatrix(1, 3, 5, [1, 2, 3])
    frame = bytearray(pack_frame(1, FrameKind.PAYLOAD, [q]))
    frame[-1] |= 0x01
    with pytest.raises(FrameError):
        unpack_frame(bytes(frame))

    # alphabet 5 uses 3-bit symbols, so code 7 fits the width but not the alphabet
    bad = bytearray(pack_frame(1, FrameKind.PAYLOAD, [QuantizedMatrix(1, 1, 8, [7])]))
    offset = HEADER_BYTES + 1 + 8
    bad[offset:offset + 4] = struct.pack("<I", 5)
    with pytest.raises(FrameError):
        unpack_frame(bytes(bad))


def test_bit_length_mismatch_is_rejected():
    frame = bytearray(pack_frame(1, FrameKind.PAYLOAD, [QuantizedMatrix(1, 2, 4, [1, 2])]))
    offset = HEADER_BYTES + 1 + 12
    frame[offset:offset + 8] = struct.pack("<Q", 5)
    with pytest.raises(FrameError):
        unpack_frame(bytes(frame))


def test_error_message_cannot_carry_sections():
    with pytest.raises(FrameError):
        AgentMessage(agent_id=1, kind=FrameKind.ERROR, sections=(QuantizedMatrix(1, 1, 2, [0]),))
    with pytest.raises(FrameError):
        pack_frame(70000, FrameKind.ERROR)


def test_write_frames(tmp_path):
    messages = [AgentMessage.error(1), None, AgentMessage.payload(3, [QuantizedMatrix(1, 1, 2, [1])])]
    write_frames(messages, tmp_path / "dump")
    files = sorted(p.name for p in (tmp_path / "dump").iterdir())
    assert files == ["msg_000_agent1.bin", "msg_002_agent3.bin"]
    assert deserialize_payload((tmp_path / "dump" / files[1]).read_bytes()) == messages[2]


@st.composite
def quantized_matrices(draw):
    rows = draw(st.integers(0, 4))
    cols = draw(st.integers(0, 4))
    alphabet = draw(st.integers(2, 2 ** 31))
    codes = draw(st.lists(st.integers(0, alphabet - 1), min_size=rows * cols, max_size=rows * cols))
    return QuantizedMatrix(rows, cols, alphabet, np.array(codes, dtype=np.uint64))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 16 - 1), st.lists(quantized_matrices(), max_size=4))
def test_frame_roundtrip_property(agent_id, sections):
    frame = pack_frame(agent_id, FrameKind.PAYLOAD, sections)
    got_id, kind, got = unpack_frame(frame)
    assert (got_id, kind) == (agent_id, FrameKind.PAYLOAD)
    assert got == tuple(sections)


@pytest.mark.parametrize("message", [
    AgentMessage.error(3),
    AgentMessage.payload(4, [QuantizedMatrix(2, 3, 5, [0, 4, 2, 1, 3, 0]), QuantizedMatrix(1, 1, 2, [1])]),
])
def test_serialization_logs_frame_overhead(monkeypatch, message):
    captured = CapturingLogger()
    monkeypatch.setattr("protocol.messages.logger", captured)
    frame = serialize_payload(message)
    (call,) = captured.calls
    assert call.args == ("frame_serialized",)
    assert call.kwargs["overhead_bits"] == message_overhead_bits(message)
    assert call.kwargs["code_bits"] + call.kwargs["overhead_bits"] == 8 * len(frame)
