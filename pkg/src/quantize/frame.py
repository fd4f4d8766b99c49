"""
Binary payload frames.

Layout (little-endian integers):

    magic u16 = 0xDC3E | version u8 = 1 | agent_id u16 | kind u8 (0 ERROR, 1 PAYLOAD)
    PAYLOAD only: section_count u8, then per section
        rows u32 | cols u32 | alphabet u32 | bit length u64 | packed code bits

Codes are packed at ceil(log2(alphabet)) bits each, most significant bit first,
and every section is padded with zero bits to a byte boundary.
"""

import struct
from enum import IntEnum
from typing import List, Sequence, Tuple

import numpy as np

from core.errors import FrameError
from .matrix_codec import QuantizedMatrix, symbol_bits

MAGIC = 0xDC3E
VERSION = 1
MAX_SECTIONS = 255

_HEADER = struct.Struct("<HBHB")
_COUNT = struct.Struct("<B")
_SECTION = struct.Struct("<IIIQ")

HEADER_BYTES = _HEADER.size


class FrameKind(IntEnum):
    ERROR = 0
    PAYLOAD = 1


def pack_codes(codes: np.ndarray, width: int) -> bytes:
    """Pack symbols MSB-first at `width` bits each, zero-padded to whole bytes."""
    codes = np.asarray(codes, dtype=np.uint64).reshape(-1)
    if codes.size == 0:
        return b""
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    bits = ((codes[:, None] >> shifts) & np.uint64(1)).astype(np.uint8)
    return np.packbits(bits.reshape(-1), bitorder="big").tobytes()


def unpack_codes(buf: bytes, count: int, width: int) -> np.ndarray:
    if count == 0:
        return np.zeros(0, dtype=np.uint64)
    raw = np.frombuffer(buf, dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="big")
    nbits = count * width
    if np.any(bits[nbits:]):
        raise FrameError("non-zero padding bits")
    weights = np.uint64(1) << np.arange(width - 1, -1, -1, dtype=np.uint64)
    return (bits[:nbits].reshape(count, width).astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)


def pack_frame(agent_id: int, kind: FrameKind, sections: Sequence[QuantizedMatrix] = ()) -> bytes:
    kind = FrameKind(kind)
    if not 0 <= agent_id < 2 ** 16:
        raise FrameError(f"agent_id {agent_id} does not fit in u16")
    header = _HEADER.pack(MAGIC, VERSION, agent_id, int(kind))
    if kind == FrameKind.ERROR:
        if sections:
            raise FrameError("an error frame carries no payload")
        return header

    if len(sections) > MAX_SECTIONS:
        raise FrameError(f"{len(sections)} sections exceed the frame limit of {MAX_SECTIONS}")
    parts = [header, _COUNT.pack(len(sections))]
    for q in sections:
        width = symbol_bits(q.alphabet)
        parts.append(_SECTION.pack(q.rows, q.cols, q.alphabet, q.bits_used))
        parts.append(pack_codes(q.codes, width))
    return b"".join(parts)


def unpack_frame(buf: bytes) -> Tuple[int, FrameKind, Tuple[QuantizedMatrix, ...]]:
    """Parse a frame into (agent_id, kind, sections); rejects anything malformed."""
    buf = bytes(buf)
    if len(buf) < HEADER_BYTES:
        raise FrameError(f"truncated header: {len(buf)} bytes")
    magic, version, agent_id, kind = _HEADER.unpack_from(buf, 0)
    if magic != MAGIC:
        raise FrameError(f"bad magic 0x{magic:04X}")
    if version != VERSION:
        raise FrameError(f"unsupported frame version {version}")
    try:
        kind = FrameKind(kind)
    except ValueError as e:
        raise FrameError(f"unknown frame kind {kind}") from e

    offset = HEADER_BYTES
    if kind == FrameKind.ERROR:
        if len(buf) != offset:
            raise FrameError("trailing bytes after error frame")
        return agent_id, kind, ()

    if len(buf) < offset + _COUNT.size:
        raise FrameError("truncated section count")
    (count,) = _COUNT.unpack_from(buf, offset)
    offset += _COUNT.size

    sections: List[QuantizedMatrix] = []
    for index in range(count):
        if len(buf) < offset + _SECTION.size:
            raise FrameError(f"truncated header of section {index}")
        rows, cols, alphabet, bitlen = _SECTION.unpack_from(buf, offset)
        offset += _SECTION.size
        if alphabet < 2:
            raise FrameError(f"section {index}: alphabet {alphabet} < 2")
        width = symbol_bits(alphabet)
        entries = rows * cols
        if bitlen != entries * width:
            raise FrameError(
                f"section {index}: bit length {bitlen} != {entries} symbols x {width} bits"
            )
        nbytes = (bitlen + 7) // 8
        if len(buf) < offset + nbytes:
            raise FrameError(f"truncated codes of section {index}")
        codes = unpack_codes(buf[offset:offset + nbytes], entries, width)
        offset += nbytes
        if entries and int(codes.max()) >= alphabet:
            raise FrameError(f"section {index}: code outside alphabet {alphabet}")
        sections.append(QuantizedMatrix(rows, cols, alphabet, codes))

    if offset != len(buf):
        raise FrameError(f"{len(buf) - offset} trailing bytes after payload")
    return agent_id, kind, tuple(sections)


def frame_overhead_bits(sections: Sequence[QuantizedMatrix]) -> int:
    """Header and padding bits of a payload frame, beyond the code bits."""
    total = 8 * (HEADER_BYTES + _COUNT.size)
    for q in sections:
        total += 8 * _SECTION.size + (-q.bits_used) % 8
    return total
