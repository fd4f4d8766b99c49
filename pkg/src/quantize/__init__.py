"""Bit-exact codecs: dithered scalar quantizer, entrywise matrix codec, bit bounds and frames."""

from .bounds import net_bits_theoretical, net_eps_for_budget, packing_log_lower
from .dither import ScalarDitherConfig, dither_decode, dither_decode_array, dither_encode, dither_encode_array
from .frame import FrameKind, pack_frame, unpack_frame
from .matrix_codec import (
    CodecReport,
    MatrixGrid,
    QuantizedMatrix,
    encode_within_budget,
    matrix_uniform_decode,
    matrix_uniform_encode,
)

__all__ = [
    "CodecReport",
    "FrameKind",
    "MatrixGrid",
    "QuantizedMatrix",
    "ScalarDitherConfig",
    "dither_decode",
    "dither_decode_array",
    "dither_encode",
    "dither_encode_array",
    "encode_within_budget",
    "matrix_uniform_decode",
    "matrix_uniform_encode",
    "net_bits_theoretical",
    "net_eps_for_budget",
    "packing_log_lower",
    "pack_frame",
    "unpack_frame",
]
