"""Non-binary LDPC codes over GF(p) for detecting and correcting errors in
processing-in-memory MAC outputs and stored symbols."""
from .code_builder import (CheckMatrix, CodeParams, GeneratorMatrix, build_check_matrix,
                           build_code, derive_generator, validate_code_pair)
from .codec import MEMORY, PIM, ReceivedWord, encode, is_clean, syndrome
from .codefile import load_code, save_code
from .decoder import BatchDecodeResult, DecodeResult, Decoder, DecoderConfig, decode
from .gfp import FieldSpec

__version__ = "0.1.0"

__all__ = [
    "CheckMatrix", "CodeParams", "GeneratorMatrix", "build_check_matrix", "build_code",
    "derive_generator", "validate_code_pair", "MEMORY", "PIM", "ReceivedWord", "encode",
    "is_clean", "syndrome", "load_code", "save_code", "BatchDecodeResult", "DecodeResult",
    "Decoder", "DecoderConfig", "decode", "FieldSpec",
]
