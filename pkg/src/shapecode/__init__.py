"""Prefix-free code distribution matching for M-ASK constellation shaping."""

__version__ = "0.1.0"

from .core import (
    AskAlphabet,
    CodeMetrics,
    PrefixFreeCode,
    canonical_table1c,
    code_metrics,
    uniform_code,
    validate_code,
)
from .framing import FrameConfig, decode_frame, encode_frame
from .mbdist import energy_gap_db, lambda_for_rate, mb_codeword_pmf, mb_scalar

__all__ = [
    "AskAlphabet",
    "CodeMetrics",
    "FrameConfig",
    "PrefixFreeCode",
    "canonical_table1c",
    "code_metrics",
    "decode_frame",
    "encode_frame",
    "energy_gap_db",
    "lambda_for_rate",
    "mb_codeword_pmf",
    "mb_scalar",
    "uniform_code",
    "validate_code",
]
