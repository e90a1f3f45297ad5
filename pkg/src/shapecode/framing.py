"""Fixed-length framing of a variable-length prefix-free code.

Every frame carries exactly k bits in exactly n symbols.  Encoding starts
with the shaping code C1 and switches to the uniform code C2 as soon as the
pessimistic test

    n - emitted - lmax(X1)  >=  ceil(max(0, k - consumed - lmin(B1)) / log2 M)

fails.  The test only uses counters the decoder also has before it reads
the next word, so both sides switch at the same word boundary.  Unused
slots are filled with amplitude 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import PrefixFreeCode, code_metrics, uniform_code, validate_code

_ZERO = ord("0")


class FrameConfigError(ValueError):
    pass


class CorruptFrameError(ValueError):
    """No codeword matches while parsing a frame: the frame was damaged."""


def _sym_key(x: Sequence[int]) -> str:
    # one character per symbol: amplitude 2i+1 -> chr('0' + i)
    return "".join(chr(_ZERO + (s - 1) // 2) for s in x)


@dataclass
class FrameConfig:
    k: int
    n: int
    c1: PrefixFreeCode
    c2: PrefixFreeCode | None = None
    _enc: dict = field(init=False, repr=False)
    _dec: dict = field(init=False, repr=False)

    def __post_init__(self):
        M = self.c1.alphabet.M
        if self.c2 is None:
            self.c2 = uniform_code(M)
        if self.k < 1 or self.n < 1:
            raise FrameConfigError(f"k and n must be positive, got k={self.k}, n={self.n}")
        for name, code in (("C1", self.c1), ("C2", self.c2)):
            report = validate_code(code)
            if not report.ok:
                raise FrameConfigError(f"{name} is not a valid prefix-free code: {report.problems}")
        if self.c2.alphabet != self.c1.alphabet or self.c2.entries != uniform_code(M).entries:
            raise FrameConfigError("C2 must be the lexicographic uniform map of the C1 alphabet")
        self.bits_per_symbol = int(math.log2(M))
        self.rate_c1 = code_metrics(self.c1).resolution_rate
        if not self.k < self.n * self.bits_per_symbol:
            raise FrameConfigError(f"k/n = {self.k}/{self.n} must be below R_C2 = {self.bits_per_symbol}")
        self.lmax_x = self.c1.max_code_length
        self.lmin_b = self.c1.min_info_length
        self._enc = {b: _sym_key(x) for b, x in self.c1.entries}
        self._dec = {_sym_key(x): b for b, x in self.c1.entries}
        self._b_lengths = sorted({len(b) for b in self._enc})
        self._x_lengths = sorted({len(x) for x in self._dec})

    @property
    def M(self) -> int:
        return self.c1.alphabet.M

    @property
    def frame_rate(self) -> float:
        return self.k / self.n

    def keep_c1(self, bits_consumed: int, symbols_emitted: int) -> bool:
        available = self.n - symbols_emitted - self.lmax_x
        pending = max(0, self.k - bits_consumed - self.lmin_b)
        return available >= -(-pending // self.bits_per_symbol)


@dataclass
class FramingState:
    bits_consumed: int = 0
    symbols_emitted: int = 0
    active: str = "C1"
    switched: bool = False
    terminated: bool = False


def switch_check(state: FramingState, config: FrameConfig) -> bool:
    """True while C1 may encode the next word."""
    return config.keep_c1(state.bits_consumed, state.symbols_emitted)


def _as_bit_string(bits) -> str:
    if isinstance(bits, str):
        return bits
    arr = np.asarray(bits, dtype=np.uint8)
    return (arr + _ZERO).tobytes().decode("ascii")


def _first_extension(config: FrameConfig, partial: str) -> str:
    # lexicographically first dictionary word starting with the leftover bits
    word = partial
    while word not in config._enc:
        word += "0"
    return word


@dataclass
class FrameTrace:
    """Word boundaries as (code, bits, symbols) plus the switch point."""

    steps: list[tuple[str, int, int]] = field(default_factory=list)
    switch_symbol: int | None = None
    c1_end_symbol: int | None = None
    fill: int = 0


def encode_frame(config: FrameConfig, bits, trace: bool = False):
    """Map exactly k bits to exactly n amplitudes (uint8 array)."""
    s = _as_bit_string(bits)
    k, n = config.k, config.n
    if len(s) != k:
        raise ValueError(f"frame needs exactly {k} bits, got {len(s)}")
    enc, lengths = config._enc, config._b_lengths
    st = FramingState()
    out: list[str] = []
    tr = FrameTrace()
    while st.bits_consumed < k:
        if not switch_check(st, config):
            st.active, st.switched = "C2", True
            break
        pos = st.bits_consumed
        for L in lengths:
            word = s[pos : pos + L]
            if len(word) < L:
                word = _first_extension(config, s[pos:])
                break
            if word in enc:
                break
        x = enc[word]
        out.append(x)
        st.bits_consumed += len(word)
        st.symbols_emitted += len(x)
        assert st.symbols_emitted <= n, "frame overflow"
        tr.steps.append(("C1", len(word), len(x)))
    else:
        st.terminated = True
        tr.c1_end_symbol = st.symbols_emitted

    if st.switched:
        tr.switch_symbol = st.symbols_emitted
        w = config.bits_per_symbol
        rest = s[st.bits_consumed :]
        rest += "0" * (-len(rest) % w)
        for i in range(0, len(rest), w):
            out.append(chr(_ZERO + int(rest[i : i + w], 2)))
            tr.steps.append(("C2", w, 1))
        st.symbols_emitted += len(rest) // w
        assert st.symbols_emitted <= n, "frame overflow"

    tr.fill = n - st.symbols_emitted
    body = "".join(out) + "0" * tr.fill
    symbols = (np.frombuffer(body.encode("ascii"), dtype=np.uint8) - _ZERO) * 2 + 1
    symbols = symbols.astype(np.uint8)
    return (symbols, tr) if trace else symbols


def decode_frame(config: FrameConfig, symbols, trace: bool = False):
    """Recover the k bits of a frame produced by :func:`encode_frame`."""
    k, n = config.k, config.n
    arr = np.asarray(symbols)
    if arr.shape != (n,):
        raise ValueError(f"frame needs exactly {n} symbols, got shape {arr.shape}")
    if arr.min() < 1 or arr.max() > 2 * config.M - 1 or np.any(arr % 2 == 0):
        raise CorruptFrameError("frame contains amplitudes outside the alphabet")
    t = (((arr.astype(np.int64) - 1) // 2) + _ZERO).astype(np.uint8).tobytes().decode("ascii")
    dec, lengths = config._dec, config._x_lengths
    st = FramingState()
    out: list[str] = []
    tr = FrameTrace()
    while st.bits_consumed < k:
        if not switch_check(st, config):
            st.active, st.switched = "C2", True
            break
        pos = st.symbols_emitted
        for L in lengths:
            x = t[pos : pos + L]
            if len(x) == L and x in dec:
                break
        else:
            raise CorruptFrameError(f"no codeword matches at symbol {pos}")
        b = dec[x]
        out.append(b[: k - st.bits_consumed])
        st.bits_consumed += len(b)
        st.symbols_emitted += len(x)
        tr.steps.append(("C1", len(b), len(x)))
    else:
        st.terminated = True
        tr.c1_end_symbol = st.symbols_emitted

    if st.switched:
        tr.switch_symbol = st.symbols_emitted
        w = config.bits_per_symbol
        need = -(-(k - st.bits_consumed) // w)
        if st.symbols_emitted + need > n:
            raise CorruptFrameError("frame too short for the uniform tail")
        tail = t[st.symbols_emitted : st.symbols_emitted + need]
        chunk = "".join(format(ord(c) - _ZERO, f"0{w}b") for c in tail)
        out.append(chunk[: k - st.bits_consumed])
        tr.steps.extend(("C2", w, 1) for _ in range(need))
        st.symbols_emitted += need
    tr.fill = n - st.symbols_emitted
    bits = np.frombuffer("".join(out).encode("ascii"), dtype=np.uint8) - _ZERO
    return (bits, tr) if trace else bits


def encode_stream(code: PrefixFreeCode, bits) -> np.ndarray:
    """Unframed encoding; a trailing partial information word is dropped."""
    s = _as_bit_string(bits)
    enc = {b: _sym_key(x) for b, x in code.entries}
    lengths = sorted({len(b) for b in enc})
    out, pos = [], 0
    while True:
        for L in lengths:
            word = s[pos : pos + L]
            if len(word) < L:
                word = None
                break
            if word in enc:
                break
        if word is None:
            break
        out.append(enc[word])
        pos += len(word)
    body = "".join(out)
    return ((np.frombuffer(body.encode("ascii"), dtype=np.uint8) - _ZERO) * 2 + 1).astype(np.uint8)


def pack_bits(bits) -> bytes:
    """Bits to bytes, most significant bit first, zero padded."""
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def unpack_bits(data: bytes, count: int | None = None) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    return bits if count is None else bits[:count]
