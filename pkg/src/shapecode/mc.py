"""Monte-Carlo measurements of framed codes and the round-trip test matrix.

Frame i of a run seeded with s draws its k bits from Philox4x64-10 keyed
with s + i: raw 64-bit outputs are unpacked most significant bit first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import PrefixFreeCode
from .framing import CorruptFrameError, FrameConfig, decode_frame, encode_frame
from .mbdist import mb_energy_at_rate

RNG_ALGORITHM = "philox4x64-10; key = seed + frame index; raw uint64 words unpacked MSB first"


def frame_bits(seed: int, frame: int, k: int) -> np.ndarray:
    gen = np.random.Philox(key=seed + frame)
    raw = gen.random_raw(-(-k // 64)).astype(">u8")
    return np.unpackbits(raw.view(np.uint8))[:k]


@dataclass
class McResult:
    frames: int
    seed: int
    mean_energy: float
    gap_db: float
    switch_hist: np.ndarray
    end_hist: np.ndarray
    total_energy: int
    rng: str = RNG_ALGORITHM

    @property
    def switch_fraction(self) -> float:
        return float(self.switch_hist.sum() / self.frames)

    def median_switch(self) -> float | None:
        if self.switch_hist.sum() == 0:
            return None
        cdf = np.cumsum(self.switch_hist)
        return float(np.searchsorted(cdf, cdf[-1] / 2.0))

    def summary(self) -> dict:
        return {
            "rng": self.rng,
            "seed": self.seed,
            "frames": self.frames,
            "mean_energy": self.mean_energy,
            "gap_db": self.gap_db,
            "switched_frames": int(self.switch_hist.sum()),
            "terminated_frames": int(self.end_hist.sum()),
        }


def mc_energy(config: FrameConfig, frames: int, seed: int = 0) -> McResult:
    if frames < 1:
        raise ValueError(f"need at least one frame, got {frames}")
    n, k = config.n, config.k
    total = 0
    switch_hist = np.zeros(n + 1, dtype=np.int64)
    end_hist = np.zeros(n + 1, dtype=np.int64)
    for i in range(frames):
        symbols, tr = encode_frame(config, frame_bits(seed, i, k), trace=True)
        s = symbols.astype(np.int64)
        total += int(s @ s)
        if tr.switch_symbol is not None:
            switch_hist[tr.switch_symbol] += 1
        if tr.c1_end_symbol is not None:
            end_hist[tr.c1_end_symbol] += 1
    # integer energies: the sum is exact regardless of frame order
    mean = total / (n * frames)
    gap = 10.0 * math.log10(mean / mb_energy_at_rate(config.c1.alphabet, k / n))
    return McResult(frames, seed, mean, gap, switch_hist, end_hist, total)


class RoundtripError(AssertionError):
    def __init__(self, failure: "Failure"):
        super().__init__(str(failure))
        self.failure = failure


@dataclass(frozen=True)
class Failure:
    code_index: int
    k: int
    n: int
    seed: int
    frame: int | str
    reason: str


def check_frame(config: FrameConfig, bits, symbols=None) -> str | None:
    """Reason string if encode/decode of ``bits`` misbehaves, else None.

    ``symbols`` replaces the encoder output, e.g. to inject channel damage.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    try:
        enc, tr_enc = encode_frame(config, bits, trace=True)
    except AssertionError as exc:
        return f"encoder: {exc}"
    if len(enc) != config.n:
        return f"frame has {len(enc)} symbols, expected {config.n}"
    frame = enc if symbols is None else np.asarray(symbols)
    try:
        dec, tr_dec = decode_frame(config, frame, trace=True)
    except CorruptFrameError as exc:
        return f"decoder: {exc}"
    if len(dec) != config.k:
        return f"decoded {len(dec)} bits, expected {config.k}"
    if not np.array_equal(dec, bits):
        return "decoded bits differ"
    if symbols is None and tr_enc.steps != tr_dec.steps:
        return "encoder and decoder word boundaries differ"
    return None


def directed_vectors(k: int) -> dict[str, np.ndarray]:
    alt = np.arange(k, dtype=np.uint8) % 2
    return {
        "zeros": np.zeros(k, dtype=np.uint8),
        "ones": np.ones(k, dtype=np.uint8),
        "alt01": alt,
        "alt10": 1 - alt,
    }


@dataclass
class RoundtripReport:
    cells: int = 0
    frames: int = 0
    failures: list[Failure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def roundtrip_matrix(codes: Sequence[PrefixFreeCode], shapes: Sequence[tuple[int, int]],
                     frames: int = 100, seed: int = 0, abort: bool = True) -> RoundtripReport:
    """Encode and decode random plus directed frames for every (code, k, n).

    With ``abort`` the first failure raises :class:`RoundtripError` carrying
    the (code, k, n, seed, frame) needed to replay it.
    """
    report = RoundtripReport()
    for ci, code in enumerate(codes):
        for k, n in shapes:
            config = FrameConfig(k, n, code)
            report.cells += 1
            cases = [(i, frame_bits(seed, i, k)) for i in range(frames)]
            cases += list(directed_vectors(k).items())
            for label, bits in cases:
                reason = check_frame(config, bits)
                report.frames += 1
                if reason is not None:
                    failure = Failure(ci, k, n, seed, label, reason)
                    if abort:
                        raise RoundtripError(failure)
                    report.failures.append(failure)
    return report
