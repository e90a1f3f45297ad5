"""Alphabets, words and prefix-free codes, plus the two functionals every
builder is judged by: average energy per code symbol and resolution rate.

Information words are ``str`` over ``"01"``; codewords are tuples of odd
amplitudes.  Codes are immutable.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

KINDS = ("V2F", "F2V", "V2V", "UNIFORM")
CODEBOOK_VERSION = 1
EXACT_MAX_ENTRIES = 64


class InvalidCodeError(ValueError):
    """Raised when a code violates a structural requirement."""


@dataclass(frozen=True)
class AskAlphabet:
    """Unipolar M-ASK amplitudes 1, 3, ..., 2M-1."""

    M: int

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 2:
            raise ValueError(f"alphabet size must be an integer >= 2, got {self.M!r}")

    @property
    def amplitudes(self) -> tuple[int, ...]:
        return tuple(2 * i + 1 for i in range(self.M))

    @property
    def energies(self) -> tuple[int, ...]:
        return tuple((2 * i + 1) ** 2 for i in range(self.M))

    @property
    def bits_per_symbol(self) -> float:
        return float(np.log2(self.M))

    def index(self, amplitude: int) -> int:
        if amplitude % 2 != 1 or not 1 <= amplitude <= 2 * self.M - 1:
            raise ValueError(f"amplitude {amplitude} not in {self.M}-ASK")
        return (amplitude - 1) // 2


def word_energy(symbols: Iterable[int]) -> int:
    return sum(x * x for x in symbols)


@dataclass(frozen=True)
class PrefixFreeCode:
    """Ordered bijection between a binary dictionary and an M-ASK codebook.

    ``entries[n] = (b_n, x_n)``.  Construction only normalizes types; use
    :func:`validate_code` (or :meth:`checked`) to enforce the structural
    invariants.
    """

    alphabet: AskAlphabet
    entries: tuple[tuple[str, tuple[int, ...]], ...]
    kind: str = "V2V"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown code kind {self.kind!r}")
        entries = tuple((str(b), tuple(int(s) for s in x)) for b, x in self.entries)
        object.__setattr__(self, "entries", entries)

    def __len__(self):
        return len(self.entries)

    @property
    def dictionary(self) -> list[str]:
        return [b for b, _ in self.entries]

    @property
    def codebook(self) -> list[tuple[int, ...]]:
        return [x for _, x in self.entries]

    @property
    def info_lengths(self) -> np.ndarray:
        return np.array([len(b) for b, _ in self.entries], dtype=np.int64)

    @property
    def code_lengths(self) -> np.ndarray:
        return np.array([len(x) for _, x in self.entries], dtype=np.int64)

    @property
    def energies(self) -> np.ndarray:
        return np.array([word_energy(x) for _, x in self.entries], dtype=np.int64)

    @property
    def max_code_length(self) -> int:
        return int(self.code_lengths.max())

    @property
    def min_info_length(self) -> int:
        # the pessimistic framing bound needs the shortest information word
        return int(self.info_lengths.min())

    def checked(self) -> "PrefixFreeCode":
        report = validate_code(self)
        if not report.ok:
            raise InvalidCodeError("; ".join(report.problems))
        return self

    def to_dict(self) -> dict:
        return {
            "version": CODEBOOK_VERSION,
            "alphabet_m": self.alphabet.M,
            "kind": self.kind,
            "entries": [{"b": b, "x": list(x)} for b, x in self.entries],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PrefixFreeCode":
        if data.get("version") != CODEBOOK_VERSION:
            raise ValueError(f"unsupported codebook version {data.get('version')!r}")
        entries = tuple((e["b"], tuple(e["x"])) for e in data["entries"])
        return cls(AskAlphabet(int(data["alphabet_m"])), entries, data["kind"])

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "PrefixFreeCode":
        return cls.from_dict(json.loads(text))


@dataclass
class ValidationReport:
    ok: bool
    kraft_sum: Fraction
    problems: list[str] = field(default_factory=list)


def _prefix_violations(words: Sequence, label: str) -> list[str]:
    problems = []
    ordered = sorted(set(words))
    # after sorting, a prefix sits directly before some word extending it
    for a, b in zip(ordered, ordered[1:]):
        if len(a) < len(b) and b[: len(a)] == a:
            problems.append(f"{label} {_show(a)!r} is a prefix of {_show(b)!r}")
    return problems


def _show(word) -> str:
    return word if isinstance(word, str) else "".join(str(s) for s in word)


def validate_code(code: PrefixFreeCode) -> ValidationReport:
    """Check prefix-freeness on both sides, Kraft equality, duplicates and
    empty words.  Never raises."""
    problems: list[str] = []
    alphabet = code.alphabet
    if len(code.entries) < 2:
        problems.append(f"code has {len(code.entries)} entries, need at least 2")

    bits, words = code.dictionary, code.codebook
    for b in bits:
        if not b:
            problems.append("empty information word")
        elif set(b) - {"0", "1"}:
            problems.append(f"information word {b!r} is not binary")
    for x in words:
        if not x:
            problems.append("empty codeword")
        for s in x:
            if s % 2 != 1 or not 1 <= s <= 2 * alphabet.M - 1:
                problems.append(f"codeword {_show(x)!r} has amplitude {s} outside {alphabet.M}-ASK")
                break
    for label, seq in (("information word", bits), ("codeword", words)):
        if len(set(seq)) != len(seq):
            problems.append(f"duplicate {label}")

    problems += _prefix_violations([b for b in bits if b], "information word")
    problems += _prefix_violations([x for x in words if x], "codeword")

    kraft = sum((Fraction(1, 2 ** len(b)) for b in bits), Fraction(0))
    if kraft != 1:
        problems.append(f"dictionary Kraft sum is {kraft}, must be 1")
    return ValidationReport(ok=not problems, kraft_sum=kraft, problems=problems)


@dataclass(frozen=True)
class CodeMetrics:
    avg_symbol_energy: float
    resolution_rate: float
    expected_codeword_length: float
    expected_infoword_length: float
    leaf_pmf: np.ndarray = field(repr=False, compare=False)

    @property
    def E(self) -> float:
        return self.avg_symbol_energy

    @property
    def R(self) -> float:
        return self.resolution_rate


def metrics_from_lengths(info_lengths, code_lengths, energies) -> tuple[float, float]:
    """Float (E_C, R_C) straight from the three length/energy vectors."""
    lb = np.asarray(info_lengths, dtype=float)
    p = np.exp2(-lb)
    el = p @ np.asarray(code_lengths, dtype=float)
    return float(p @ np.asarray(energies, dtype=float) / el), float(p @ lb / el)


def code_metrics(code: PrefixFreeCode) -> CodeMetrics:
    """E_C and R_C of a complete code, with dyadic leaf probabilities.

    Exact rational arithmetic up to 64 entries, double precision above.
    """
    report = validate_code(code)
    if report.kraft_sum != 1:
        raise InvalidCodeError(f"dictionary Kraft sum is {report.kraft_sum}, must be 1")
    lb, lx, e = code.info_lengths, code.code_lengths, code.energies
    if len(code) <= EXACT_MAX_ENTRIES:
        p = [Fraction(1, 2 ** int(l)) for l in lb]
        el = sum((pi * int(l) for pi, l in zip(p, lx)), Fraction(0))
        eb = sum((pi * int(l) for pi, l in zip(p, lb)), Fraction(0))
        ee = sum((pi * int(w) for pi, w in zip(p, e)), Fraction(0))
        return CodeMetrics(
            avg_symbol_energy=float(ee / el),
            resolution_rate=float(eb / el),
            expected_codeword_length=float(el),
            expected_infoword_length=float(eb),
            leaf_pmf=np.array([float(pi) for pi in p]),
        )
    p = np.exp2(-lb.astype(float))
    el, eb, ee = p @ lx, p @ lb, p @ e
    return CodeMetrics(float(ee / el), float(eb / el), float(el), float(eb), p)


def uniform_code(M: int) -> PrefixFreeCode:
    """The log2(M)-bit to one-symbol map, lexicographic (no Gray labeling)."""
    width = int(np.log2(M))
    if 2**width != M:
        raise ValueError(f"uniform map needs a power-of-two alphabet, got M={M}")
    entries = tuple((format(i, f"0{width}b"), (2 * i + 1,)) for i in range(M))
    return PrefixFreeCode(AskAlphabet(M), entries, "UNIFORM")


def canonical_table1c() -> PrefixFreeCode:
    """The 8-entry 2-ASK variable-to-variable example code.

    Information word lengths [1,3,3,3,4,5,6,6], codeword lengths
    [7,7,6,5,4,3,2,1], codeword energies [7,15,14,13,12,11,10,9].
    """
    bits = ["0", "100", "101", "110", "1110", "11110", "111110", "111111"]
    words = ["1111111", "1111113", "111113", "11113", "1113", "113", "13", "3"]
    entries = tuple((b, tuple(int(c) for c in x)) for b, x in zip(bits, words))
    return PrefixFreeCode(AskAlphabet(2), entries, "V2V")


def sort_entries(entries: Iterable[tuple[str, tuple[int, ...]]]):
    """Descending probability (shorter information word), ties by ascending
    codeword energy."""
    return tuple(sorted(entries, key=lambda e: (len(e[0]), word_energy(e[1]))))
