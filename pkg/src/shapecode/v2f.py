"""Variable-to-fixed codes: every M^v word of length v, parsed by a GHC
dictionary matched to the codeword-level MB distribution."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import AskAlphabet, CodeMetrics, PrefixFreeCode, code_metrics, metrics_from_lengths, sort_entries
from .ghc import canonical_words, ghc_lengths
from .library import LibraryEntry
from .mbdist import lambda_for_rate, mb_codeword_log_pmf

MAX_CARDINALITY = 4096


class DegenerateCodeError(ValueError):
    """GHC kept fewer than two codewords, so no usable code exists."""


def balanced_codebook(M: int, v: int) -> list[tuple[int, ...]]:
    return list(itertools.product(AskAlphabet(M).amplitudes, repeat=v))


def check_v2f_args(M: int, v: int, target_rate: float, cap: int = MAX_CARDINALITY):
    if v < 1 or M**v > cap:
        raise ValueError(f"M^v = {M}^{v} exceeds the cardinality cap {cap}")
    if not 0 < target_rate <= math.log2(M) + 1e-12:
        raise ValueError(f"target rate must lie in (0, log2 M], got {target_rate}")


@dataclass
class _V2fCandidate:
    lengths: list[int]
    codebook: list[tuple[int, ...]]
    energy: float
    rate: float


def _ghc_candidate(M: int, v: int, target_rate: float, codebook=None, energies=None):
    codebook = codebook if codebook is not None else balanced_codebook(M, v)
    lam = lambda_for_rate(AskAlphabet(M), target_rate)
    lengths = ghc_lengths(mb_codeword_log_pmf(codebook, lam))
    keep = [i for i, l in enumerate(lengths) if l >= 0]
    if len(keep) < 2:
        return None
    if energies is None:
        energies = np.array([sum(s * s for s in x) for x in codebook])
    lb = np.array([lengths[i] for i in keep])
    E, R = metrics_from_lengths(lb, np.full(len(keep), v), energies[keep])
    return _V2fCandidate([lengths[i] for i in keep], [codebook[i] for i in keep], E, R)


def _to_code(M: int, cand: _V2fCandidate) -> PrefixFreeCode:
    words = canonical_words(cand.lengths)
    entries = sort_entries(zip(words, cand.codebook))
    # canonical words again, now in sorted order, so bits ascend with the rows
    words = canonical_words([len(b) for b, _ in entries])
    return PrefixFreeCode(AskAlphabet(M), tuple(zip(words, (x for _, x in entries))), "V2F").checked()


def build_v2f(M: int, v: int, target_rate: float) -> tuple[PrefixFreeCode, CodeMetrics]:
    """(M, v, R*) -> MB PMF -> GHC dyadic PMF -> (dictionary, codebook).

    Lambda solves the scalar entropy target, which for a balanced tree is the
    same as matching v * R* at the codeword level.
    """
    check_v2f_args(M, v, target_rate)
    cand = _ghc_candidate(M, v, target_rate)
    if cand is None:
        raise DegenerateCodeError(f"GHC keeps a single codeword for M={M}, v={v}, R*={target_rate}")
    code = _to_code(M, cand)
    return code, code_metrics(code)


def sweep_v2f(M: int, v_max: int, rate_grid: Sequence[float], cap: int = MAX_CARDINALITY,
              window: float | None = None) -> list[LibraryEntry | None]:
    """Best (lowest E_C) V2F code per target over all v with M^v <= cap.

    Every (v, grid target) pair yields one GHC candidate; the candidates are
    pooled and a code qualifies for target t when its realized rate is at
    least t (and below t + ``window`` when a window is given).
    """
    grid = np.asarray(rate_grid, dtype=float)
    if len(grid) > 1 and float(np.min(np.diff(np.sort(grid)))) < 1e-3 - 1e-15:
        raise ValueError("grid step must be at least 1e-3")
    for t in grid:
        check_v2f_args(M, 1, t)
    pool: list[tuple[int, _V2fCandidate]] = []
    seen = set()
    for v in (v for v in range(1, v_max + 1) if M**v <= cap):
        book = balanced_codebook(M, v)
        energies = np.array([sum(s * s for s in x) for x in book])
        for t in grid:
            cand = _ghc_candidate(M, v, float(t), book, energies)
            if cand is None:
                continue
            key = (v, tuple(cand.lengths), tuple(cand.codebook))
            if key not in seen:
                seen.add(key)
                pool.append((v, cand))
    rates = np.array([c.rate for _, c in pool])
    energy = np.array([c.energy for _, c in pool])
    upper = np.inf if window is None else window
    out: list[LibraryEntry | None] = []
    for t in grid:
        ok = (rates >= t - 1e-12) & (rates < t + upper)
        if not ok.any():
            out.append(None)
            continue
        # argmin keeps the first of equal energies: smaller v wins
        i = int(np.flatnonzero(ok)[np.argmin(energy[ok])])
        v, cand = pool[i]
        out.append(LibraryEntry.from_code(float(t), _to_code(M, cand), v=v))
    return out


def realized_rates(M: int, v: int, rate_grid: Sequence[float]) -> list[float]:
    """Realized R_C per target (0.0 when GHC degenerates to one codeword)."""
    book = balanced_codebook(M, v)
    energies = np.array([sum(s * s for s in x) for x in book])
    out = []
    for t in rate_grid:
        cand = _ghc_candidate(M, v, float(t), book, energies)
        out.append(0.0 if cand is None else cand.rate)
    return out


def all_v2f_codes(M: int, v_max: int, rate_grid: Sequence[float], cap: int = MAX_CARDINALITY) -> list[LibraryEntry]:
    """Every distinct V2F code reached from the grid, for every allowed v."""
    out, seen = [], set()
    for v in (v for v in range(1, v_max + 1) if M**v <= cap):
        book = balanced_codebook(M, v)
        energies = np.array([sum(s * s for s in x) for x in book])
        for t in rate_grid:
            cand = _ghc_candidate(M, v, float(t), book, energies)
            if cand is None:
                continue
            key = (v, tuple(cand.lengths), tuple(cand.codebook))
            if key in seen:
                continue
            seen.add(key)
            out.append(LibraryEntry.from_code(float(t), _to_code(M, cand), v=v))
    return out
