"""Maxwell-Boltzmann distributions over ASK amplitudes and codewords."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import math

import numpy as np

from .core import AskAlphabet, word_energy

LAMBDA_MAX = 64.0
BISECTION_ITERS = 200
RATE_TOL = 1e-10
LN2 = math.log(2.0)


def entropy_bits(p) -> float:
    """Entropy in bits with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def kl_bits(p, q) -> float:
    """D(p || q) in bits; q may be unnormalized."""
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    nz = p > 0
    return float((p[nz] * np.log2(p[nz] / q[nz])).sum())


@dataclass(frozen=True)
class MbModel:
    alphabet: AskAlphabet
    lam: float
    scalar_pmf: np.ndarray
    entropy: float
    mean_energy: float


def _mb_log_pmf(energies: np.ndarray, lam: float) -> np.ndarray:
    # shifting by the smallest energy keeps the largest term at exp(0) = 1
    a = -lam * (energies - energies.min())
    return a - np.log(np.exp(a).sum())


def mb_scalar(alphabet: AskAlphabet, lam: float) -> MbModel:
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    e = np.asarray(alphabet.energies, dtype=float)
    logp = _mb_log_pmf(e, lam)
    p = np.exp(logp)
    h = float(-(p * logp).sum() / np.log(2))
    return MbModel(alphabet, float(lam), p, max(h, 0.0), float(p @ e))


def lambda_for_rate(alphabet: AskAlphabet, target_entropy: float) -> float:
    """Rate parameter whose MB distribution has the given entropy (bits).

    Plain bisection on [0, 64]; entropy is strictly decreasing in lambda.
    """
    hmax = np.log2(alphabet.M)
    if not 0 < target_entropy <= hmax + 1e-12:
        raise ValueError(f"target entropy must lie in (0, {hmax}], got {target_entropy}")
    if target_entropy >= hmax - 1e-15:
        return 0.0
    e = np.asarray(alphabet.energies, dtype=float)
    e = e - e[0]
    lo, hi = 0.0, LAMBDA_MAX
    for _ in range(BISECTION_ITERS):
        mid = 0.5 * (lo + hi)
        w = np.exp(-mid * e)
        z = w.sum()
        # H = log Z + lam E[e] in nats, with the energies shifted to start at 0
        h = (math.log(z) + mid * (w @ e) / z) / LN2
        if abs(h - target_entropy) <= RATE_TOL:
            return mid
        if h > target_entropy:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-17 * max(hi, 1.0):
            break
    return 0.5 * (lo + hi)


def mb_codeword_log_pmf(codebook: Sequence[Sequence[int]], lam: float) -> np.ndarray:
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if len(codebook) == 0:
        raise ValueError("codebook is empty")
    e = np.array([word_energy(x) for x in codebook], dtype=float)
    return _mb_log_pmf(e, lam)


def mb_codeword_pmf(codebook: Sequence[Sequence[int]], lam: float) -> np.ndarray:
    """P(x) proportional to exp(-lam * ||x||^2) over the given codewords."""
    return np.exp(mb_codeword_log_pmf(codebook, lam))


def mb_energy_at_rate(alphabet: AskAlphabet, rate: float) -> float:
    """Smallest mean symbol energy of any i.i.d. source with entropy ``rate``."""
    return mb_scalar(alphabet, lambda_for_rate(alphabet, rate)).mean_energy


def energy_gap_db(E_C: float, R_C: float, alphabet: AskAlphabet) -> float:
    if E_C <= 0:
        raise ValueError(f"energy must be positive, got {E_C}")
    # dyadic rates can land a hair above log2 M in floating point
    hmax = np.log2(alphabet.M)
    if hmax < R_C <= hmax + 1e-12:
        R_C = hmax
    return float(10 * np.log10(E_C / mb_energy_at_rate(alphabet, R_C)))
