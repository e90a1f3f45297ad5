"""Geometric Huffman coding: the dyadic PMF closest (in D(d || p)) to a
target PMF, and the canonical binary dictionary realizing it."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

LOG4 = math.log(4.0)
LOG2 = math.log(2.0)


@dataclass(frozen=True)
class DyadicPmf:
    """``lengths[n]`` is the bit length of entry n, or -1 for a pruned entry."""

    lengths: tuple[int, ...]

    @property
    def probabilities(self) -> np.ndarray:
        l = np.asarray(self.lengths)
        return np.where(l >= 0, np.exp2(-np.maximum(l, 0).astype(float)), 0.0)

    @property
    def survivors(self) -> list[int]:
        return [i for i, l in enumerate(self.lengths) if l >= 0]


def ghc_lengths(log_p) -> list[int]:
    """GHC on natural-log probabilities; returns -1 for pruned entries.

    Merging the two least likely nodes a >= b: if a >= 4 b, b is dropped and
    a survives unchanged, otherwise both go one level deeper under a node of
    weight 2 sqrt(a b).
    """
    log_p = [float(v) for v in log_p]
    n = len(log_p)
    if n == 0 or all(v == -math.inf for v in log_p):
        raise ValueError("GHC needs at least one positive probability")
    lengths = [0] * n
    heap = [(v, i, [i]) for i, v in enumerate(log_p)]
    heapq.heapify(heap)
    tag = n
    while len(heap) > 1:
        lb, _, leaves_b = heapq.heappop(heap)
        la, ia, leaves_a = heapq.heappop(heap)
        if la >= LOG4 + lb:
            for i in leaves_b:
                lengths[i] = -1
            heapq.heappush(heap, (la, ia, leaves_a))
            continue
        for i in leaves_a:
            lengths[i] += 1
        for i in leaves_b:
            lengths[i] += 1
        heapq.heappush(heap, (LOG2 + 0.5 * (la + lb), tag, leaves_a + leaves_b))
        tag += 1
    return lengths


def ghc_dyadic(target) -> DyadicPmf:
    p = np.asarray(target, dtype=float)
    if (p < 0).any():
        raise ValueError("probabilities must be nonnegative")
    with np.errstate(divide="ignore"):
        return DyadicPmf(tuple(ghc_lengths(np.log(p))))


def dyadic_divergence(d, p) -> float:
    """D(d || p) in bits for a dyadic d (zeros allowed)."""
    d, p = np.asarray(d, dtype=float), np.asarray(p, dtype=float)
    nz = d > 0
    return float((d[nz] * np.log2(d[nz] / p[nz])).sum())


def canonical_words(lengths) -> list[str]:
    """Canonical prefix-free words for a complete length vector.

    Words are handed out shortest first (ties by position), each the next
    binary number at its length, so the result is lexicographically sorted
    in that order.
    """
    order = sorted(range(len(lengths)), key=lambda i: (lengths[i], i))
    words = [""] * len(lengths)
    value, prev = 0, None
    for i in order:
        l = lengths[i]
        if prev is not None:
            value = (value + 1) << (l - prev)
        words[i] = format(value, f"0{l}b") if l else ""
        prev = l
    return words


def dyadic_to_dictionary(d: DyadicPmf, codebook_order=None):
    """Information words for the surviving entries of ``d``.

    Returns ``(indices, words)``: the kept positions (into ``codebook_order``
    if given) and their canonical bit words.
    """
    keep = d.survivors
    lengths = [d.lengths[i] for i in keep]
    top = max(lengths)
    if sum(1 << (top - l) for l in lengths) != 1 << top:
        raise ValueError("surviving lengths do not satisfy Kraft equality")
    words = canonical_words(lengths)
    if codebook_order is not None:
        keep = [codebook_order[i] for i in keep]
    return keep, words
