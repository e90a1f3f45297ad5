"""Minimum-sum-energy right trees, one per achievable (size, sum depth).

A right tree is summarized by its leaf count N, sum depth nu (total leaf
depth in symbols) and sum energy omega (total codeword energy).  Appending
sub-trees T_1..T_J under a root gives

    N = sum N_j,   nu = N + sum nu_j,   omega = sum (2j-1)^2 N_j + sum omega_j.

Optimal trees contain only optimal sub-trees and, in an optimal tree, larger
sub-trees hang further left, so the DP only combines per-(N_j, nu_j) optima
over non-increasing size compositions.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import AskAlphabet

BRUTE_FORCE_LIMITS = {2: 10, 4: 7}
DP_LIMITS = {2: 64, 4: 32}


@dataclass(frozen=True)
class TreeRecord:
    N: int
    nu: int
    omega: int
    children: tuple["TreeRecord", ...] = field(default=(), repr=False)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def recompute(self) -> tuple[int, int, int]:
        """(N, nu, omega) rebuilt from the children alone."""
        if self.is_leaf:
            return 1, 0, 0
        N = sum(c.N for c in self.children)
        nu = N + sum(c.nu for c in self.children)
        omega = sum((2 * j - 1) ** 2 * c.N + c.omega for j, c in enumerate(self.children, 1))
        return N, nu, omega

    def shape(self) -> str:
        """Parenthesized form, e.g. ``((13)(13))`` for the balanced 4-leaf tree."""
        if self.is_leaf:
            return ""
        parts = []
        for j, c in enumerate(self.children, 1):
            parts.append(str(2 * j - 1) if c.is_leaf else c.shape())
        return "(" + "".join(parts) + ")"


LEAF = TreeRecord(1, 0, 0)


@dataclass
class TreeSet:
    """``levels[N][nu]`` is the stored minimum-omega tree of size N, depth nu."""

    M: int
    N_max: int
    levels: dict[int, dict[int, TreeRecord]]

    def records(self, N: int) -> list[TreeRecord]:
        return [self.levels[N][nu] for nu in sorted(self.levels[N])]

    def get(self, N: int, nu: int) -> TreeRecord:
        return self.levels[N][nu]

    def achievable(self, N: int) -> list[int]:
        return sorted(self.levels[N])

    def all_records(self, N_min: int = 2):
        for N in range(N_min, self.N_max + 1):
            yield from self.records(N)

    def to_json(self) -> str:
        return json.dumps({
            "M": self.M,
            "N_max": self.N_max,
            "trees": [
                {"N": r.N, "nu": r.nu, "omega": r.omega, "shape": r.shape()}
                for N in range(1, self.N_max + 1) for r in self.records(N)
            ],
        })


def _partitions(N: int, J: int, largest: int):
    """Non-increasing J-tuples of positive ints summing to N, largest first."""
    if J == 1:
        if 1 <= N <= largest:
            yield (N,)
        return
    for first in range(min(largest, N - J + 1), 0, -1):
        if first * J < N:
            break
        for rest in _partitions(N - first, J - 1, first):
            yield (first,) + rest


def compositions(N: int, M: int):
    """Child-size tuples for a size-N tree, sizes non-increasing."""
    for J in range(2, min(M, N) + 1):
        yield from _partitions(N, J, N - 1)


def _minplus(A: np.ndarray, B: np.ndarray):
    """Min-plus convolution; also returns the index into B used per output."""
    out = np.full(len(A) + len(B) - 1, np.inf)
    arg = np.full(len(out), -1, dtype=np.int64)
    for j in np.flatnonzero(np.isfinite(B)):
        cand = A + B[j]
        seg = out[j : j + len(A)]
        better = cand < seg
        seg[better] = cand[better]
        arg[j : j + len(A)][better] = j
    return out, arg


def _check_dp_args(M: int, N_max: int):
    if M not in DP_LIMITS:
        raise ValueError(f"tree enumeration supports M in {sorted(DP_LIMITS)}, got {M}")
    if not 1 <= N_max <= DP_LIMITS[M]:
        raise ValueError(f"N_max must be in [1, {DP_LIMITS[M]}] for M={M}, got {N_max}")


def enumerate_optimal_trees(M: int, N_max: int) -> TreeSet:
    _check_dp_args(M, N_max)
    levels: dict[int, dict[int, TreeRecord]] = {1: {0: LEAF}}
    # dense omega-by-nu arrays, inf where a depth is not achievable
    dense: dict[int, np.ndarray] = {1: np.zeros(1)}
    for N in range(2, N_max + 1):
        best = np.full((N + 2) * (N - 1) // 2 + 1, np.inf)
        found: dict[int, TreeRecord] = {}
        for sizes in compositions(N, M):
            base = sum((2 * j - 1) ** 2 * n for j, n in enumerate(sizes, 1))
            acc, args = dense[sizes[0]], []
            for n in sizes[1:]:
                acc, arg = _minplus(acc, dense[n])
                args.append(arg)
            total = acc + base
            # acc is indexed by sum of child depths; the tree adds N
            cur = best[N : N + len(total)]
            improved = np.flatnonzero(total < cur)
            if improved.size == 0:
                continue
            cur[improved] = total[improved]
            for s in improved:
                nus, rem = [], int(s)
                for arg in reversed(args):
                    nj = int(arg[rem])
                    nus.append(nj)
                    rem -= nj
                nus.append(rem)
                nus.reverse()
                kids = tuple(levels[n][v] for n, v in zip(sizes, nus))
                found[N + int(s)] = TreeRecord(N, N + int(s), int(total[s]), kids)
        levels[N] = {nu: found[nu] for nu in sorted(found)}
        dense[N] = best
    return TreeSet(M, N_max, levels)


def brute_force_trees(M: int, N: int) -> list[TreeRecord]:
    """Every ordered tree with N leaves whose internal nodes have 2..M children."""
    if M not in BRUTE_FORCE_LIMITS or not 1 <= N <= BRUTE_FORCE_LIMITS[M]:
        raise ValueError(f"brute force limited to M in {sorted(BRUTE_FORCE_LIMITS)} "
                         f"with N <= {BRUTE_FORCE_LIMITS.get(M)}, got M={M}, N={N}")
    return list(_all_trees(M, N))


@lru_cache(maxsize=None)
def _all_trees(M: int, N: int) -> tuple[TreeRecord, ...]:
    if N == 1:
        return (LEAF,)
    out = []
    for J in range(2, min(M, N) + 1):
        for sizes in _ordered_compositions(N, J):
            for kids in itertools.product(*(_all_trees(M, n) for n in sizes)):
                nu = N + sum(k.nu for k in kids)
                omega = sum((2 * j - 1) ** 2 * k.N + k.omega for j, k in enumerate(kids, 1))
                out.append(TreeRecord(N, nu, omega, kids))
    return tuple(out)


def _ordered_compositions(N: int, J: int):
    if J == 1:
        yield (N,)
        return
    for first in range(1, N - J + 2):
        for rest in _ordered_compositions(N - first, J - 1):
            yield (first,) + rest


def brute_force_minima(M: int, N: int) -> dict[int, int]:
    best: dict[int, int] = {}
    for t in brute_force_trees(M, N):
        if t.nu not in best or t.omega < best[t.nu]:
            best[t.nu] = t.omega
    return dict(sorted(best.items()))


def tree_bounds(M: int, N: int) -> tuple[int, int]:
    """Closed-form (nu_min, nu_max).

    nu_min is the minimum-height formula, which undershoots the true minimum
    when N is not a power of M (N=3, M=2 gives 4, the true minimum is 5); the
    DP range is authoritative.
    """
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    d = 0
    while M ** (d + 1) <= N:
        d += 1
    nu_min = (N - M**d) * (d + 1) + M**d * d
    nu_max = (N + 2) * (N - 1) // 2
    return nu_min, nu_max


def tree_to_codebook(t: TreeRecord, alphabet: AskAlphabet | None = None) -> list[tuple[int, ...]]:
    """Leaves depth first, children in order; edge j emits amplitude 2j-1."""
    if alphabet is not None and len(t.children) > alphabet.M:
        raise ValueError(f"tree has {len(t.children)} children but alphabet has {alphabet.M} symbols")
    if t.is_leaf:
        return [()]
    words = []
    for j, c in enumerate(t.children, 1):
        words.extend((2 * j - 1,) + w for w in tree_to_codebook(c, alphabet))
    return words
