"""Variable-to-variable codes over optimal right trees, and fixed-to-variable
codes as the uniform-dictionary special case.

For a fixed right tree the relaxed problem is

    minimize  sum p_n e_n / sum p_n l_n
    s.t.      D(p || q) <= 0,  q_n = 2^(-R* l_n),  sum p_n = 1,

because R_C >= R* is equivalent to -D(p || q) >= 0.  It is solved by the
fractional (Dinkelbach-style) iteration p^(l) = argmin E[e] - E^(l-1) E[l],
whose inner problem has the closed form p proportional to q_n exp(-beta c_n)
with beta >= 0 chosen so the divergence constraint is tight.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import AskAlphabet, PrefixFreeCode, metrics_from_lengths, sort_entries, word_energy
from .ghc import canonical_words, ghc_lengths
from .library import LibraryEntry
from .treelib import TreeRecord, TreeSet, enumerate_optimal_trees, tree_to_codebook

LN2 = math.log(2.0)
DIV_TOL = 1e-12  # relative slack left in the divergence budget
BISECTION_CAP = 300
DEFAULT_EPS = 1e-10
MAX_OUTER = 100


class InfeasibleRateError(ValueError):
    """sum_n 2^(-R* l_n) < 1: the tree cannot reach the target rate."""


@dataclass(frozen=True)
class RateConstraintVector:
    q: np.ndarray

    @classmethod
    def for_tree(cls, code_lengths, rate: float) -> "RateConstraintVector":
        return cls(np.exp2(-rate * np.asarray(code_lengths, dtype=float)))

    @property
    def total(self) -> float:
        return float(self.q.sum())

    @property
    def feasible(self) -> bool:
        return self.total >= 1.0


def _tilt(logp0, c, beta):
    """p0 exp(-beta c), normalized: log probabilities, divergence from p0 in
    nats, and the variance of c under the tilted PMF.

    Small tilts go through expm1/log1p so that the divergence, which is
    second order in beta, is not lost to cancellation.
    """
    x = -beta[:, None] * c
    with np.errstate(over="ignore", invalid="ignore"):
        small = np.log1p((np.exp(logp0) * np.expm1(x)).sum(axis=1))
        a = logp0 + x
        amax = a.max(axis=1, keepdims=True)
        big = (amax + np.log(np.exp(a - amax).sum(axis=1, keepdims=True)))[:, 0]
    g = np.where(beta <= 1.0, small, big)
    logp = a - g[:, None]
    p = np.exp(logp)
    mean = (p * c).sum(axis=1)
    kl = -beta * mean - g
    var = (p * (c - mean[:, None]) ** 2).sum(axis=1)
    return logp, np.maximum(kl, 0.0), var


def solve_inner_batch(costs: np.ndarray, logq: np.ndarray) -> np.ndarray:
    """Row-wise argmin sum p c subject to D(p || q) <= 0, sum p = 1.

    Returns natural-log probabilities.  Rows must be feasible (sum q >= 1).
    With p0 = q / Q the constraint reads D(p || p0) <= log Q, and the
    minimizer is p0 tilted by exp(-beta c) with the largest feasible beta.
    beta is found by safeguarded Newton steps on sqrt(D), which is close to
    linear in beta; the feasible end of the bracket is what gets returned.
    """
    costs = np.atleast_2d(np.asarray(costs, dtype=float))
    logq = np.atleast_2d(np.asarray(logq, dtype=float))
    B = costs.shape[0]
    qmax = logq.max(axis=1, keepdims=True)
    logQ = (qmax + np.log(np.exp(logq - qmax).sum(axis=1, keepdims=True)))[:, 0]
    logp0 = logq - logQ[:, None]
    # Q within rounding of 1 leaves only p0 itself feasible
    budget = np.where(logQ > 1e-14, logQ, 0.0)
    spread = costs.max(axis=1) - costs.min(axis=1)
    scale = np.where(spread > 0, 1.0 / np.where(spread > 0, spread, 1.0), 0.0)
    c = (costs - costs.min(axis=1, keepdims=True)) * scale[:, None]

    # point-mass limit: q restricted to the cheapest entries
    cheapest = c <= 1e-15
    mass = np.where(cheapest, np.exp(logq), 0.0).sum(axis=1)
    limit_ok = (mass >= 1.0) & (spread > 0)
    search = (spread > 0) & ~limit_ok & (budget > 0)

    lo = np.zeros(B)
    hi = np.full(B, np.inf)
    beta = np.zeros(B)
    step1 = np.full(B, np.inf)
    step2 = np.full(B, np.inf)
    if search.any():
        _, _, var0 = _tilt(logp0[search], c[search], beta[search])
        # second-order guess: D ~ beta^2 var / 2
        beta[search] = np.sqrt(2.0 * budget[search] / np.maximum(var0, 1e-300))
    active = search.copy()
    for _ in range(BISECTION_CAP):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        b = beta[idx]
        _, kl, var = _tilt(logp0[idx], c[idx], b)
        bud = budget[idx]
        ok = kl <= bud
        lo[idx[ok]] = b[ok]
        hi[idx[~ok]] = b[~ok]
        h = hi[idx]
        done = (ok & (kl >= bud * (1.0 - DIV_TOL))) | (np.isfinite(h) & (h - lo[idx] <= 1e-15 * h))
        # Newton on sqrt(kl) - sqrt(budget); d sqrt(kl)/d beta = beta var / (2 sqrt(kl))
        rk = np.sqrt(kl)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = (rk - np.sqrt(bud)) * 2.0 * rk / (b * var)
        nb = b - step
        l, h = lo[idx], hi[idx]
        # Newton steps must shrink geometrically, otherwise bisect
        slow = np.abs(nb - b) > 0.5 * step2[idx]
        bad = ~np.isfinite(nb) | (nb <= l) | (nb >= h) | slow
        # fall back to bisection, or doubling while unbracketed
        nb = np.where(bad, np.where(np.isfinite(h), 0.5 * (l + h), 2.0 * np.maximum(b, l)), nb)
        # a Newton step that lands just above the root would stall: aim inside
        nb = np.where(~ok & ~bad, l + 0.999 * (nb - l), nb)
        step2[idx], step1[idx] = step1[idx], np.abs(nb - b)
        beta[idx] = nb
        active[idx[done]] = False
    if active.any():
        raise RuntimeError("divergence bisection did not converge within the iteration cap")

    out, _, _ = _tilt(logp0, c, lo)
    if limit_ok.any():
        # beta -> infinity: all mass on the cheapest entries in proportion to q
        lim = np.where(cheapest, logq, -np.inf)
        lim = lim - np.log(np.exp(lim).sum(axis=1, keepdims=True))
        out[limit_ok] = lim[limit_ok]
    return out


def solve_inner(costs, q: RateConstraintVector) -> np.ndarray:
    """Single-row :func:`solve_inner_batch`, returning probabilities."""
    if not q.feasible:
        raise InfeasibleRateError(f"sum q = {q.total} < 1: tree cannot achieve the target rate")
    with np.errstate(divide="ignore"):
        logq = np.log(q.q)
    return np.exp(solve_inner_batch(np.asarray(costs, float)[None, :], logq[None, :])[0])


@dataclass
class OptimalPmf:
    p: np.ndarray
    energy: float
    iterations: int
    history: list[float] = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return all(b <= a + 1e-12 for a, b in zip(self.history, self.history[1:]))


def optimal_pmf_batch(code_lengths, energies, rates, eps: float = DEFAULT_EPS):
    """Run the fractional iteration for every target rate at once.

    Returns ``(P, E, iterations, histories, feasible)``; infeasible rows are
    left as NaN with zero iterations.
    """
    l = np.asarray(code_lengths, dtype=float)
    e = np.asarray(energies, dtype=float)
    rates = np.atleast_1d(np.asarray(rates, dtype=float))
    logq = -LN2 * rates[:, None] * l[None, :]
    Q = np.exp2(-rates[:, None] * l[None, :]).sum(axis=1)
    feasible = Q >= 1.0
    B, N = len(rates), len(l)
    P = np.full((B, N), np.nan)
    E = np.full(B, np.nan)
    iters = np.zeros(B, dtype=int)
    hist: list[list[float]] = [[] for _ in range(B)]
    rows = np.flatnonzero(feasible)
    if rows.size == 0:
        return P, E, iters, hist, feasible

    p = np.exp(logq[rows]) / Q[rows, None]
    cur = (p @ e) / (p @ l)
    P[rows], E[rows] = p, cur
    for r, v in zip(rows, cur):
        hist[r].append(float(v))
    active = rows.copy()
    for _ in range(MAX_OUTER):
        if active.size == 0:
            break
        prev = E[active]
        costs = e[None, :] - prev[:, None] * l[None, :]
        p = np.exp(solve_inner_batch(costs, logq[active]))
        new = (p @ e) / (p @ l)
        iters[active] += 1
        # a step that does not improve is rounding noise at the optimum:
        # keep the previous iterate
        better = new <= prev
        P[active[better]], E[active[better]] = p[better], new[better]
        for r, v in zip(active[better], new[better]):
            hist[r].append(float(v))
        active = active[better & (prev - new >= eps)]
    return P, E, iters, hist, feasible


def optimal_pmf(codebook: Sequence[Sequence[int]], rate: float, eps: float = DEFAULT_EPS) -> OptimalPmf:
    l = [len(x) for x in codebook]
    e = [word_energy(x) for x in codebook]
    P, E, iters, hist, feasible = optimal_pmf_batch(l, e, [rate], eps)
    if not feasible[0]:
        q = RateConstraintVector.for_tree(l, rate)
        raise InfeasibleRateError(f"sum q = {q.total} < 1: tree cannot achieve R* = {rate}")
    return OptimalPmf(P[0], float(E[0]), int(iters[0]), hist[0])


@dataclass
class SolveStats:
    """Bookkeeping over every fractional-iteration run of a library build."""

    solves: int = 0
    infeasible: int = 0
    iteration_counts: list[int] = field(default_factory=list)
    max_increase: float = 0.0

    def record(self, iters, hists, feasible):
        for it, h, ok in zip(iters, hists, feasible):
            if not ok:
                self.infeasible += 1
                continue
            self.solves += 1
            self.iteration_counts.append(int(it))
            for a, b in zip(h, h[1:]):
                self.max_increase = max(self.max_increase, b - a)

    def fraction_within(self, n: int) -> float:
        if not self.iteration_counts:
            return 1.0
        return float(np.mean(np.asarray(self.iteration_counts) <= n))


def rate_grid(M: int, step: float) -> np.ndarray:
    """Interior grid step, 2 step, ... strictly below log2 M."""
    J = int(round(math.log2(M) / step))
    return np.arange(1, J) * step


@dataclass
class _Candidate:
    energy: float
    rate: float
    tree: TreeRecord
    lengths: list[int]


def _v2v_code(M: int, codebook, lengths, kind: str = "V2V") -> PrefixFreeCode:
    keep = [i for i, l in enumerate(lengths) if l >= 0]
    entries = sort_entries((("x" * lengths[i]), codebook[i]) for i in keep)
    words = canonical_words([len(b) for b, _ in entries])
    return PrefixFreeCode(AskAlphabet(M), tuple(zip(words, (x for _, x in entries))), kind).checked()


@dataclass
class V2vLibrary:
    M: int
    rates: np.ndarray
    entries: list[LibraryEntry | None]
    stats: SolveStats

    def achieved(self) -> list[LibraryEntry]:
        return [e for e in self.entries if e is not None]


def build_v2v(M: int, N_max: int, step: float = 0.005, delta: float = 0.0025,
              sizes: Sequence[int] | None = None, trees: TreeSet | None = None,
              eps: float = DEFAULT_EPS) -> V2vLibrary:
    """Best V2V code per grid rate over all optimal right trees.

    For each rate and tree: optimal relaxed PMF, GHC dyadic approximation,
    realized metrics.  Every distinct dyadic candidate of a tree is pooled;
    per grid rate, the smallest realized E_C with |R_C - R*| < delta wins
    and ties go to smaller N, then smaller nu.
    """
    if M not in (2, 4):
        raise ValueError(f"V2V construction supports M in (2, 4), got {M}")
    if not 2 <= N_max <= 32:
        raise ValueError(f"N_max must be in [2, 32], got {N_max}")
    trees = trees or enumerate_optimal_trees(M, N_max)
    sizes = sorted(sizes) if sizes is not None else list(range(2, N_max + 1))
    grid = rate_grid(M, step)
    best: list[_Candidate | None] = [None] * len(grid)
    stats = SolveStats()

    for N in sizes:
        for tree in trees.records(N):
            book = tree_to_codebook(tree)
            l = np.array([len(x) for x in book])
            e = np.array([word_energy(x) for x in book])
            P, _, iters, hist, feasible = optimal_pmf_batch(l, e, grid, eps)
            stats.record(iters, hist, feasible)
            seen: set[tuple] = set()
            for j in np.flatnonzero(feasible):
                with np.errstate(divide="ignore"):
                    lengths = ghc_lengths(np.log(P[j]))
                key = tuple(lengths)
                if key in seen:
                    continue
                seen.add(key)
                keep = [i for i, v in enumerate(lengths) if v >= 0]
                if len(keep) < 2:
                    continue
                E_C, R_C = metrics_from_lengths([lengths[i] for i in keep], l[keep], e[keep])
                # a candidate competes at every grid rate it lands near
                for t in np.flatnonzero(np.abs(R_C - grid) < delta):
                    if best[t] is None or E_C < best[t].energy:
                        best[t] = _Candidate(E_C, R_C, tree, lengths)

    entries: list[LibraryEntry | None] = []
    for r, cand in zip(grid, best):
        if cand is None:
            entries.append(None)
            continue
        code = _v2v_code(M, tree_to_codebook(cand.tree), cand.lengths)
        entries.append(LibraryEntry.from_code(float(r), code, N=cand.tree.N, nu=cand.tree.nu))
    return V2vLibrary(M, grid, entries, stats)


def build_f2v(M: int, u: int, target_rate: float, trees: TreeSet | None = None) -> PrefixFreeCode:
    """Fixed-length u-bit dictionary over the optimal 2^u-leaf right tree
    whose rate 2^u u / nu is nearest the target (ties to the higher rate)."""
    N = 2**u
    if not 0 < target_rate <= math.log2(M) + 1e-12:
        raise ValueError(f"target rate must lie in (0, log2 M], got {target_rate}")
    if trees is None or trees.N_max < N:
        trees = enumerate_optimal_trees(M, N)
    records = trees.records(N)
    if not records:
        raise ValueError(f"no right tree with {N} leaves")
    tree = min(records, key=lambda t: (abs(N * u / t.nu - target_rate), t.nu))
    book = sorted(tree_to_codebook(tree), key=word_energy)
    words = [format(i, f"0{u}b") for i in range(N)]
    return PrefixFreeCode(AskAlphabet(M), tuple(zip(words, book)), "F2V").checked()
