import itertools
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shapecode.ghc import (
    DyadicPmf,
    canonical_words,
    dyadic_divergence,
    dyadic_to_dictionary,
    ghc_dyadic,
    ghc_lengths,
)

MAX_LEN = 8


@lru_cache(maxsize=None)
def all_dyadic(N: int) -> np.ndarray:
    """Every dyadic PMF on N entries with lengths <= MAX_LEN (0 = pruned)."""
    full = 1 << MAX_LEN
    rows = []
    for ls in itertools.product(range(MAX_LEN + 1), repeat=N):
        # length 0 here marks a pruned entry; a lone survivor gets probability 1
        alive = [l for l in ls if l > 0]
        if not alive:
            continue
        if sum(full >> l for l in alive) == full:
            rows.append([2.0 ** -l if l else 0.0 for l in ls])
    for i in range(N):
        rows.append([1.0 if j == i else 0.0 for j in range(N)])
    return np.array(rows)


def best_divergence(p: np.ndarray) -> float:
    D = all_dyadic(len(p))
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(D > 0, D * np.log2(D / p), 0.0)
    return float(terms.sum(axis=1).min())


def test_already_dyadic():
    d = ghc_dyadic([0.5, 0.25, 0.25])
    assert d.lengths == (1, 2, 2)
    assert np.allclose(d.probabilities, [0.5, 0.25, 0.25])


def test_prunes_small_entry():
    d = ghc_dyadic([0.9, 0.1])
    assert d.lengths == (0, -1)
    assert d.probabilities.tolist() == [1.0, 0.0]
    assert dyadic_divergence(d.probabilities, [0.9, 0.1]) == pytest.approx(np.log2(1 / 0.9))
    assert dyadic_divergence([0.5, 0.5], [0.9, 0.1]) == pytest.approx(0.737, abs=1e-3)


def test_four_entries():
    d = ghc_dyadic([0.4, 0.3, 0.2, 0.1])
    assert d.probabilities.tolist() == [0.5, 0.25, 0.125, 0.125]
    assert dyadic_divergence(d.probabilities, [0.4, 0.3, 0.2, 0.1]) == pytest.approx(
        best_divergence(np.array([0.4, 0.3, 0.2, 0.1])), abs=1e-12)


def test_rejects_empty():
    with pytest.raises(ValueError):
        ghc_dyadic([0.0, 0.0])
    with pytest.raises(ValueError):
        ghc_dyadic([-0.1, 1.1])


def test_optimal_against_brute_force():
    rng = np.random.default_rng(12345)
    for _ in range(100):
        N = int(rng.integers(2, 7))
        p = rng.dirichlet(np.full(N, 0.7))
        p = np.maximum(p, 1e-300)
        p /= p.sum()
        got = dyadic_divergence(ghc_dyadic(p).probabilities, p)
        assert got <= best_divergence(p) + 1e-12


pmfs = st.lists(st.floats(1e-6, 1.0), min_size=2, max_size=40).map(
    lambda w: np.array(w) / np.sum(w))


@given(pmfs)
@settings(max_examples=200, deadline=None)
def test_kraft_equality(p):
    d = ghc_dyadic(p)
    alive = [l for l in d.lengths if l >= 0]
    top = max(alive)
    assert sum(1 << (top - l) for l in alive) == 1 << top


@given(st.lists(st.integers(1, 12), min_size=1, max_size=6))
@settings(max_examples=200, deadline=None)
def test_identity_on_dyadic(splits):
    # grow a full binary tree by splitting the chosen leaves
    lengths = [0]
    for s in splits:
        i = s % len(lengths)
        l = lengths.pop(i)
        lengths += [l + 1, l + 1]
    p = np.exp2(-np.array(lengths, dtype=float))
    assert ghc_dyadic(p).lengths == tuple(lengths)


def test_log_domain_matches():
    p = np.array([0.4, 0.3, 0.2, 0.1])
    assert ghc_lengths(np.log(p)) == list(ghc_dyadic(p).lengths)


@pytest.mark.parametrize("lengths,words", [
    ((1, 2, 2), ["0", "10", "11"]),
    ((1, 3, 3, 3, 4, 5, 6, 6), ["0", "100", "101", "110", "1110", "11110", "111110", "111111"]),
    ((2, 2, 2, 2), ["00", "01", "10", "11"]),
])
def test_dictionary_examples(lengths, words):
    keep, got = dyadic_to_dictionary(DyadicPmf(lengths))
    assert keep == list(range(len(lengths)))
    assert got == words


def test_dictionary_drops_pruned():
    keep, words = dyadic_to_dictionary(DyadicPmf((1, -1, 2, 2)), codebook_order=[7, 8, 9, 10])
    assert keep == [7, 9, 10]
    assert words == ["0", "10", "11"]


def test_dictionary_rejects_incomplete():
    with pytest.raises(ValueError):
        dyadic_to_dictionary(DyadicPmf((1, 2)))


def test_canonical_words_out_of_order():
    assert canonical_words([2, 1, 2]) == ["10", "0", "11"]
