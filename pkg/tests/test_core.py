from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shapecode.core import (
    AskAlphabet,
    InvalidCodeError,
    PrefixFreeCode,
    canonical_table1c,
    code_metrics,
    metrics_from_lengths,
    uniform_code,
    validate_code,
    word_energy,
)
from shapecode.ghc import canonical_words
from shapecode.mbdist import entropy_bits


def make(M, pairs, kind="V2V"):
    return PrefixFreeCode(AskAlphabet(M), tuple((b, tuple(int(c) for c in x)) for b, x in pairs), kind)


def test_alphabet():
    a = AskAlphabet(4)
    assert a.amplitudes == (1, 3, 5, 7)
    assert a.energies == (1, 9, 25, 49)
    assert a.bits_per_symbol == 2
    assert a.index(5) == 2
    with pytest.raises(ValueError):
        AskAlphabet(1)


def test_table1c_vectors():
    code = canonical_table1c()
    assert list(code.code_lengths) == [7, 7, 6, 5, 4, 3, 2, 1]
    assert list(code.energies) == [7, 15, 14, 13, 12, 11, 10, 9]
    assert list(code.info_lengths) == [1, 3, 3, 3, 4, 5, 6, 6]
    assert validate_code(code).kraft_sum == 1
    assert validate_code(code).ok


def test_table1c_metrics():
    m = code_metrics(canonical_table1c())
    assert m.resolution_rate == pytest.approx(0.3613, abs=5e-4)
    assert m.avg_symbol_energy == pytest.approx(10.140625 / 6.140625, rel=1e-15)
    assert m.expected_codeword_length == 6.140625
    assert m.leaf_pmf.sum() == 1.0


def test_uniform_metrics():
    m = code_metrics(uniform_code(2))
    assert (m.resolution_rate, m.avg_symbol_energy) == (1.0, 5.0)
    m4 = code_metrics(uniform_code(4))
    assert (m4.resolution_rate, m4.avg_symbol_energy) == (2.0, 21.0)


def test_validate_examples():
    assert validate_code(make(2, [("0", "1"), ("10", "31"), ("11", "33")])).ok
    bad_bits = validate_code(make(2, [("0", "1"), ("01", "3")]))
    assert not bad_bits.ok
    assert any("'0' is a prefix of '01'" in p for p in bad_bits.problems)
    bad_words = validate_code(make(2, [("0", "1"), ("1", "11")]))
    assert not bad_words.ok
    assert any("prefix" in p and "codeword" in p for p in bad_words.problems)


def test_validate_reports_everything():
    r = validate_code(make(2, [("0", "1"), ("0", "3")]))
    assert any("duplicate information word" in p for p in r.problems)
    assert r.kraft_sum == Fraction(1)
    r = validate_code(make(2, [("00", "1"), ("01", "3")]))
    assert r.kraft_sum == Fraction(1, 2)
    assert not r.ok
    r = validate_code(make(2, [("0", "1"), ("1", "5")]))
    assert any("outside 2-ASK" in p for p in r.problems)
    r = validate_code(make(2, [("", "1"), ("1", "")]))
    assert any("empty information word" in p for p in r.problems)
    assert any("empty codeword" in p for p in r.problems)
    assert not validate_code(make(2, [("0", "1")])).ok


def test_incomplete_code_rejected_by_metrics():
    with pytest.raises(InvalidCodeError):
        code_metrics(make(2, [("00", "1"), ("01", "3")]))


def test_json_roundtrip_exact():
    code = canonical_table1c()
    text = code.to_json()
    assert '"version": 1' in text
    back = PrefixFreeCode.from_json(text)
    assert back == code
    assert back.entries == code.entries
    d = code.to_dict()
    assert d["entries"][0] == {"b": "0", "x": [1, 1, 1, 1, 1, 1, 1]}
    d["version"] = 2
    with pytest.raises(ValueError):
        PrefixFreeCode.from_dict(d)


def test_float_metrics_agree_with_exact():
    code = canonical_table1c()
    E, R = metrics_from_lengths(code.info_lengths, code.code_lengths, code.energies)
    m = code_metrics(code)
    assert E == pytest.approx(m.E, rel=1e-12)
    assert R == pytest.approx(m.R, rel=1e-12)


# random complete codes: a full binary left tree and a full M-ary right tree
# with matching leaf counts, built by repeated leaf splitting
@st.composite
def random_codes(draw):
    M = draw(st.sampled_from([2, 4]))
    splits = draw(st.integers(1, 6))
    left = [""]
    right = [()]
    for _ in range(splits):
        i = draw(st.integers(0, len(left) - 1))
        b = left.pop(i)
        left += [b + "0", b + "1"]
        j = draw(st.integers(0, len(right) - 1))
        x = right.pop(j)
        right += [x + (1,), x + (3,)]
    # binary right-tree splits are valid words for any M
    perm = draw(st.permutations(range(len(left))))
    entries = tuple((left[i], right[k]) for k, i in enumerate(perm))
    return PrefixFreeCode(AskAlphabet(M), entries)


@given(random_codes())
@settings(max_examples=60, deadline=None)
def test_random_codes_valid_and_bounded(code):
    assert validate_code(code).ok
    m = code_metrics(code)
    assert m.avg_symbol_energy > 0
    assert 0 < m.resolution_rate <= np.log2(code.alphabet.M) + 1e-12
    assert m.leaf_pmf.sum() == pytest.approx(1.0, abs=1e-15)


@given(random_codes(), st.randoms())
@settings(max_examples=60, deadline=None)
def test_metrics_permutation_invariant(code, rnd):
    entries = list(code.entries)
    rnd.shuffle(entries)
    shuffled = PrefixFreeCode(code.alphabet, tuple(entries), code.kind)
    a, b = code_metrics(code), code_metrics(shuffled)
    assert (a.E, a.R) == (b.E, b.R)


@given(random_codes())
@settings(max_examples=60, deadline=None)
def test_rate_below_symbol_entropy(code):
    # R_C <= H(symbol marginal) <= log2 M
    m = code_metrics(code)
    weights = np.zeros(code.alphabet.M)
    for p, x in zip(m.leaf_pmf, code.codebook):
        for s in x:
            weights[code.alphabet.index(s)] += p
    H = entropy_bits(weights / weights.sum())
    assert m.resolution_rate <= H + 1e-12
    assert H <= np.log2(code.alphabet.M) + 1e-12


@given(random_codes())
@settings(max_examples=30, deadline=None)
def test_energy_recomputes(code):
    for e, x in zip(code.energies, code.codebook):
        assert e == sum(s * s for s in x) == word_energy(x)


def test_canonical_words_table1c():
    assert canonical_words([1, 3, 3, 3, 4, 5, 6, 6]) == canonical_table1c().dictionary
