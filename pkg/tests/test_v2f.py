import numpy as np
import pytest

from shapecode.core import code_metrics, uniform_code, validate_code
from shapecode.mbdist import entropy_bits
from shapecode.v2f import (
    DegenerateCodeError,
    all_v2f_codes,
    balanced_codebook,
    build_v2f,
    realized_rates,
    sweep_v2f,
)

FINE = np.round(np.arange(1, 1001) * 0.001, 10)


def test_full_rate_is_uniform():
    code, m = build_v2f(2, 3, 1.0)
    assert len(code) == 8
    assert set(code.info_lengths) == {3}
    assert m.resolution_rate == 1.0
    assert m.avg_symbol_energy == 5.0


def test_five_rates_at_v3():
    rates = {round(r, 12) for r in realized_rates(2, 3, FINE) if r > 0}
    assert len(rates) == 5
    assert 1.0 in rates


def test_v6_gap():
    code, _ = build_v2f(2, 6, 0.6)
    entry = sweep_v2f(2, 6, [0.6], window=None)[0]
    assert validate_code(code).ok
    assert entry.gap_db <= 0.1


def test_sixteen_ask_cardinality():
    code, m = build_v2f(16, 3, 3.5)
    assert len(code) == 4096
    assert validate_code(code).ok
    assert 3.4 < m.resolution_rate <= 4.0


def test_sweep_coarse_grid():
    grid = np.round(np.arange(1, 11) * 0.1, 10)
    lib = sweep_v2f(2, 12, grid)
    assert all(e is not None for e in lib)
    for t, e in zip(grid, lib):
        assert e.rate >= t - 1e-12
        assert 0 <= e.gap_db < 0.1
    assert lib[-1].gap_db == 0.0


def test_sweep_single_symbol_uniform():
    (e,) = sweep_v2f(2, 1, [1.0])
    assert e.code.entries == tuple((b, x) for b, x in uniform_code(2).entries)
    assert e.params["v"] == 1


def test_sweep_window():
    lib = sweep_v2f(2, 3, FINE, window=0.001)
    for t, e in zip(FINE, lib):
        if e is not None:
            assert t - 1e-12 <= e.rate < t + 0.001


def test_guards():
    with pytest.raises(ValueError):
        build_v2f(2, 13, 0.5)
    with pytest.raises(ValueError):
        build_v2f(2, 3, 1.5)
    with pytest.raises(ValueError):
        sweep_v2f(2, 3, [0.1, 0.1005])
    with pytest.raises(DegenerateCodeError):
        build_v2f(2, 2, 0.05)


@pytest.mark.parametrize("M,v_max", [(2, 8), (4, 4), (8, 2), (16, 2)])
def test_library_invariants(M, v_max):
    grid = np.linspace(0.05, 1.0, 40) * np.log2(M)
    for e in all_v2f_codes(M, v_max, grid):
        assert validate_code(e.code).ok
        m = code_metrics(e.code)
        v = e.params["v"]
        assert set(e.code.code_lengths) == {v}
        # dyadic leaves: the rate is the leaf entropy per symbol
        assert m.resolution_rate == pytest.approx(entropy_bits(m.leaf_pmf) / v, rel=1e-12)
        assert e.gap_db >= -1e-9


def test_balanced_codebook_order():
    assert balanced_codebook(2, 2) == [(1, 1), (1, 3), (3, 1), (3, 3)]
