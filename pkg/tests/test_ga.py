import numpy as np
import pytest

from shapecode.core import canonical_table1c, code_metrics, uniform_code
from shapecode.framing import FrameConfigError
from shapecode.ga import ga_analyze, normal_cdf, symbol_rate_model, truncated_moments
from shapecode.v2f import build_v2f

T1C = canonical_table1c()


def test_table1c_rate_model():
    m = symbol_rate_model(T1C)
    assert np.allclose(m.rates, [1 / 7, 3 / 7, 0.5, 0.6, 1, 5 / 3, 3, 6])
    assert np.allclose(m.q_sym, [0.570, 0.142, 0.122, 0.102, 0.041, 0.015, 0.005, 0.003], atol=1.5e-3)
    assert m.q_sym[0] == pytest.approx(0.570, abs=1e-3)
    assert m.q_sym.sum() == pytest.approx(1.0, abs=1e-15)
    assert m.mean == pytest.approx(code_metrics(T1C).R, abs=1e-12)
    assert m.variance == pytest.approx(0.195, abs=1e-3)


def test_uniform_rate_model():
    m = symbol_rate_model(uniform_code(4))
    assert set(m.rates) == {2.0}
    assert m.variance == 0.0


def test_truncated_moments_against_scipy():
    from scipy.stats import truncnorm
    for mu, var, a, b in [(0.0, 1.0, -1.0, 2.0), (3.0, 4.0, 2.5, np.inf), (5.0, 0.3, -np.inf, 5.2)]:
        s = np.sqrt(var)
        dist = truncnorm((a - mu) / s, (b - mu) / s, loc=mu, scale=s)
        mass, mean, v = truncated_moments(mu, var, a, b)
        assert mean == pytest.approx(dist.mean(), rel=1e-9)
        assert v == pytest.approx(dist.var(), rel=1e-8)
        assert mass == pytest.approx(normal_cdf(b, mu, var) - normal_cdf(a, mu, var), abs=1e-15)


def test_degenerate_variance():
    assert normal_cdf(1.0, 1.0, 0.0) == 1.0
    assert normal_cdf(0.999, 1.0, 0.0) == 0.0
    assert truncated_moments(2.0, 0.0, 0.0, 5.0) == (1.0, 2.0, 0.0)


@pytest.mark.parametrize("k,n", [(9, 24), (108, 300), (360, 1000)])
def test_trace_invariants(k, n):
    r = ga_analyze(T1C, None, k, n)
    assert np.all(np.diff(r.Phi_switch) >= -1e-15)
    assert np.all(np.diff(r.Phi_end) >= -1e-15)
    assert np.all(r.Phi_switch + r.Phi_end <= 1 + 1e-9)
    assert np.allclose(np.diff(r.xi), 1.0)
    E1 = code_metrics(T1C).E
    assert min(1.0, E1) <= r.energy <= max(E1, 5.0)
    assert len(list(r.rows())) == n + 1


def test_free_evolution_before_truncation():
    r = ga_analyze(T1C, None, 108, 300)
    m = symbol_rate_model(T1C)
    for t in range(1, 40):
        alive = 1 - r.Phi_switch[t] - r.Phi_end[t]
        if alive > 1 - 1e-12 and r.mu[t] < 108 - 12 * np.sqrt(r.sigma2[t] + 1e-300):
            assert r.mu[t + 1] == pytest.approx(r.mu[t] + m.mean, abs=1e-9)
            assert r.sigma2[t + 1] == pytest.approx(r.sigma2[t] + m.variance, abs=1e-9)


@pytest.mark.parametrize("k,n", [(108, 300), (3600, 10000)])
def test_variance_grows_then_shrinks(k, n):
    r = ga_analyze(T1C, None, k, n)
    peak = int(np.argmax(r.sigma2))
    assert 0.3 * n < peak < n
    assert r.sigma2[-1] < 0.5 * r.sigma2[peak]


def test_zero_variance_code():
    c1 = uniform_code(4)
    r = ga_analyze(c1, None, 10, 20)
    assert r.model.variance == 0.0
    assert np.all(r.sigma2 == 0.0)
    # deterministic 2 bits per symbol: no switching, termination takes over
    assert r.Phi_switch[-1] == 0.0
    assert r.Phi_end[-1] == 1.0
    assert set(np.unique(r.phi_end)) == {0.0, 1.0}
    assert 1.0 <= r.energy <= 21.0


def test_large_frame_gap():
    r = ga_analyze(T1C, None, 3600, 10000)
    assert 0 < r.gap_db <= 0.30
    small = ga_analyze(T1C, None, 108, 300)
    assert small.gap_db > r.gap_db


def test_other_alphabets():
    code, m = build_v2f(4, 3, 1.4)
    r = ga_analyze(code, None, int(1.45 * 500), 500)
    assert np.isfinite(r.energy) and r.gap_db > 0


def test_rejects_bad_rate():
    with pytest.raises(FrameConfigError):
        ga_analyze(T1C, None, 100, 100)
