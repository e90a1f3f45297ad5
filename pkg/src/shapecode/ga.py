"""Gaussian approximation of the framing process.

The cumulative number of bits Theta(t) carried by the first t symbols of a
frame is modeled as N(mu(t), sigma^2(t)).  While C1 is active each symbol
adds a rate drawn from the symbol-level rate distribution (mean R_C1,
variance S^2); the frames that switched to C2 or ran out of bits are cut
away by truncating the Gaussian before the next step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .core import PrefixFreeCode, code_metrics, uniform_code
from .framing import FrameConfig
from .mbdist import mb_energy_at_rate

SIGMA2_FLOOR = 1e-30
_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class SymbolRateModel:
    rates: np.ndarray
    q_sym: np.ndarray
    mean: float
    variance: float


def symbol_rate_model(code: PrefixFreeCode) -> SymbolRateModel:
    """Per-codeword rates r_n = l(b_n)/l(x_n), weighted by the chance that a
    given output symbol belongs to codeword n."""
    m = code_metrics(code)
    lb, lx = code.info_lengths.astype(float), code.code_lengths.astype(float)
    r = lb / lx
    q = m.leaf_pmf * lx
    q = q / q.sum()
    mean = float(q @ r)
    return SymbolRateModel(r, q, mean, max(float(q @ r**2) - mean**2, 0.0))


def normal_cdf(x: float, mu: float, var: float) -> float:
    if var <= SIGMA2_FLOOR:
        return 1.0 if x >= mu else 0.0
    z = (x - mu) / math.sqrt(var)
    return min(1.0, max(0.0, 0.5 * float(erfc(-z / _SQRT2))))


def truncated_moments(mu: float, var: float, a: float, b: float) -> tuple[float, float, float]:
    """Mass, mean and variance of N(mu, var) restricted to [a, b]."""
    if var <= SIGMA2_FLOOR:
        inside = a <= mu <= b
        return (1.0 if inside else 0.0), min(max(mu, a), b), 0.0
    s = math.sqrt(var)
    alpha, beta = (a - mu) / s, (b - mu) / s
    Za = 0.5 * float(erfc(-alpha / _SQRT2))
    Zb = 0.5 * float(erfc(-beta / _SQRT2))
    mass = Zb - Za
    if mass <= 1e-300:
        return 0.0, min(max(mu, a), b), 0.0
    pa = math.exp(-0.5 * alpha * alpha) / _SQRT2PI if math.isfinite(alpha) else 0.0
    pb = math.exp(-0.5 * beta * beta) / _SQRT2PI if math.isfinite(beta) else 0.0
    ta = alpha * pa if math.isfinite(alpha) else 0.0
    tb = beta * pb if math.isfinite(beta) else 0.0
    mean = mu + s * (pa - pb) / mass
    v = var * (1.0 + (ta - tb) / mass - ((pa - pb) / mass) ** 2)
    return mass, min(max(mean, a), b), max(v, 0.0)


@dataclass
class GaResult:
    t: np.ndarray
    xi: np.ndarray
    mu: np.ndarray
    sigma2: np.ndarray
    phi_switch: np.ndarray
    phi_end: np.ndarray
    Phi_switch: np.ndarray
    Phi_end: np.ndarray
    energy: float
    gap_db: float
    model: SymbolRateModel

    def rows(self):
        cols = ("t", "xi", "mu", "sigma2", "phi_switch", "phi_end", "Phi_switch", "Phi_end")
        for i in range(len(self.t)):
            yield {c: getattr(self, c)[i] for c in cols}


def ga_analyze(c1: PrefixFreeCode, c2: PrefixFreeCode | None, k: int, n: int) -> GaResult:
    """Forward recursion over t = 1..n and the resulting framed energy.

    Arrays are indexed by t (entry 0 holds the initial state).  The
    switch probability at t uses the threshold xi(t); the moment update
    truncates at xi(t-1).  When xi exceeds k, termination takes precedence
    over switching, as it does in the encoder loop.
    """
    config = FrameConfig(k, n, c1, c2)
    model = symbol_rate_model(c1)
    R1, S2 = model.mean, model.variance
    R2 = float(config.bits_per_symbol)
    E1 = code_metrics(c1).avg_symbol_energy
    E2 = code_metrics(config.c2).avg_symbol_energy
    lmax, lmin = config.lmax_x, config.lmin_b

    t = np.arange(n + 1)
    xi = R2 * (t - n - 1 + lmax) + k - lmin
    mu, s2 = np.zeros(n + 1), np.zeros(n + 1)
    phs, phe = np.zeros(n + 1), np.zeros(n + 1)
    Phs, Phe = np.zeros(n + 1), np.zeros(n + 1)
    for i in range(1, n + 1):
        alive = max(0.0, 1.0 - Phs[i - 1] - Phe[i - 1])
        F_end = normal_cdf(k, mu[i - 1], s2[i - 1])
        F_swi = min(normal_cdf(xi[i], mu[i - 1], s2[i - 1]), F_end)
        phs[i] = alive * F_swi
        phe[i] = alive * (1.0 - F_end)
        Phs[i] = Phs[i - 1] + phs[i]
        Phe[i] = Phe[i - 1] + phe[i]
        _, m, v = truncated_moments(mu[i - 1], s2[i - 1], xi[i - 1], float(k))
        mu[i] = m + R1
        s2[i] = v + S2

    ts = slice(1, n + 1)
    c1_share = 1.0 - Phs[ts] - Phe[:n]
    energy = float(np.mean(c1_share * E1 + Phs[ts] * E2 + Phe[:n] * 1.0))
    gap = 10.0 * math.log10(energy / mb_energy_at_rate(c1.alphabet, k / n))
    return GaResult(t, xi, mu, s2, phs, phe, Phs, Phe, energy, gap, model)
