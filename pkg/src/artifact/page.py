"""Page subsystem entropy and information, thermal references, effective
dimensions.

Page's combinatorial quantities are in nats; the dynamical information is in
bits.  ``NATS_PER_BIT`` converts between them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma

from .analytic import Z_STAR_LIMIT, long_time_z, negative_binomial
from .fock import DEFAULT_POLICY, ProbDist, TruncationPolicy, mean_and_variance, truncation_length
from .specfun import shannon_entropy_bits

NATS_PER_BIT = math.log(2.0)
_DIRECT_SUM_LIMIT = 1_000_000
_MN_LIMIT = 2 ** 53


@dataclass(frozen=True)
class PagePair:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("subsystem dimensions must be >= 1")


def _harmonic_difference(lo: int, hi: int) -> float:
    """sum_{k=lo+1}^{hi} 1/k."""
    if hi <= lo:
        return 0.0
    if hi <= _DIRECT_SUM_LIMIT:
        k = np.arange(lo + 1, hi + 1, dtype=float)
        return math.fsum(1.0 / k)
    return float(digamma(hi + 1.0) - digamma(lo + 1.0))


def page_entropy_information(pair: PagePair) -> tuple[float, float]:
    """Average entropy S_{m,n} of the m-dimensional subsystem and I = ln m - S.

    m <= n: S = sum_{k=n+1}^{mn} 1/k - (m-1)/(2n)
    m >  n: S = sum_{k=m+1}^{mn} 1/k - (n-1)/(2m)
    """
    m, n = pair.m, pair.n
    if m * n > _MN_LIMIT:
        raise OverflowError(f"m*n = {m * n} exceeds the supported range")
    small, large = (m, n) if m <= n else (n, m)
    s = _harmonic_difference(large, m * n) - (small - 1) / (2.0 * large)
    return s, math.log(m) - s


def divisors(total: int) -> list[int]:
    small, big = [], []
    d = 1
    while d * d <= total:
        if total % d == 0:
            small.append(d)
            if d * d != total:
                big.append(total // d)
        d += 1
    return small + big[::-1]


def page_curve(total: int = 291_600) -> list[tuple[int, int, float, float, float]]:
    """(m, n, ln m, S, I) over every factorization total = m n."""
    rows = []
    for m in divisors(total):
        s, i = page_entropy_information(PagePair(m, total // m))
        rows.append((m, total // m, math.log(m), s, i))
    return rows


def thermal_reference(nbar: float, policy: TruncationPolicy = DEFAULT_POLICY) -> ProbDist:
    """Geometric distribution with z = nbar / (nbar + 1)."""
    if nbar < 0:
        raise ValueError("nbar must be nonnegative")
    z = nbar / (nbar + 1.0)
    w = negative_binomial(z, 0, truncation_length(z, 0, policy))
    return ProbDist(w, origin="thermal reference", discarded_mass=max(0.0, 1.0 - w.sum()))


def thermal_entropy_bits(nbar: float) -> float:
    """(nbar + 1) log2(nbar + 1) - nbar log2(nbar)."""
    if nbar <= 0:
        return 0.0
    return (nbar + 1.0) * math.log2(nbar + 1.0) - nbar * math.log2(nbar)


def page_information_dynamic(dists) -> np.ndarray:
    """I(tau) = S_thermal(nbar_s(tau)) - S(rho_s(tau)) in bits."""
    out = []
    for d in dists:
        mean, _ = mean_and_variance(d)
        out.append(thermal_entropy_bits(mean) - shannon_entropy_bits(d))
    return np.array(out)


def negative_binomial_entropy_bits(z: float, n_s0: int = 0,
                                   policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    if n_s0 == 0:
        if z == 0.0:
            return 0.0
        return -math.log2(1.0 - z) - z / (1.0 - z) * math.log2(z)
    w = negative_binomial(z, n_s0, truncation_length(z, n_s0, policy))
    return shannon_entropy_bits(w / w.sum())


def page_information_analytic(z, n_s0: int = 0, z_star: float = Z_STAR_LIMIT,
                              policy: TruncationPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Analytic variant: 0 up to z*, then S(rho_<(z)) - S(rho_>(z))."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.zeros_like(z)
    for j, zj in enumerate(z):
        if zj > z_star:
            zl = float(long_time_z(zj))
            out[j] = (negative_binomial_entropy_bits(zj, n_s0, policy)
                      - negative_binomial_entropy_bits(zl, n_s0, policy))
    return out


def effective_dimensions(dist: ProbDist) -> tuple[float, float]:
    """(2 nbar + 1, 1 + Delta n): purity-based via the thermal reference of
    the mean, and variance-based from the distribution itself."""
    mean, var = mean_and_variance(dist)
    return 2.0 * mean + 1.0, 1.0 + math.sqrt(var)
