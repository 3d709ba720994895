"""Stimulated emission, Holevo capacity and gray-body scattering.

A '0' is sent by injecting one particle into the signal mode s (the
anti-signal mode s-bar starts empty) and a '1' by the reverse.  The
receiver sees the product of the s and s-bar photon-number distributions.
With gray-body scattering the signal is first mixed with an infalling mode
c on a beam splitter of transmittance cos^2(theta); the injected particle
then rides in c.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlogy

from .analytic import Z_STAR_LIMIT, long_time_z
from .fock import DEFAULT_POLICY, ProbDist, TruncationPolicy, truncation_length
from .specfun import LN2, geometric_series, log_binom, shannon_entropy_bits

BS_CAP = 400


def _branch_z(z: float, branch: str, z_star: float = Z_STAR_LIMIT) -> float:
    if branch == "short":
        return float(z)
    if branch == "long":
        return float(long_time_z(z))
    if branch == "combined":
        return float(z) if z <= z_star else float(long_time_z(z))
    raise ValueError(f"unknown branch {branch!r}")


def _renormalized(w: np.ndarray, origin: str) -> ProbDist:
    total = float(w.sum())
    return ProbDist(w / total, origin=origin, discarded_mass=max(0.0, 1.0 - total))


# ---------------------------------------------------------------------------
# Stimulated emission


def stimulated_dist(z: float, m_init: int, policy: TruncationPolicy = DEFAULT_POLICY) -> ProbDist:
    """(1 - z)^(m+1) z^n C(m+n, n), placed at the total occupation m + n."""
    length = truncation_length(z, m_init, policy)
    n = np.arange(length, dtype=float)
    w = np.zeros(m_init + length)
    if z == 0.0:
        w[m_init] = 1.0
    else:
        w[m_init:] = np.exp(log_binom(m_init + n, n) + (m_init + 1) * math.log1p(-z) + n * math.log(z))
    return _renormalized(w, "stimulated")


def _log2_series(z: float, weight) -> float:
    return geometric_series(z, lambda n: weight(n) * np.log2(n + 1.0))


def component_entropies(z: float) -> tuple[float, float]:
    """Entropies (bits) of the spontaneous and one-particle stimulated states."""
    if not (0.0 <= z < 1.0):
        raise ValueError("z must lie in [0, 1)")
    if z == 0.0:
        return 0.0, 0.0
    one = -math.log2(1.0 - z) - z / (1.0 - z) * math.log2(z)
    s_k0 = one
    s_k1 = 2.0 * one - (1.0 - z) ** 2 * _log2_series(z, lambda n: n + 1.0)
    return s_k0, s_k1


def holevo_chi_closed(z: float) -> float:
    """chi = 1 - (1-z)^3/2 sum z^n (n+1)(n+2) log2(n+1) + (1-z)^2 sum z^n (n+1) log2(n+1)."""
    if not (0.0 <= z < 1.0):
        raise ValueError("z must lie in [0, 1)")
    if z == 0.0:
        return 1.0
    x = 1.0 - z
    first = geometric_series(z, lambda n: 0.5 * x ** 3 * (n + 1.0) * (n + 2.0) * np.log2(n + 1.0))
    second = geometric_series(z, lambda n: x ** 2 * (n + 1.0) * np.log2(n + 1.0))
    return 1.0 - first + second


def holevo_chi(z: float, branch: str = "short", z_star: float = Z_STAR_LIMIT,
               policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    if z < 0.0 or z > policy.z_max:
        raise ValueError(f"z must lie in [0, policy.z_max={policy.z_max!r}]")
    return holevo_chi_closed(_branch_z(z, branch, z_star))


# terminal value at z = 1: the two series differ by psi(3) - psi(2) = 1/2 nat
CHI_TERMINAL = 1.0 - 1.0 / (2.0 * LN2)


@dataclass
class ChannelEnsemble:
    dist_s_0: ProbDist
    dist_sbar_0: ProbDist
    dist_s_1: ProbDist
    dist_sbar_1: ProbDist
    p_mix: float = 0.5

    def __post_init__(self):
        if not (0.0 <= self.p_mix <= 1.0):
            raise ValueError("p_mix must lie in [0, 1]")

    @property
    def discarded_mass(self) -> float:
        return max(d.discarded_mass for d in
                   (self.dist_s_0, self.dist_sbar_0, self.dist_s_1, self.dist_sbar_1))


def stimulated_ensemble(z: float, policy: TruncationPolicy = DEFAULT_POLICY) -> ChannelEnsemble:
    """Ensemble without scattering: the injected particle stimulates its mode."""
    stim = stimulated_dist(z, 1, policy)
    spont = stimulated_dist(z, 0, policy)
    return ChannelEnsemble(stim, spont, spont, stim)


def _grid_entropy(w: np.ndarray) -> float:
    nz = w[w > 0.0]
    return float(-np.sum(nz * np.log2(nz)))


def holevo_from_ensemble(ens: ChannelEnsemble, p_mix: float | None = None) -> float:
    """H[p rho_0 + (1-p) rho_1] - p H[rho_0] - (1-p) H[rho_1] on the product grid."""
    p = ens.p_mix if p_mix is None else p_mix
    ls = max(len(ens.dist_s_0), len(ens.dist_s_1))
    lb = max(len(ens.dist_sbar_0), len(ens.dist_sbar_1))
    a0, a1 = ens.dist_s_0.padded(ls), ens.dist_s_1.padded(ls)
    b0, b1 = ens.dist_sbar_0.padded(lb), ens.dist_sbar_1.padded(lb)
    mix = p * np.outer(a0, b0) + (1.0 - p) * np.outer(a1, b1)
    h0 = shannon_entropy_bits(a0) + shannon_entropy_bits(b0)
    h1 = shannon_entropy_bits(a1) + shannon_entropy_bits(b1)
    return _grid_entropy(mix) - p * h0 - (1.0 - p) * h1


def holevo_chi_first_principles(z: float, p_mix: float = 0.5,
                                policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    return holevo_from_ensemble(stimulated_ensemble(z, policy), p_mix)


# ---------------------------------------------------------------------------
# Beam splitter


def bs_coefficients(n: int, n_prime: int, theta: float, cap: int = BS_CAP) -> np.ndarray:
    """f_p(n, n') for p = 0..n+n': |n>_s |n'>_c -> sum_p f_p |p>_s |n+n'-p>_c.

    f_p = sum_{q+q'=p} C(n,q) C(n',q') sqrt(p! (n+n'-p)! / (n! n'!))
          cos^(n'+q-q') theta (-i sin theta)^(n-q+q').
    """
    if n < 0 or n_prime < 0:
        raise ValueError("occupations must be nonnegative")
    if n + n_prime > cap:
        raise ValueError(f"n + n' = {n + n_prime} exceeds cap {cap}")
    c, s = math.cos(theta), math.sin(theta)
    total = n + n_prime
    out = np.zeros(total + 1, dtype=complex)
    q = np.arange(n + 1)[:, None]
    qp = np.arange(n_prime + 1)[None, :]
    p = q + qp
    log_mag = (log_binom(n, q) + log_binom(n_prime, qp)
               + 0.5 * (gammaln(p + 1.0) + gammaln(total - p + 1.0)
                        - gammaln(n + 1.0) - gammaln(n_prime + 1.0))
               + xlogy(n_prime + q - qp, c) + xlogy(n - q + qp, s))
    phase = (-1j) ** ((n - q + qp) % 4)
    terms = np.exp(log_mag) * phase
    np.add.at(out, p.ravel(), terms.ravel())
    return out


@dataclass(frozen=True)
class GrayBodyParams:
    theta: float
    r: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi / 2 + 1e-15):
            raise ValueError("theta must lie in [0, pi/2]")

    @property
    def transmittance(self) -> float:
        return math.cos(self.theta) ** 2

    @property
    def absorptivity(self) -> float:
        return math.cos(self.theta) ** 2 * math.cosh(self.r) ** 2

    def bogoliubov(self) -> tuple[float, float, float]:
        """(alpha, beta, gamma) with alpha^2 - beta^2 + gamma^2 = 1."""
        ch = math.cosh(self.r)
        return ch * math.cos(self.theta), math.sinh(self.r), ch * math.sin(self.theta)


def graybody_ensemble(z: float, theta: float, policy: TruncationPolicy = DEFAULT_POLICY) -> ChannelEnsemble:
    """Send-'0' / send-'1' distributions after beam-splitter scattering.

    With q = z cos^2 / (1 - z sin^2):
      p_k^s(1)    = (1 - z) / (1 - z sin^2) q^k
      p_m^sbar(1) = m (1 - z)^2 z^(m-1)
      p_k^s(0)    = [cos^2 + k tan^2 (1 - z)^2 / z] p_k^s(1) / (1 - z sin^2)
      p_m^sbar(0) = (1 - z) z^m
    """
    GrayBodyParams(theta)
    c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
    if z < 0.0 or z > policy.z_max:
        raise ValueError(f"z must lie in [0, policy.z_max={policy.z_max!r}]")
    d = 1.0 - z * s2
    q = z * c2 / d
    # the send-0 signal carries the injected particle, hence one extra slot
    length = truncation_length(q, 1, policy) + 1
    k = np.arange(length, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_q = math.log(q) if q > 0 else -np.inf
        qk = np.exp(np.where(k == 0, 0.0, k * log_q))
        qk1 = np.exp(np.where(k <= 1, 0.0, (k - 1) * log_q))
    s_one = (1.0 - z) / d * qk
    # k tan^2 (1-z)^2 / z * p_k(1) written without the 1/z
    extra = np.where(k >= 1, k * s2 * (1.0 - z) ** 3 * qk1 / d ** 2, 0.0)
    s_zero = (c2 * s_one + extra) / d
    return ChannelEnsemble(
        dist_s_0=_renormalized(s_zero, "graybody s|0"),
        dist_sbar_0=stimulated_dist(z, 0, policy),
        dist_s_1=_renormalized(s_one, "graybody s|1"),
        dist_sbar_1=stimulated_dist(z, 1, policy),
    )


def holevo_chi_graybody(z: float, theta: float, branch: str = "short", p_mix: float = 0.5,
                        z_star: float = Z_STAR_LIMIT, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    zb = _branch_z(z, branch, z_star)
    return holevo_from_ensemble(graybody_ensemble(zb, theta, policy), p_mix)
