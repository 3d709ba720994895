"""Log-negativity, mutual information and tripartite information.

Every evaluator works on amplitude magnitudes.  The ``*_from_amplitudes``
functions take explicit amplitude arrays (numeric or analytic, truncated or
not); the z-based wrappers build the short- or long-time analytic amplitudes
first.
"""
from __future__ import annotations

import enum
import math

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import xlogy

from .analytic import Z_STAR_LIMIT, long_time_z
from .fock import DEFAULT_POLICY, AmplitudeState, TruncationPolicy, truncation_length
from .specfun import log_binom, shannon_entropy_bits


class BipartitionLabel(str, enum.Enum):
    PumpIdlerVsSignal = "pump_idler_vs_signal"
    PairVsPair = "pair_vs_pair"
    SignalVsIdler = "signal_vs_idler"
    SignalVsSpectator = "signal_vs_spectator"
    PumpIdlerVsSignal_EntangledIC = "pump_idler_vs_signal_entangled_ic"
    SignalVsInfaller_BS = "signal_vs_infaller_bs"


def _branch_z(z: float, branch: str, z_star: float = Z_STAR_LIMIT) -> float:
    if branch == "short":
        return float(z)
    if branch == "long":
        return float(long_time_z(z))
    if branch == "combined":
        return float(z) if z <= z_star else float(long_time_z(z))
    raise ValueError(f"unknown branch {branch!r}")


def analytic_magnitudes(z: float, n_s0: int = 0, policy: TruncationPolicy = DEFAULT_POLICY) -> np.ndarray:
    """|c_n| = sqrt((1 - z)^(n_s0+1) z^n C(n_s0+n, n)), truncated so the
    neglected sum of magnitudes is below the policy epsilon."""
    if z == 0.0:
        return np.array([1.0])
    # sum |c_n| decays like sqrt(z)^n, so truncate on the sqrt(z) tail.
    length = truncation_length(math.sqrt(z), n_s0, policy)
    n = np.arange(length, dtype=float)
    return np.exp(0.5 * (log_binom(n_s0 + n, n) + (n_s0 + 1) * math.log1p(-z) + n * math.log(z)))


def _mags(amps) -> np.ndarray:
    vals = amps.values if isinstance(amps, AmplitudeState) else amps
    return np.abs(np.asarray(vals))


_FFT_MIN_LENGTH = 20_000


def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full convolution; FFT for long inputs, where the direct sum is quadratic.
    Inputs are weighted amplitudes, so the FFT's absolute error (relative to
    the largest entry) only touches terms that are negligible in the sums."""
    if min(a.size, b.size) < _FFT_MIN_LENGTH:
        return np.convolve(a, b)
    return np.maximum(fftconvolve(a, b), 0.0)


def logneg_from_negativity(negativity: float) -> float:
    """E_N = log2(1 + 2 N)."""
    return float(np.log2(1.0 + 2.0 * negativity))


# ---------------------------------------------------------------------------
# Single pair


def negativity_pump_idler_vs_signal(amps) -> float:
    """N = [(sum |c_n|)^2 - sum |c_n|^2] / 2 for the pure single-pair state."""
    c = _mags(amps)
    return 0.5 * (c.sum() ** 2 - np.sum(c * c))


def logneg_pump_idler_vs_signal(amps) -> float:
    """E_N = 2 log2(sum_n |c_n|)."""
    c = _mags(amps)
    return float(2.0 * np.log2(c.sum()))


def logneg_pump_idler_vs_signal_analytic(z: float, n_s0: int = 0, branch: str = "short",
                                         policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    return logneg_pump_idler_vs_signal(analytic_magnitudes(_branch_z(z, branch), n_s0, policy))


def logneg_signal_vs_idler(amps) -> float:
    """Zero: tracing the pump leaves rho_{s,ibar} diagonal."""
    _mags(amps)
    return 0.0


# ---------------------------------------------------------------------------
# Two pairs


def logneg_pair_vs_pair_from_amplitudes(c_s, c_sbar) -> float:
    """log2 sum_M (sum_{n+m=M} |c_n| |cbar_m|)^2 for factorized amplitudes."""
    lam = _convolve(_mags(c_s), _mags(c_sbar))
    return float(np.log2(np.sum(lam * lam)))


def logneg_pair_vs_pair(z: float, n_s0: int = 0, n_sbar0: int = 0, branch: str = "short",
                        policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """log2[sum_m lambda_m^2 (1 - z')^(n_s0+n_sbar0+2) z'^m] with
    lambda_m = sum_n sqrt(C(n_s0+n, n) C(n_sbar0+m-n, m-n))."""
    zp = _branch_z(z, branch)
    if zp == 0.0:
        return 0.0
    length = truncation_length(math.sqrt(zp), n_s0 + n_sbar0 + 1, policy)
    n = np.arange(length, dtype=float)
    # lambda_m sqrt(w_m) is the convolution of the two weighted amplitude
    # sequences, which stay bounded (unlike lambda_m itself)
    a = np.exp(0.5 * (log_binom(n_s0 + n, n) + (n_s0 + 1) * math.log1p(-zp) + n * math.log(zp)))
    b = np.exp(0.5 * (log_binom(n_sbar0 + n, n) + (n_sbar0 + 1) * math.log1p(-zp) + n * math.log(zp)))
    lam = _convolve(a, b)[:length]
    return float(np.log2(np.sum(lam * lam)))


# ---------------------------------------------------------------------------
# Entangled initial state with a spectator mode c


def logneg_entangled_ic_from_amplitudes(c0, c_ns0, n_s0: int) -> float:
    """log2[1 + (1 - delta_{n_s0,0}) sum_n |c0_n c^(n_s0)_n|]."""
    if n_s0 == 0:
        return 0.0
    a, b = _mags(c0), _mags(c_ns0)
    k = min(a.size, b.size)
    return float(np.log2(1.0 + np.sum(a[:k] * b[:k])))


def logneg_entangled_ic(z: float, n_s0: int, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Signal vs spectator mode c, short-time amplitudes for every z."""
    return logneg_entangled_ic_from_amplitudes(analytic_magnitudes(z, 0, policy),
                                               analytic_magnitudes(z, n_s0, policy), n_s0)


def logneg_pump_idler_vs_signal_entangled_ic_from_amplitudes(c0, c_ns0) -> float:
    """log2[(sum|c0|)^2 / 2 + (sum|c^(n_s0)|)^2 / 2]."""
    a, b = _mags(c0), _mags(c_ns0)
    return float(np.log2(0.5 * a.sum() ** 2 + 0.5 * b.sum() ** 2))


def logneg_pump_idler_vs_signal_entangled_ic(z: float, n_s0: int,
                                             policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    return logneg_pump_idler_vs_signal_entangled_ic_from_amplitudes(
        analytic_magnitudes(z, 0, policy), analytic_magnitudes(z, n_s0, policy))


def logneg_pump_idler_vs_signal_separable_ic(z: float, n_s0: int,
                                             policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Separable initial state: log2[(sum |c^(n_s0)|)^2]."""
    return logneg_pump_idler_vs_signal(analytic_magnitudes(z, n_s0, policy))


# ---------------------------------------------------------------------------
# Beam-splitter scattering of the signal against an infalling mode


def bs_send0_magnitudes(n: int, theta: float) -> np.ndarray:
    """|f^(0)_k(n)| for k = 0..n+1: one infalling particle meets n signal
    particles on a beam splitter of transmittance cos^2(theta)."""
    c, s = math.cos(theta), math.sin(theta)
    k = np.arange(n + 2, dtype=float)
    log_pref = 0.5 * log_binom(n + 1, k) - 0.5 * math.log(n + 1)
    with np.errstate(divide="ignore"):
        # |f| = pref c^(k-1) s^(n-k) |(n+1-k) c^2 - k s^2|, split so no
        # negative power of a vanishing cos or sin is ever formed
        mid = k[1:-1]
        log_mag = np.empty(n + 2)
        log_mag[1:-1] = (xlogy(mid - 1, c) + xlogy(n - mid, s)
                         + np.log(np.abs((n + 1 - mid) * c * c - mid * s * s)))
        log_mag[0] = math.log(n + 1) + np.log(c) + xlogy(n, s)
        log_mag[-1] = math.log(n + 1) + xlogy(n, c) + np.log(s)
    return np.exp(log_pref + log_mag)


def logneg_bs_scattering_from_amplitudes(c0, theta: float) -> float:
    """log2 sum_n |c_n|^2 (sum_k |f^(0)_k(n)|)^2."""
    a = _mags(c0)
    total = 0.0
    for n, an in enumerate(a):
        total += an * an * bs_send0_magnitudes(n, theta).sum() ** 2
    return float(np.log2(total))


def logneg_bs_scattering(z: float, theta: float, policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    if not (0.0 <= theta <= math.pi / 2 + 1e-15):
        raise ValueError("theta must lie in [0, pi/2]")
    if z == 0.0:
        return logneg_bs_scattering_from_amplitudes(np.array([1.0]), theta)
    length = truncation_length(z, 0, policy)
    n = np.arange(length, dtype=float)
    c0 = np.sqrt((1.0 - z) * np.exp(n * math.log(z)))
    c0 /= np.linalg.norm(c0)
    return logneg_bs_scattering_from_amplitudes(c0, theta)


# ---------------------------------------------------------------------------
# Mutual and tripartite information


def mutual_and_tripartite_info(amps) -> tuple[float, float]:
    """I(A:B) between any two of (pump, signal, idler) and I3 of all three.

    The state is pure and Schmidt-diagonal in the logical basis, so every
    one- and two-mode reduced state has spectrum |c_n|^2.
    """
    c = _mags(amps)
    p = c * c
    p = p / p.sum()
    s_single = shannon_entropy_bits(p)
    s_a = s_b = s_c = s_single
    # two-mode cuts are complements of one-mode cuts of a pure state
    s_ab = s_ac = s_bc = s_single
    s_abc = 0.0
    i_ab = s_a + s_b - s_ab
    i3 = s_a + s_b + s_c - s_ab - s_ac - s_bc + s_abc
    return float(i_ab), float(i3)
