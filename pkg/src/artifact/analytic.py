"""Closed-form short- and long-time solutions.

Short times (undepleted pump) give a negative-binomial signal distribution
with squeezing parameter z = tanh^2(tau).  Long times follow the Jacobi
elliptic envelope n_p0 cn^2(tau - T_q | k_e); the long-time distribution is
the short-time one evaluated at z' = f(z) / (1 + f(z)).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .fock import DEFAULT_POLICY, AmplitudeState, ModeSetup, ProbDist, TruncationPolicy, truncation_length
from .specfun import EllipticModulus, jacobi_cn, log_binom, quarter_period

Z_STAR_LIMIT = 1.0 / (math.exp(math.pi / 2) / 2 - 1) ** 2
F_PREFACTOR = 4.0 * math.exp(-math.pi)
# Above this k_e the quarter period uses the k_e -> 1 constant pi/2.
KE_NEAR_ONE = 0.99


class ModelValidityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SqueezeTime:
    z: float
    tau: float

    def __post_init__(self):
        if not (0.0 <= self.z < 1.0):
            raise ValueError("z must lie in [0, 1)")
        if abs(math.tanh(self.tau) ** 2 - self.z) > 1e-12:
            raise ValueError("z and tau are inconsistent (z = tanh^2 tau)")

    @classmethod
    def from_z(cls, z: float) -> "SqueezeTime":
        return cls(float(z), math.atanh(math.sqrt(z)))

    @classmethod
    def from_tau(cls, tau: float) -> "SqueezeTime":
        return cls(math.tanh(tau) ** 2, float(tau))


def _as_z(z) -> float:
    return z.z if isinstance(z, SqueezeTime) else float(z)


# ---------------------------------------------------------------------------
# Short time


def short_time_amplitudes(z, n_s0: int = 0, policy: TruncationPolicy = DEFAULT_POLICY) -> AmplitudeState:
    """c_n = (-i tanh tau)^n / cosh(tau)^(n_s0+1) sqrt(C(n_s0+n, n))."""
    zv = _as_z(z)
    length = truncation_length(zv, n_s0, policy)
    n = np.arange(length, dtype=float)
    mag = np.exp(0.5 * (log_binom(n_s0 + n, n) + (n_s0 + 1) * math.log1p(-zv)
                        + (n * math.log(zv) if zv > 0 else np.where(n == 0, 0.0, -np.inf))))
    tau = math.atanh(math.sqrt(zv))
    return AmplitudeState(mag * (-1j) ** np.arange(length), tau=tau, n_s0=n_s0)


def negative_binomial(z: float, n_s0: int, length: int) -> np.ndarray:
    """(1 - z)^(n_s0+1) z^n C(n_s0+n, n) for n < length."""
    n = np.arange(length, dtype=float)
    if z == 0.0:
        out = np.zeros(length)
        out[0] = 1.0
        return out
    return np.exp(log_binom(n_s0 + n, n) + (n_s0 + 1) * math.log1p(-z) + n * math.log(z))


def short_time_probabilities(z, n_s0: int = 0, policy: TruncationPolicy = DEFAULT_POLICY) -> ProbDist:
    zv = _as_z(z)
    w = negative_binomial(zv, n_s0, truncation_length(zv, n_s0, policy))
    return ProbDist(w, origin="short-time analytic", discarded_mass=max(0.0, 1.0 - w.sum()))


def short_time_mean(z, n_s0: int = 0) -> float:
    zv = _as_z(z)
    return (n_s0 + 1) * zv / (1.0 - zv)


# ---------------------------------------------------------------------------
# Long time


@dataclass(frozen=True)
class EllipticSchedule:
    k_e: EllipticModulus
    T_q: float
    tau_scale: float
    quarter_period_exact: float

    @property
    def a(self) -> float:
        """a(k_e) in T_q = a(k_e) - ln(1 - k_e) / 2."""
        return self.T_q + 0.5 * math.log(self.k_e.k_e_complement)

    @classmethod
    def from_setup(cls, setup: ModeSetup) -> "EllipticSchedule":
        k = EllipticModulus.from_counts(setup.n_p0, setup.n_s0, setup.n_sbar0)
        exact = quarter_period(k)
        if k.k_e > KE_NEAR_ONE:
            t_q = math.pi / 2 - 0.5 * math.log(k.k_e_complement)
        else:
            t_q = exact
        return cls(k, t_q, setup.tau_scale(), exact)


def longtime_mean(tau, setup: ModeSetup, schedule: EllipticSchedule | None = None,
                  mode: str = "s"):
    """n_>(tau) = n_p0 cn^2(tau - T_q | k_e) for the first pulse.

    Two-pair setups return the ``mode`` share ((n_s0+1) or (n_sbar0+1) over
    n_s0 + n_sbar0 + 2) of the same envelope.
    """
    sched = schedule or EllipticSchedule.from_setup(setup)
    tau = np.asarray(tau, dtype=float)
    if np.any(tau > 2 * sched.T_q):
        warnings.warn("tau beyond the first pump minimum; model not valid there",
                      ModelValidityWarning, stacklevel=2)
    out = setup.n_p0 * jacobi_cn(tau - sched.T_q, sched.k_e) ** 2
    out = out * _mode_fraction(setup, mode)
    return out[()] if out.ndim == 0 else out


def longtime_mean_sech(tau, setup: ModeSetup, schedule: EllipticSchedule | None = None,
                       mode: str = "s"):
    """k_e -> 1 form n_p0 sech^2(tau - T_q)."""
    sched = schedule or EllipticSchedule.from_setup(setup)
    tau = np.asarray(tau, dtype=float)
    out = setup.n_p0 / np.cosh(tau - sched.T_q) ** 2 * _mode_fraction(setup, mode)
    return out[()] if out.ndim == 0 else out


def _mode_fraction(setup: ModeSetup, mode: str) -> float:
    if not setup.two_pair:
        if mode != "s":
            raise ValueError("single-pair setups only have mode 's'")
        return 1.0
    total = setup.n_s0 + setup.n_sbar0 + 2
    if mode == "s":
        return (setup.n_s0 + 1) / total
    if mode == "sbar":
        return (setup.n_sbar0 + 1) / total
    raise ValueError(f"unknown mode {mode!r}")


def f_of_z(z):
    """f(z) = 4 e^-pi (1 + sqrt z) / (1 - sqrt z)."""
    z = np.asarray(z, dtype=float)
    if np.any(z >= 1.0) or np.any(z < 0.0):
        raise ValueError("f_of_z needs 0 <= z < 1")
    root = np.sqrt(z)
    out = F_PREFACTOR * (1.0 + root) ** 2 / (1.0 - z)
    return out[()] if out.ndim == 0 else out


def long_time_z(z):
    """z' = f / (1 + f), the squeezing value that reproduces the long-time mean."""
    f = f_of_z(z)
    return f / (1.0 + f)


def longtime_probabilities(z: float, n_s0: int = 0, policy: TruncationPolicy = DEFAULT_POLICY) -> ProbDist:
    if z < Z_STAR_LIMIT:
        warnings.warn("long-time distribution requested below the crossover z*",
                      ModelValidityWarning, stacklevel=2)
    zl = float(long_time_z(z))
    w = negative_binomial(zl, n_s0, truncation_length(zl, n_s0, policy))
    return ProbDist(w, origin="long-time analytic", discarded_mass=max(0.0, 1.0 - w.sum()))


def longtime_mean_from_z(z, n_s0: int = 0) -> float:
    return (n_s0 + 1) * float(f_of_z(z))


# ---------------------------------------------------------------------------
# Crossover


@dataclass(frozen=True)
class Crossover:
    z_first_order: float
    z_root: float | None


def _crossover_terms(setup: ModeSetup):
    if setup.two_pair:
        base = setup.n_s0 + setup.n_sbar0 + 2
    else:
        base = setup.n_s0 + 1
    return base


def crossover_z_star(setup: ModeSetup | None = None) -> Crossover:
    """Squeezing value where the short- and long-time mean occupations match.

    With no setup the n_p0 -> infinity limit is returned in both fields.
    Otherwise ``z_first_order`` is the closed first-order formula and
    ``z_root`` solves the matching equation
    base zeta^2 / (1 - zeta^2) = n_p0 [1 - ((zeta - zeta_T) / (1 - zeta zeta_T))^2]
    for zeta = sqrt(z), zeta_T = tanh(T_q).
    """
    if setup is None:
        return Crossover(Z_STAR_LIMIT, Z_STAR_LIMIT)
    base = _crossover_terms(setup)
    if setup.n_p0 < 10 * base:
        warnings.warn("crossover formula assumes n_p0 >> n_s0", ModelValidityWarning, stacklevel=2)
    sched = EllipticSchedule.from_setup(setup)
    t_q = sched.T_q
    eps_t = 2.0 * math.exp(-2.0 * t_q)
    eps = base / setup.n_p0
    denom = eps - 2.0 * eps_t
    z_first = ((2 * eps_t + math.sqrt(2 * eps_t * eps)) / denom) ** 2 if denom > 0 else math.nan

    zeta_t = math.tanh(t_q)
    sech2_t = 1.0 / math.cosh(t_q) ** 2

    def gap(zeta):
        # 1 - ((zeta - zeta_T)/(1 - zeta zeta_T))^2 = (1 - zeta^2) sech^2 T / (1 - zeta zeta_T)^2
        lhs = base * zeta * zeta / (1.0 - zeta * zeta)
        rhs = setup.n_p0 * (1.0 - zeta * zeta) * sech2_t / (1.0 - zeta * zeta_t) ** 2
        return lhs - rhs

    if gap(zeta_t) <= 0:
        raise ValueError("degenerate setup: no crossover root in (0, 1)")
    zeta = brentq(gap, 0.0, zeta_t, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return Crossover(z_first, zeta * zeta)


# ---------------------------------------------------------------------------
# Combined solution and fidelity


def combined_solution(z: float, n_s0: int = 0, z_star: float = Z_STAR_LIMIT,
                      policy: TruncationPolicy = DEFAULT_POLICY) -> ProbDist:
    if z <= z_star:
        return short_time_probabilities(z, n_s0, policy)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ModelValidityWarning)
        return longtime_probabilities(z, n_s0, policy)


def combined_mean(z: float, n_s0: int = 0, z_star: float = Z_STAR_LIMIT) -> float:
    if z <= z_star:
        return short_time_mean(z, n_s0)
    return longtime_mean_from_z(z, n_s0)


def fidelity_curve(z, n_s0: int = 0, z_star: float = Z_STAR_LIMIT):
    """Fidelity of the combined solution with the undepleted thermal state.

    Both states are negative binomials, so sum_n sqrt(p_<(n) p_>(n)) resums to
    [sqrt((1 - z)(1 - z')) / (1 - sqrt(z z'))]^(n_s0 + 1).
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    out = np.ones_like(z)
    late = z > z_star
    if np.any(late):
        zl = long_time_z(z[late])
        log_f = (n_s0 + 1) * (0.5 * np.log1p(-z[late]) + 0.5 * np.log1p(-zl)
                              - np.log1p(-np.sqrt(z[late] * zl)))
        out[late] = np.exp(log_f)
    return out
