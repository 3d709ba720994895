"""Special functions and numeric primitives.

Elliptic convention: every Jacobi function and elliptic integral here takes
the *parameter* ``m`` (``m = k**2`` in modulus language), the same convention
as ``scipy.special.ellipj``.  The physical parameter ``k_e`` is built only in
:meth:`EllipticModulus.from_counts` and is already a parameter, so it is passed
straight through.  Because ``k_e`` sits extremely close to 1 for large pumps,
the complement ``1 - k_e`` is carried separately from integer counts so it
never suffers cancellation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import ellipkinc, gamma, gammaln

LN2 = np.log(2.0)


def gamma_ratio_g(n):
    """g(n) = sqrt(2) * Gamma(1 + n/2) / Gamma(1/2 + n/2).

    Evaluated through log-gamma so that n up to 1e6 and beyond is safe.
    Satisfies g(n - 1) g(n) = n.
    """
    n = np.asarray(n, dtype=float)
    if np.any(n < 0):
        raise ValueError("gamma_ratio_g requires n >= 0")
    x = n / 2.0
    out = np.empty_like(x)
    small = x <= _G_SWITCH
    out[small] = gamma(1.0 + x[small]) / gamma(0.5 + x[small])
    xl = x[~small]
    # Gamma(x+1)/Gamma(x+1/2) = sqrt(x) sum_k c_k x^-k; a log-gamma
    # difference would lose ~1e-11 relative here
    series = np.zeros_like(xl)
    for ck in _G_SERIES[::-1]:
        series = series / xl + ck
    out[~small] = np.sqrt(xl) * series
    out = np.sqrt(2.0) * out
    return out[()] if out.ndim == 0 else out


_G_SWITCH = 100.0
_G_SERIES = (1.0, 1 / 8, 1 / 128, -5 / 1024, -21 / 32768, 399 / 262144, 869 / 4194304)


def log_binom(n, k):
    """Natural log of the binomial coefficient C(n, k) for real n >= k >= 0."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def sqrt_binom(n, k):
    """sqrt(C(n, k)) through log space."""
    return np.exp(0.5 * log_binom(n, k))


# ---------------------------------------------------------------------------
# Jacobi elliptic functions


@dataclass(frozen=True)
class EllipticModulus:
    """Elliptic parameter ``k_e`` together with its exact complement."""

    k_e: float
    k_e_complement: float

    def __post_init__(self):
        if not (0.0 <= self.k_e <= 1.0):
            raise ValueError(f"k_e must lie in [0, 1], got {self.k_e}")
        if abs(self.k_e + self.k_e_complement - 1.0) > 1e-12:
            raise ValueError("k_e and its complement must sum to 1")

    @classmethod
    def from_parameter(cls, m: float) -> "EllipticModulus":
        return cls(float(m), 1.0 - float(m))

    @classmethod
    def from_counts(cls, n_p0: int, n_s0: int, n_sbar0: int | None = None) -> "EllipticModulus":
        """k_e = n_p0 / (n_p0 + n_s0 + 1), or the two-pair form
        n_p0 / (n_p0 + n_s0 + n_sbar0 + 2) when ``n_sbar0`` is given."""
        if n_sbar0 is None:
            rest = n_s0 + 1
        else:
            rest = n_s0 + n_sbar0 + 2
        total = n_p0 + rest
        return cls(n_p0 / total, rest / total)


def _agm_ladder(m: float, m1: float):
    a = [1.0]
    b = np.sqrt(m1)
    c = [np.sqrt(m)]
    while abs(c[-1]) > 4.0 * np.finfo(float).eps * a[-1]:
        a_next = 0.5 * (a[-1] + b)
        c.append(0.5 * (a[-1] - b))
        b = np.sqrt(a[-1] * b)
        a.append(a_next)
        if len(a) > 64:
            break
    return a, c


def jacobi_ellipj(u, m: float, m1: float | None = None):
    """Return (sn, cn, dn) of argument ``u`` and parameter ``m``.

    Descending Landen / arithmetic-geometric mean scheme.  ``m1`` is the
    complementary parameter; pass it when ``m`` is close to 1.
    """
    u = np.asarray(u, dtype=float)
    if m1 is None:
        m1 = 1.0 - m
    if not (0.0 <= m <= 1.0):
        raise ValueError(f"parameter must lie in [0, 1], got {m}")
    if m1 <= 0.0:
        sech = 1.0 / np.cosh(u)
        return np.tanh(u), sech, sech.copy()
    if m == 0.0:
        return np.sin(u), np.cos(u), np.ones_like(u)

    a, c = _agm_ladder(m, m1)
    n_steps = len(a) - 1
    phi = (2.0 ** n_steps) * a[-1] * u
    phi_prev = phi
    for j in range(n_steps, 0, -1):
        phi_prev = phi
        phi = 0.5 * (phi + np.arcsin(c[j] / a[j] * np.sin(phi)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    if n_steps >= 1:
        dn = cn / np.cos(phi_prev - phi)
    else:
        dn = np.sqrt(1.0 - m * sn * sn)
    return sn, cn, dn


def jacobi_cn(u, k: EllipticModulus):
    return jacobi_ellipj(u, k.k_e, k.k_e_complement)[1]


def jacobi_sn(u, k: EllipticModulus):
    return jacobi_ellipj(u, k.k_e, k.k_e_complement)[0]


def jacobi_dn(u, k: EllipticModulus):
    return jacobi_ellipj(u, k.k_e, k.k_e_complement)[2]


def jacobi_sd(u, k: EllipticModulus):
    sn, _, dn = jacobi_ellipj(u, k.k_e, k.k_e_complement)
    return sn / dn


def ellipk_agm(m: float, m1: float | None = None) -> float:
    """Complete elliptic integral K(m) = pi / (2 AGM(1, sqrt(1 - m)))."""
    if m1 is None:
        m1 = 1.0 - m
    if m1 <= 0.0:
        return np.inf
    a, b = 1.0, np.sqrt(m1)
    while abs(a - b) > 4.0 * np.finfo(float).eps * a:
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    return np.pi / (a + b)


def quarter_period(k: EllipticModulus) -> float:
    return ellipk_agm(k.k_e, k.k_e_complement)


# ---------------------------------------------------------------------------
# Elliptic flow u(theta)


def _flow_constants(setup):
    # Single-pair flow: v(theta)^2 = n_p0 sin^2(theta) + n_s0 + 1.
    n_p0 = setup.n_p0
    base = setup.n_s0 + 1
    return n_p0, base, n_p0 + base


def elliptic_u_of_theta(theta, setup):
    """u(theta) = int_0^theta dtheta' / sqrt(n_p0 sin^2 theta' + n_s0 + 1).

    Mapped onto a real parameter via the imaginary-parameter transformation:
    u = F(psi | k_e) / sqrt(N) with N = n_p0 + n_s0 + 1 and
    tan(psi) = sqrt(N / (n_s0 + 1)) tan(theta).
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0.0) or np.any(theta > np.pi / 2 + 1e-15):
        raise ValueError("theta must lie in [0, pi/2]")
    theta = np.minimum(theta, np.pi / 2)
    n_p0, base, total = _flow_constants(setup)
    psi = np.arctan2(np.sqrt(total) * np.sin(theta), np.sqrt(base) * np.cos(theta))
    out = ellipkinc(psi, n_p0 / total) / np.sqrt(total)
    return out[()] if out.ndim == 0 else out


def theta_of_u(u, setup):
    """Inverse of :func:`elliptic_u_of_theta`:
    sin(theta) = sqrt((n_s0 + 1) / N) sd(sqrt(N) u | k_e)."""
    n_p0, base, total = _flow_constants(setup)
    k = EllipticModulus(n_p0 / total, base / total)
    s = np.sqrt(base / total) * jacobi_sd(np.sqrt(total) * np.asarray(u, dtype=float), k)
    return np.arcsin(np.clip(s, -1.0, 1.0))


# ---------------------------------------------------------------------------
# Distributions


def _weights(p) -> np.ndarray:
    w = getattr(p, "weights", p)
    return np.asarray(w, dtype=float)


def _check_normalized(w: np.ndarray, tol: float = 1e-9) -> None:
    if np.any(w < 0.0):
        raise ValueError("distribution has negative weights")
    total = w.sum()
    if abs(total - 1.0) > tol:
        raise ValueError(f"distribution not normalized (sum = {total!r})")


def shannon_entropy_bits(p) -> float:
    """-sum p log2 p with 0 log 0 = 0."""
    w = _weights(p)
    _check_normalized(w)
    nz = w[w > 0.0]
    return float(-np.sum(nz * np.log2(nz))) + 0.0  # no negative zero


def bhattacharyya_fidelity(p, q) -> float:
    """sum sqrt(p_n q_n) for distributions on the same index set."""
    a = _weights(p)
    b = _weights(q)
    if a.shape != b.shape:
        raise ValueError(f"support lengths differ: {a.shape} vs {b.shape}")
    _check_normalized(a)
    _check_normalized(b)
    return float(min(1.0, np.sum(np.sqrt(a * b))))


# ---------------------------------------------------------------------------
# Series


def geometric_series(z: float, h: Callable, *, direct_terms: int = 200_000,
                     tail_tol: float = 1e-17) -> float:
    """sum_{n>=0} z**n h(n) for smooth, slowly varying ``h``.

    Terms are summed directly until z**n drops below ``tail_tol`` or
    ``direct_terms`` is reached.  Any remaining tail is replaced by its
    Euler-Maclaurin estimate (integral plus endpoint corrections), which is
    how z extremely close to 1 stays tractable.
    """
    if not (0.0 <= z < 1.0):
        raise ValueError("geometric_series needs 0 <= z < 1")
    if z == 0.0:
        return float(h(np.array([0.0]))[0])
    log_z = np.log(z)
    needed = int(np.ceil(np.log(tail_tol) / log_z)) + 1
    n_direct = min(needed, direct_terms)
    n = np.arange(n_direct, dtype=float)
    head = float(np.sum(np.exp(n * log_z) * h(n)))
    if needed <= direct_terms:
        return head

    start = float(n_direct)
    decay = -log_z

    def term(t):
        return np.exp(t * log_z) * h(np.asarray(t, dtype=float))

    # integral over [start, inf) in the natural decay variable s = decay * (t - start)
    def integrand(s):
        return term(start + s / decay) / decay

    integral = 0.0
    for lo, hi in ((0.0, 1.0), (1.0, 10.0), (10.0, 60.0)):
        val, _ = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)
        integral += val
    eps = 1e-3 * max(start, 1.0)
    deriv = (term(start + eps) - term(start - eps)) / (2.0 * eps)
    tail = integral + 0.5 * float(term(start)) - float(deriv) / 12.0
    return head + tail
