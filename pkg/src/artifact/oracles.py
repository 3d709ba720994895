"""Brute-force reference evaluators for small states.

States are given as sparse lists of (occupation tuple, amplitude) over named
modes.  Reduced density matrices are formed densely on the locally occurring
configurations, so these routines are only meant for occupations of order
ten.  They share no algebra with the closed forms they are used to check.
"""
from __future__ import annotations

import numpy as np

from .channel import bs_coefficients

ORACLE_MAX_DIM = 4000


def _split(terms, modes, part_a, part_b):
    pos = {m: i for i, m in enumerate(modes)}
    for m in (*part_a, *part_b):
        if m not in pos:
            raise ValueError(f"unknown mode {m!r}")
    if set(part_a) & set(part_b):
        raise ValueError("subsystems overlap")
    env = [m for m in modes if m not in part_a and m not in part_b]
    keys = {"a": {}, "b": {}, "e": {}}
    rows = []
    for occ, amp in terms:
        if amp == 0:
            continue
        ka = tuple(occ[pos[m]] for m in part_a)
        kb = tuple(occ[pos[m]] for m in part_b)
        ke = tuple(occ[pos[m]] for m in env)
        ia = keys["a"].setdefault(ka, len(keys["a"]))
        ib = keys["b"].setdefault(kb, len(keys["b"]))
        ie = keys["e"].setdefault(ke, len(keys["e"]))
        rows.append((ia, ib, ie, complex(amp)))
    da, db, de = len(keys["a"]), len(keys["b"]), len(keys["e"])
    if da * db > ORACLE_MAX_DIM:
        raise ValueError(f"reduced dimension {da * db} too large for the dense oracle")
    tensor = np.zeros((da, db, de), dtype=complex)
    for ia, ib, ie, amp in rows:
        tensor[ia, ib, ie] += amp
    return tensor


def reduced_density(terms, modes, part_a, part_b=()) -> np.ndarray:
    """rho on A x B as a (da, db, da, db) array, environment traced out."""
    t = _split(terms, modes, part_a, part_b)
    rho = np.einsum("abe,cde->abcd", t, t.conj())
    return rho / np.einsum("abab->", rho).real


def logneg_dense(terms, modes, part_a, part_b) -> float:
    """log2 of the trace norm of rho^{T_B}."""
    rho = reduced_density(terms, modes, part_a, part_b)
    da, db = rho.shape[0], rho.shape[1]
    pt = rho.transpose(0, 3, 2, 1).reshape(da * db, da * db)
    ev = np.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    return float(np.log2(np.sum(np.abs(ev))))


def entropy_dense_bits(terms, modes, part) -> float:
    rho = reduced_density(terms, modes, part)
    d = rho.shape[0]
    ev = np.linalg.eigvalsh(rho.reshape(d, d))
    ev = ev[ev > 1e-15]
    return float(-np.sum(ev * np.log2(ev)))


# ---------------------------------------------------------------------------
# State builders

SINGLE_MODES = ("p", "s", "ibar")
TWO_PAIR_MODES = ("p", "s", "ibar", "sbar", "i")


def single_pair_terms(c, n_p0: int | None = None, n_s0: int = 0):
    c = np.asarray(c, dtype=complex)
    top = c.size - 1 if n_p0 is None else n_p0
    return [((top - n, n_s0 + n, n), c[n]) for n in range(c.size)]


def two_pair_terms(c_grid, n_p0: int | None = None, n_s0: int = 0, n_sbar0: int = 0):
    """c_grid[n, m] over pairs (s, ibar) = n and (sbar, i) = m."""
    g = np.asarray(c_grid, dtype=complex)
    top = g.shape[0] + g.shape[1] - 2 if n_p0 is None else n_p0
    return [((top - n - m, n_s0 + n, n, n_sbar0 + m, m), g[n, m])
            for n in range(g.shape[0]) for m in range(g.shape[1])
            if n + m <= top]


ENT_IC_MODES = ("p", "ibar", "s", "c")


def entangled_ic_terms(c0, c_ns0, n_s0: int, n_c0: int | None = None, n_p0: int | None = None):
    """sum_n |n_p0-n>|n> (c^(n_s0)_n |n_s0+n>|0> + c^(0)_n |n>|n_c0>) / sqrt 2."""
    n_c0 = n_s0 if n_c0 is None else n_c0
    a, b = np.asarray(c0, dtype=complex), np.asarray(c_ns0, dtype=complex)
    size = max(a.size, b.size)
    top = size - 1 if n_p0 is None else n_p0
    out = []
    for n in range(size):
        if n < b.size:
            out.append(((top - n, n, n_s0 + n, 0), b[n] / np.sqrt(2.0)))
        if n < a.size:
            out.append(((top - n, n, n, n_c0), a[n] / np.sqrt(2.0)))
    # with n_s0 = n_c0 = 0 the two branches coincide and must add
    merged = {}
    for occ, amp in out:
        merged[occ] = merged.get(occ, 0.0) + amp
    return list(merged.items())


BS_MODES = ("p", "s", "ibar", "c")


def bs_scattering_terms(c0, theta: float, n_p0: int | None = None):
    """sum_n c_n |n_p0-n>_p |n>_ibar U_bs(|n>_s |1>_c)."""
    c0 = np.asarray(c0, dtype=complex)
    top = c0.size - 1 if n_p0 is None else n_p0
    out = []
    for n in range(c0.size):
        f = bs_coefficients(n, 1, theta)
        for k, fk in enumerate(f):
            out.append(((top - n, k, n, n + 1 - k), c0[n] * fk))
    return out
