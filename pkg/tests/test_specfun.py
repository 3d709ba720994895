import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import comb, ellipj, ellipk

from artifact.fock import ModeSetup
from artifact.specfun import (
    EllipticModulus,
    bhattacharyya_fidelity,
    elliptic_u_of_theta,
    ellipk_agm,
    gamma_ratio_g,
    geometric_series,
    jacobi_cn,
    jacobi_ellipj,
    jacobi_sd,
    log_binom,
    quarter_period,
    shannon_entropy_bits,
    sqrt_binom,
    theta_of_u,
)


@given(st.integers(0, 80), st.integers(0, 80))
def test_log_binom_matches_exact_comb(n, k):
    if k > n:
        k, n = n, k
    assert math.isclose(math.exp(log_binom(n, k)), comb(n, k, exact=True), rel_tol=1e-12)


def test_sqrt_binom_squares_to_binomial():
    assert sqrt_binom(20, 10) ** 2 == pytest.approx(comb(20, 10, exact=True), rel=1e-13)


def test_log_binom_large_arguments_finite():
    # ln C(2n, n) ~ 2n ln 2 - ln(pi n)/2
    n = 5e5
    assert log_binom(2 * n, n) == pytest.approx(2 * n * math.log(2) - 0.5 * math.log(math.pi * n), rel=1e-12)


def test_gamma_ratio_identity_up_to_ten_thousand():
    n = np.arange(1, 10_001, dtype=float)
    rel = np.abs(gamma_ratio_g(n - 1) * gamma_ratio_g(n) / n - 1.0)
    assert rel.max() < 1e-12


def test_gamma_ratio_small_values():
    assert math.isclose(gamma_ratio_g(0.0), math.sqrt(2 / math.pi), rel_tol=1e-15)
    assert math.isclose(gamma_ratio_g(1.0), math.sqrt(math.pi / 2), rel_tol=1e-15)


def test_gamma_ratio_rejects_negative():
    with pytest.raises(ValueError):
        gamma_ratio_g(-1.0)


@settings(max_examples=60)
@given(st.floats(-8.0, 8.0), st.floats(0.0, 0.999))
def test_jacobi_against_scipy(u, m):
    sn, cn, dn = jacobi_ellipj(u, m)
    ref = ellipj(u, m)
    assert abs(sn - ref[0]) < 1e-12
    assert abs(cn - ref[1]) < 1e-12
    assert abs(dn - ref[2]) < 1e-12


def test_jacobi_near_one_uses_complement():
    u = np.linspace(-5, 5, 41)
    k = EllipticModulus(1.0 - 1e-14, 1e-14)
    assert np.max(np.abs(jacobi_cn(u, k) - 1.0 / np.cosh(u))) < 1e-12


def test_jacobi_identities():
    u = np.linspace(-4, 4, 81)
    sn, cn, dn = jacobi_ellipj(u, 0.7)
    assert np.max(np.abs(sn ** 2 + cn ** 2 - 1)) < 1e-14
    assert np.max(np.abs(dn ** 2 + 0.7 * sn ** 2 - 1)) < 1e-14


def test_modulus_from_counts():
    k = EllipticModulus.from_counts(255, 0)
    assert k.k_e == 255 / 256
    assert k.k_e_complement == 1 / 256
    two = EllipticModulus.from_counts(100, 1, 2)
    assert two.k_e == 100 / 105


def test_modulus_validation():
    with pytest.raises(ValueError):
        EllipticModulus(1.2, -0.2)
    with pytest.raises(ValueError):
        EllipticModulus(0.5, 0.6)


@pytest.mark.parametrize("m", [0.0, 0.1, 0.5, 0.9, 0.99, 0.999999])
def test_ellipk_agm_against_scipy(m):
    assert math.isclose(ellipk_agm(m), ellipk(m), rel_tol=1e-14)


def test_quarter_period_regression():
    # mpmath ellipk(255/256)
    k = EllipticModulus.from_counts(255, 0)
    assert abs(quarter_period(k) - 4.16197436780004954) < 1e-13


@pytest.mark.parametrize("n_p0,n_s0", [(10, 0), (255, 0), (50, 3)])
def test_u_of_theta_against_quadrature(n_p0, n_s0):
    setup = ModeSetup(n_p0, n_s0)
    for theta in (0.1, 0.7, 1.3, math.pi / 2):
        ref, _ = integrate.quad(lambda t: 1.0 / math.sqrt(n_p0 * math.sin(t) ** 2 + n_s0 + 1), 0, theta,
                                epsabs=1e-14, epsrel=1e-13)
        assert abs(elliptic_u_of_theta(theta, setup) - ref) < 1e-12


def test_u_at_half_pi_is_complete_integral():
    setup = ModeSetup(255, 0)
    total = 256
    k = EllipticModulus.from_counts(255, 0)
    assert abs(elliptic_u_of_theta(math.pi / 2, setup) - quarter_period(k) / math.sqrt(total)) < 1e-13


def test_theta_of_u_round_trip():
    setup = ModeSetup(40, 2)
    theta = np.linspace(0.0, 1.5, 31)
    back = theta_of_u(elliptic_u_of_theta(theta, setup), setup)
    assert np.max(np.abs(back - theta)) < 1e-10


def test_sd_definition():
    k = EllipticModulus.from_parameter(0.6)
    u = np.linspace(0, 3, 13)
    sn, _, dn = jacobi_ellipj(u, 0.6)
    assert np.allclose(jacobi_sd(u, k), sn / dn, atol=1e-15)


def test_entropy_uniform_and_delta():
    assert shannon_entropy_bits(np.full(8, 1 / 8)) == pytest.approx(3.0, abs=1e-14)
    assert shannon_entropy_bits([1.0, 0.0]) == 0.0
    assert math.copysign(1.0, shannon_entropy_bits([1.0])) == 1.0


def test_entropy_validation():
    with pytest.raises(ValueError):
        shannon_entropy_bits([0.5, 0.4])
    with pytest.raises(ValueError):
        shannon_entropy_bits([1.2, -0.2])


def test_bhattacharyya():
    p = np.array([0.2, 0.3, 0.5])
    assert bhattacharyya_fidelity(p, p) == pytest.approx(1.0, abs=1e-15)
    assert bhattacharyya_fidelity([1.0, 0.0], [0.0, 1.0]) == 0.0
    with pytest.raises(ValueError):
        bhattacharyya_fidelity([1.0], [0.5, 0.5])


def test_geometric_series_direct_regime():
    z = 0.9
    n = np.arange(2000, dtype=float)
    ref = math.fsum(z ** n * (n + 1) * np.log2(n + 1))
    assert geometric_series(z, lambda k: (k + 1) * np.log2(k + 1)) == pytest.approx(ref, rel=1e-13)


def test_geometric_series_tail_regime():
    # closed form sum z^n (n+1) = 1/(1-z)^2, deep in the Euler-Maclaurin regime
    z = 1 - 1e-6
    got = geometric_series(z, lambda k: k + 1.0, direct_terms=1000)
    assert got == pytest.approx(1 / (1 - z) ** 2, rel=1e-10)


def test_geometric_series_rejects_one():
    with pytest.raises(ValueError):
        geometric_series(1.0, lambda k: k)


def test_gamma_ratio_large_argument():
    assert gamma_ratio_g(1e6) / math.sqrt(1e6 + 1) == pytest.approx(1.0, abs=1e-6)


def test_cn_special_values():
    k = EllipticModulus.from_parameter(0.4)
    assert jacobi_cn(0.0, k) == 1.0
    one = EllipticModulus(1.0, 0.0)
    u = np.array([0.5, 1.0, 2.0])
    assert np.allclose(jacobi_cn(u, one), 1 / np.cosh(u), atol=1e-10)


def test_geometric_entropy_two_bits():
    z = 0.5
    p = (1 - z) * z ** np.arange(200)
    assert shannon_entropy_bits(p / p.sum()) == pytest.approx(2.0, abs=1e-12)
