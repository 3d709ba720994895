import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.channel import (
    CHI_TERMINAL,
    ChannelEnsemble,
    GrayBodyParams,
    bs_coefficients,
    component_entropies,
    graybody_ensemble,
    holevo_chi,
    holevo_chi_closed,
    holevo_chi_first_principles,
    holevo_chi_graybody,
    holevo_from_ensemble,
    stimulated_dist,
    stimulated_ensemble,
)
from artifact.entanglement import bs_send0_magnitudes
from artifact.selftest import graybody_bs_sum


def test_chi_vacuum():
    assert holevo_chi_closed(0.0) == 1.0
    assert holevo_chi(0.0) == 1.0


@pytest.mark.parametrize("z,ref", [
    (0.2, 0.80997196306793125),
    (0.5, 0.56423678262327594),
    (0.9, 0.3205530711827097),
    (0.99, 0.2823438286371295),
])
def test_chi_against_mpmath_values(z, ref):
    assert holevo_chi_closed(z) == pytest.approx(ref, abs=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.01, 0.95))
def test_chi_closed_vs_product_grid(z):
    assert holevo_chi_closed(z) == pytest.approx(holevo_chi_first_principles(z), abs=1e-9)


def test_chi_terminal_value():
    assert CHI_TERMINAL == pytest.approx(0.278652479555518296, abs=1e-15)
    assert holevo_chi(1 - 1e-6) == pytest.approx(CHI_TERMINAL, abs=1e-5)
    assert holevo_chi(1 - 1e-6, branch="long") == pytest.approx(CHI_TERMINAL, abs=1e-5)


def test_chi_decreasing():
    z = np.linspace(0, 0.99, 34)
    chi = np.array([holevo_chi(x) for x in z])
    assert np.all(np.diff(chi) < 0)


def test_chi_validation():
    with pytest.raises(ValueError):
        holevo_chi(-0.1)
    with pytest.raises(ValueError):
        holevo_chi_closed(1.0)
    with pytest.raises(ValueError):
        component_entropies(1.0)


def test_component_entropies_against_distributions():
    from artifact.specfun import shannon_entropy_bits
    for z in (0.3, 0.8):
        s0, s1 = component_entropies(z)
        assert s0 == pytest.approx(shannon_entropy_bits(stimulated_dist(z, 0).weights), abs=1e-9)
        assert s1 == pytest.approx(shannon_entropy_bits(stimulated_dist(z, 1).weights), abs=1e-9)


def test_stimulated_dist_offset():
    d = stimulated_dist(0.0, 3)
    assert d.weights.tolist() == [0, 0, 0, 1.0]
    d = stimulated_dist(0.5, 1)
    assert d.weights[0] == 0.0
    assert d.weights[1] == pytest.approx(0.25)


@pytest.mark.parametrize("theta", [0.0, 0.4, math.pi / 4, 1.3, math.pi / 2])
def test_bs_unitary(theta):
    for total in range(9):
        u = np.array([bs_coefficients(n, total - n, theta) for n in range(total + 1)]).T
        assert np.max(np.abs(u.conj().T @ u - np.eye(total + 1))) < 1e-13


def test_bs_single_photon_values():
    f = bs_coefficients(1, 0, math.pi / 4)
    assert f == pytest.approx(np.array([-1j, 1]) / math.sqrt(2), abs=1e-15)
    assert bs_coefficients(3, 0, 0.0) == pytest.approx(np.array([0, 0, 0, 1]), abs=1e-15)


def test_bs_cap_and_validation():
    with pytest.raises(ValueError):
        bs_coefficients(300, 200, 0.3)
    with pytest.raises(ValueError):
        bs_coefficients(-1, 0, 0.3)


def test_send0_magnitudes_match_coefficients():
    for n in (0, 2, 7):
        for theta in (0.2, 1.0):
            assert np.abs(bs_coefficients(n, 1, theta)) == pytest.approx(bs_send0_magnitudes(n, theta), abs=1e-13)


def test_bogoliubov_identity():
    for theta, r in ((0.3, 0.0), (1.1, 0.7), (math.pi / 2, 2.0)):
        a, b, g = GrayBodyParams(theta, r).bogoliubov()
        assert a * a - b * b + g * g == pytest.approx(1.0, abs=1e-12)
    assert GrayBodyParams(math.pi / 3).transmittance == pytest.approx(0.25)
    with pytest.raises(ValueError):
        GrayBodyParams(2.0)


def test_graybody_theta0_reduction():
    # transparent splitter: the '0' particle stays in c
    for z in (0.2, 0.6):
        ens = graybody_ensemble(z, 0.0)
        spont, stim = stimulated_dist(z, 0), stimulated_dist(z, 1)
        for got, ref in ((ens.dist_s_0, spont), (ens.dist_s_1, spont),
                         (ens.dist_sbar_0, spont), (ens.dist_sbar_1, stim)):
            size = max(len(got), len(ref))
            assert np.max(np.abs(got.padded(size) - ref.padded(size))) < 1e-12


@pytest.mark.parametrize("z,theta", [(0.3, 0.3), (0.7, math.pi / 4), (0.5, 1.2)])
def test_graybody_closed_vs_bs_sum(z, theta):
    ens = graybody_ensemble(z, theta)
    p0, p1 = graybody_bs_sum(z, theta)
    for got, ref in ((ens.dist_s_0.weights, p0), (ens.dist_s_1.weights, p1)):
        k = min(got.size, 60)
        assert np.max(np.abs(got[:k] - ref[:k])) < 1e-12


def test_graybody_full_reflection_is_one_bit():
    for z in (0.1, 0.5, 0.9):
        assert holevo_chi_graybody(z, math.pi / 2) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("theta,ref", [
    (0.0, 0.35573),
    (math.pi / 8, 0.35710),
    (math.pi / 4, 0.38289),
    (3 * math.pi / 8, 0.56989),
    (3.75 * math.pi / 8, 0.93013),
    (math.pi / 2, 1.0),
])
def test_graybody_regression(theta, ref):
    assert holevo_chi_graybody(0.5, theta) == pytest.approx(ref, abs=1e-5)


def test_ensemble_validation():
    d = stimulated_dist(0.3, 0)
    with pytest.raises(ValueError):
        ChannelEnsemble(d, d, d, d, p_mix=1.5)
    assert holevo_from_ensemble(ChannelEnsemble(d, d, d, d)) == pytest.approx(0.0, abs=1e-12)


def test_vacuum_codewords_distinguishable():
    for theta in (0.0, math.pi / 8, math.pi / 4, 1.3, math.pi / 2):
        assert holevo_chi_graybody(0.0, theta) == pytest.approx(1.0, abs=1e-12)


def test_theta_zero_is_minimal():
    thetas = [0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2]
    chi = [holevo_chi_graybody(0.5, th) for th in thetas]
    assert min(chi) == chi[0]


@pytest.mark.parametrize("z", [0.3, 0.7])
def test_mixing_probability_maximum_at_half(z):
    ens = stimulated_ensemble(z)
    p = np.linspace(0.05, 0.95, 19)
    chi = [holevo_from_ensemble(ens, float(x)) for x in p]
    assert p[int(np.argmax(chi))] == pytest.approx(0.5)


@pytest.mark.parametrize("z,theta", [(0.5, 0.0), (0.5, 0.4), (0.8, 1.0)])
def test_graybody_mixing_probability_gain_is_small(z, theta):
    # scattering breaks the 0 <-> 1 symmetry, so the optimum sits below 1/2
    ens = graybody_ensemble(z, theta)
    p = np.linspace(0.3, 0.7, 81)
    chi = np.array([holevo_from_ensemble(ens, float(x)) for x in p])
    assert p[int(np.argmax(chi))] < 0.5
    assert chi.max() - holevo_from_ensemble(ens, 0.5) < 1e-2


def test_stimulated_mean_and_entropies():
    d = stimulated_dist(0.5, 1)
    assert float(np.dot(np.arange(len(d)), d.weights)) == pytest.approx(3.0, abs=1e-9)
    assert component_entropies(0.5)[0] == pytest.approx(2.0, abs=1e-14)
    for z in np.linspace(0.01, 0.95, 20):
        s0, s1 = component_entropies(z)
        assert s1 >= s0


def test_graybody_distributions_normalized_and_moments():
    ens = graybody_ensemble(0.5, math.pi / 4)
    for d in (ens.dist_s_0, ens.dist_s_1, ens.dist_sbar_0, ens.dist_sbar_1):
        assert abs(d.weights.sum() - 1) < 1e-9
        assert d.discarded_mass < 1e-9
    m = ens.dist_sbar_1
    assert float(np.dot(np.arange(len(m)), m.weights)) == pytest.approx(3.0, abs=1e-8)
    s1 = graybody_ensemble(0.5, 0.0).dist_s_1.weights
    assert s1[:5] == pytest.approx(0.5 * 0.5 ** np.arange(5), abs=1e-12)


def test_bs_identity_at_zero_angle():
    for n, n_prime in ((0, 3), (2, 2), (4, 0)):
        f = bs_coefficients(n, n_prime, 0.0)
        assert np.abs(f) == pytest.approx(np.eye(n + n_prime + 1)[n], abs=1e-15)
