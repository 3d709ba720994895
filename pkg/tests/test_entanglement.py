import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.analytic import SqueezeTime, f_of_z
from artifact.dynamics import EvolutionConfig, evolve_single_pair
from artifact.entanglement import (
    analytic_magnitudes,
    bs_send0_magnitudes,
    logneg_bs_scattering,
    logneg_entangled_ic,
    logneg_from_negativity,
    logneg_pair_vs_pair,
    logneg_pump_idler_vs_signal,
    logneg_pump_idler_vs_signal_analytic,
    logneg_pump_idler_vs_signal_entangled_ic,
    logneg_pump_idler_vs_signal_separable_ic,
    logneg_signal_vs_idler,
    mutual_and_tripartite_info,
    negativity_pump_idler_vs_signal,
)
from artifact.fock import ModeSetup
from artifact.oracles import SINGLE_MODES, logneg_dense, single_pair_terms
from artifact.selftest import mixed_logneg_gaps


def _truncated(z, n_s0, size):
    c = analytic_magnitudes(z, n_s0)[:size]
    return c / np.linalg.norm(c)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 0.6), st.integers(0, 3))
def test_pure_bipartitions_match_dense_oracle(z, n_s0):
    c = _truncated(z, n_s0, 10)
    terms = single_pair_terms(c * (-1j) ** np.arange(c.size), n_s0=n_s0)
    dense = logneg_dense(terms, SINGLE_MODES, ("p", "ibar"), ("s",))
    assert logneg_pump_idler_vs_signal(c) == pytest.approx(dense, abs=1e-10)
    assert logneg_dense(terms, SINGLE_MODES, ("s",), ("ibar",)) == pytest.approx(0.0, abs=1e-12)
    assert logneg_signal_vs_idler(c) == 0.0


def test_dynamic_state_matches_dense_oracle():
    for st_ in evolve_single_pair(ModeSetup(12, 1), EvolutionConfig(np.array([0.0, 0.4, 1.5]))):
        terms = single_pair_terms(st_.values, n_p0=12, n_s0=1)
        dense = logneg_dense(terms, SINGLE_MODES, ("p", "ibar"), ("s",))
        assert logneg_pump_idler_vs_signal(st_) == pytest.approx(dense, abs=1e-10)


def test_negativity_and_logneg_consistent():
    c = _truncated(0.4, 0, 30)
    assert logneg_from_negativity(negativity_pump_idler_vs_signal(c)) == pytest.approx(
        logneg_pump_idler_vs_signal(c), abs=1e-12)


@pytest.mark.parametrize("tau", [0.5, 1.0, 2.0])
def test_short_time_logneg_linear_in_tau(tau):
    # sum |c_n| = sqrt(1-z)/(1-sqrt z), so E_N = log2(e^{2 tau}) = 2 tau / ln 2
    z = SqueezeTime.from_tau(tau).z
    assert logneg_pump_idler_vs_signal_analytic(z) == pytest.approx(2 * tau / math.log(2), abs=1e-9)


def test_long_time_logneg_offset():
    z = SqueezeTime.from_tau(5.0).z
    got = logneg_pump_idler_vs_signal_analytic(z, branch="long")
    assert got == pytest.approx(13.8947797077739516, abs=1e-9)
    assert got - 10 / math.log(2) == pytest.approx(-0.532170701115682, abs=1e-9)


def test_branch_validation():
    with pytest.raises(ValueError):
        logneg_pump_idler_vs_signal_analytic(0.3, branch="medium")


@pytest.mark.parametrize("z", [0.1, 0.5, 0.9])
def test_pair_vs_pair_closed_forms(z):
    assert logneg_pair_vs_pair(z) == pytest.approx(math.log2((1 + z) / (1 - z)), abs=1e-9)
    assert logneg_pair_vs_pair(z, branch="long") == pytest.approx(math.log2(1 + 2 * f_of_z(z)), abs=1e-9)


def test_pair_vs_pair_vacuum():
    assert logneg_pair_vs_pair(0.0) == 0.0


def test_bs_vacuum_signal():
    for theta in np.linspace(0, math.pi / 2, 9):
        ref = 2 * math.log2(math.cos(theta) + math.sin(theta))
        assert logneg_bs_scattering(0.0, theta) == pytest.approx(ref, abs=1e-13)


def test_bs_symmetric_about_quarter_pi():
    for d in (0.1, 0.3, 0.6):
        assert logneg_bs_scattering(0.0, math.pi / 4 - d) == pytest.approx(
            logneg_bs_scattering(0.0, math.pi / 4 + d), abs=1e-13)


def test_bs_limits_and_validation():
    assert logneg_bs_scattering(0.4, 0.0) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        logneg_bs_scattering(0.4, 2.0)


def test_bs_send0_magnitudes_normalized():
    for n in (0, 1, 5, 30):
        for theta in (0.0, 0.3, math.pi / 4, math.pi / 2):
            assert np.sum(bs_send0_magnitudes(n, theta) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_entangled_ic():
    assert logneg_entangled_ic(0.5, 0) == 0.0
    val = logneg_entangled_ic(0.5, 2)
    assert 0.0 < val <= 1.0
    # z = 0: both branches are vacuum, the spectator is maximally entangled
    assert logneg_entangled_ic(0.0, 2) == pytest.approx(1.0, abs=1e-14)


def test_entangled_vs_separable_ic():
    sep = logneg_pump_idler_vs_signal_separable_ic(0.4, 2)
    ent = logneg_pump_idler_vs_signal_entangled_ic(0.4, 2)
    assert np.isfinite(sep) and np.isfinite(ent)
    assert logneg_pump_idler_vs_signal_entangled_ic(0.4, 0) == pytest.approx(
        logneg_pump_idler_vs_signal_separable_ic(0.4, 0), abs=1e-12)


def test_tripartite_information_vanishes():
    for st_ in evolve_single_pair(ModeSetup(20), EvolutionConfig(np.array([0.0, 1.0, 3.0]))):
        i_ab, i3 = mutual_and_tripartite_info(st_)
        assert i3 == pytest.approx(0.0, abs=1e-12)
        assert i_ab >= 0.0


def test_mixed_closed_forms_bound_dense_oracle():
    for name, gaps in mixed_logneg_gaps().items():
        assert min(gaps) > -1e-10, name


def test_entangled_ic_direct_summation():
    z, n_s0 = 0.5, 5
    n = np.arange(400)
    from scipy.special import comb
    a = np.sqrt((1 - z) * z ** n)
    b = np.sqrt((1 - z) ** (n_s0 + 1) * z ** n * comb(n_s0 + n, n))
    assert logneg_entangled_ic(z, n_s0) == pytest.approx(math.log2(1 + np.sum(a * b)), abs=1e-10)


@pytest.mark.parametrize("n_s0", [1, 2, 5, 10])
def test_entangled_ic_below_separable(n_s0):
    for z in np.linspace(0, 0.95, 20):
        assert (logneg_pump_idler_vs_signal_entangled_ic(z, n_s0)
                <= logneg_pump_idler_vs_signal_separable_ic(z, n_s0) + 1e-12)


def test_bs_transparent_and_reflecting_are_separable():
    for z in (0.3, 0.9):
        for theta in (0.0, math.pi / 2):
            assert logneg_bs_scattering(z, theta) == pytest.approx(0.0, abs=1e-12)
    assert logneg_bs_scattering(0.5, math.pi / 8) == pytest.approx(logneg_bs_scattering(0.5, 3 * math.pi / 8), abs=1e-10)


def test_pair_vs_pair_long_time_asymptote():
    tau = 5.0
    got = logneg_pair_vs_pair(SqueezeTime.from_tau(tau).z, branch="long")
    assert got == pytest.approx(2 * tau / math.log(2) + 3 - math.pi / math.log(2), abs=1e-3)


def test_mutual_information_is_signal_entropy():
    from artifact.specfun import shannon_entropy_bits
    st_ = evolve_single_pair(ModeSetup(20), EvolutionConfig(np.array([0.0, 1.0])))[1]
    i_ab, _ = mutual_and_tripartite_info(st_)
    assert i_ab == pytest.approx(shannon_entropy_bits(np.abs(st_.values) ** 2 / st_.norm ** 2), abs=1e-10)
