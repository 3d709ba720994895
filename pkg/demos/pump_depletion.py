"""Depleted-pump evolution for a 255-photon Fock pump.

Prints the mean signal and pump occupations next to the short-time squeezed
vacuum and the elliptic long-time envelope, then the detected events.
"""
import warnings

import numpy as np

from artifact.analytic import EllipticSchedule, ModelValidityWarning, SqueezeTime, longtime_mean, short_time_mean
from artifact.dynamics import EvolutionConfig, detect_events, evolve_single_pair, observe_single_pair
from artifact.fock import ModeSetup

setup = ModeSetup(255)
series = observe_single_pair(evolve_single_pair(setup, EvolutionConfig.uniform(6.0, 0.01)))
sched = EllipticSchedule.from_setup(setup)

print(f"T_q = {sched.T_q:.5f}, K(k_e) = {sched.quarter_period_exact:.5f}")
print(f"{'tau':>5} {'n_s exact':>10} {'n_p exact':>10} {'short':>10} {'envelope':>10}")
with warnings.catch_warnings():
    warnings.simplefilter("ignore", ModelValidityWarning)
    for j in range(0, series.tau_grid.size, 50):
        tau = series.tau_grid[j]
        short = short_time_mean(SqueezeTime.from_tau(tau)) if tau < 3 else np.nan
        print(f"{tau:5.2f} {series.nbar_s[j]:10.3f} {series.nbar_p[j]:10.3f} {short:10.3f} "
              f"{float(longtime_mean(tau, setup)):10.3f}")

ev = detect_events(series)
print("events:", {k: (None if v is None else round(v, 4)) for k, v in ev.as_dict().items()})
