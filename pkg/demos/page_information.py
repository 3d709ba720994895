"""Page's average subsystem entropy over the factorizations of 291600,
and the information in the signal mode of a depleting pump."""
import numpy as np

from artifact.dynamics import EvolutionConfig, evolve_single_pair, observe_single_pair
from artifact.fock import ModeSetup
from artifact.page import page_curve, page_information_dynamic

rows = page_curve(291_600)
print(f"{len(rows)} factor pairs; every 8th shown")
print(f"{'m':>7} {'ln m':>8} {'S':>8} {'I':>8}")
for m, _, lnm, s, i in rows[::8]:
    print(f"{m:7d} {lnm:8.4f} {s:8.4f} {i:8.4f}")

series = observe_single_pair(evolve_single_pair(ModeSetup(255), EvolutionConfig.uniform(6.0, 0.25)))
info = page_information_dynamic(series.signal_dists)
print("\nsignal-mode information (bits) vs tau")
for tau, i in zip(series.tau_grid[::2], info[::2]):
    print(f"{tau:5.2f} {i:8.4f}")
print(f"max {np.max(info):.4f} bits")
