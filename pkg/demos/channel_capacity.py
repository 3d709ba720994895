"""Holevo capacity of the stimulated-emission channel, with and without
gray-body scattering."""
import math

import numpy as np

from artifact.analytic import crossover_z_star
from artifact.channel import CHI_TERMINAL, holevo_chi, holevo_chi_graybody

zs = crossover_z_star().z_root
print(f"crossover z* = {zs:.6f}, terminal chi = {CHI_TERMINAL:.6f}")
thetas = [0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2]
print(f"{'z':>5} {'short':>8} {'long':>8} " + " ".join(f"th={t:.3f}" for t in thetas))
for z in np.arange(0.0, 1.0, 0.1):
    row = [holevo_chi_graybody(float(z), th) for th in thetas]
    print(f"{z:5.2f} {holevo_chi(z):8.5f} {holevo_chi(z, 'long'):8.5f} " + " ".join(f"{c:8.5f}" for c in row))
