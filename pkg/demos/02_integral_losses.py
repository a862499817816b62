"""Integral losses between distributions and the identities linking them.

CRPS compares two CDFs on an interval. Its sliced version averages the
one-dimensional score over projection directions; a fixed constant turns
it into the energy distance. MMD with a translation-invariant kernel equals
a characteristic-function distance under the kernel's spectral measure.
The 1-D transport cost matches a brute-force matching solver.
"""

import numpy as np

from mixagg import (
    GaussianKernel,
    ParticleDistributionND,
    cfd,
    crps,
    energy_distance,
    make_dirac,
    make_empirical,
    make_uniform,
    mmd_squared,
    ot1d_cost,
    scrps,
)
from mixagg.losses import energy_scrps_constant
from mixagg.oracle import discrete_ot_bruteforce

rng = np.random.default_rng(1)

u, d = make_uniform((0, 1)), make_dirac(0.5, (0, 1))
print(f"CRPS(uniform, dirac 0.5) = {crps(u, d):.6f}  (exact 1/12 = {1 / 12:.6f})")

for D in (2, 3):
    g = ParticleDistributionND(rng.uniform(-0.5, 0.5, (8, D)))
    o = ParticleDistributionND(rng.uniform(-0.5, 0.5, (5, D)))
    e, s = energy_distance(g, o), scrps(g, o, directions=100_000, seed=D)
    c = energy_scrps_constant(D)
    print(f"D={D}: energy {e:.6f}, c_D * SCRPS {c * s:.6f}, c_D = {c:.6f}")

k = GaussianKernel(bandwidth=0.7)
g = ParticleDistributionND(rng.normal(size=(6, 2)))
o = ParticleDistributionND(rng.normal(size=(4, 2)))
print(f"MMD^2 {mmd_squared(g, o, k):.6f}, spectral CFD {k.spectral_mass * cfd(g, o, k.spectral_weighting(2, 100_000, seed=3)):.6f}")

xs, ys = rng.uniform(0, 1, 6), rng.uniform(0, 1, 6)
print(
    f"OT1D {ot1d_cost(make_empirical(xs, domain=(0, 1)), make_empirical(ys, domain=(0, 1))):.12f}, "
    f"brute force {discrete_ot_bruteforce(xs, ys):.12f}"
)
