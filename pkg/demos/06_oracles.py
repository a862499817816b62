"""Independent oracles used to cross-check the library.

Hoelder's inequality underlies the pointwise-to-integral argument; the
checker reports its gap on arbitrary positive tables. A transportation
simplex solves discrete OT with unequal weights for comparison with the
closed-form 1-D cost.
"""

import numpy as np

from mixagg import make_empirical, ot1d_cost
from mixagg.oracle import check_holder, discrete_ot_lp, mc_integrate

rng = np.random.default_rng(6)
f = np.exp(rng.normal(size=(5, 7)))
r = check_holder(f, rng.dirichlet(np.ones(5)), rng.uniform(0, 2, 7), rng.dirichlet(np.ones(7)))
print(f"Hoelder: lhs {r.lhs:.6f} <= rhs {r.rhs:.6f}, gap {r.gap:.3e}")

xs, ws = rng.uniform(0, 1, 4), rng.dirichlet(np.ones(4))
ys, vs = rng.uniform(0, 1, 3), rng.dirichlet(np.ones(3))
print(f"OT1D {ot1d_cost(make_empirical(xs, ws, (0, 1)), make_empirical(ys, vs, (0, 1))):.12f}, LP {discrete_ot_lp(xs, ws, ys, vs):.12f}")

mc = mc_integrate(lambda x: x[:, 0] ** 2, 100_000, seed=0, dim=3)
print(f"mean of x_1^2 over the sphere: {mc.estimate:.4f} +- {mc.std_error:.4f} (exact 1/3)")
