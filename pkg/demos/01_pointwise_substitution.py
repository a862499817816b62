"""Pointwise mixability: turning a weighted pool of point forecasts into one.

For the square loss on an interval the aggregating algorithm needs a single
prediction whose exponentiated loss dominates the weighted average of the
experts' exponentiated losses at every outcome. The substitution function
builds it in closed form. Here we build one, check it on a dense outcome
grid, and show that at four times the mixability rate no prediction works.
"""

import numpy as np

from mixagg import square_loss, square_substitution
from mixagg.oracle import check_mixability, search_square_loss_violation
from mixagg.pointwise import complex_square_loss, complex_square_substitution

rng = np.random.default_rng(0)
forecasts = np.array([0.1, 0.45, 0.9])
weights = np.array([0.5, 0.3, 0.2])

g = square_substitution(forecasts, weights)
print(f"substituted prediction: {g:.6f}  (weighted mean {weights @ forecasts:.6f})")

outcomes = np.linspace(0, 1, 2001)
report = check_mixability(square_loss, g, forecasts, weights, 2.0, outcomes)
print(f"mixability at eta=2 on 2001 outcomes: passed={report.passed}, worst slack {report.worst_slack:+.3e}")

search = search_square_loss_violation(8.0, trials=1000, seed=0)
print(f"eta=8: {search.note}; forecasts {np.round(search.forecasts, 3)}, weights {np.round(search.weights, 3)}")

# the same construction on the complex unit disc, at rate 1/4
z = np.sqrt(rng.uniform(0, 1, 4)) * np.exp(2j * np.pi * rng.uniform(0, 1, 4))
w = rng.dirichlet(np.ones(4))
gz = complex_square_substitution(z, w)
x = np.linspace(-1, 1, 128)
om = (x[:, None] + 1j * x[None, :]).ravel()
om = om[np.abs(om) <= 1]
slack = np.exp(-0.25 * complex_square_loss(gz, om)) - w @ np.exp(-0.25 * np.abs(z[:, None] - om) ** 2)
print(f"complex disc: prediction {gz:.4f}, worst slack over {om.size} outcomes {slack.min():+.3e}")
