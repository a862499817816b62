"""Aggregating distributional forecasts.

Each loss has its own rule for combining weighted expert forecasts. For
CRPS the aggregate is a valid CDF built pointwise from the experts' CDF
values. For transport losses it is a weighted quantile average, which for
the quadratic cost is the Wasserstein barycenter.
"""

import numpy as np

from mixagg import (
    aggregate_crps_mixable,
    aggregate_mixture,
    aggregate_ot1d_quantile,
    aggregate_w2_barycenter,
    crps,
    make_empirical,
)

rng = np.random.default_rng(2)
experts = [make_empirical(rng.normal(c, 0.05, 20).clip(0, 1), domain=(0, 1)) for c in (0.2, 0.5, 0.75)]
w = np.array([0.2, 0.5, 0.3])
outcome = make_empirical([0.55], domain=(0, 1))

crps_agg = aggregate_crps_mixable(experts, w)
print(f"CRPS aggregate: {crps_agg.grid.size} grid points, CDF from {crps_agg.cdf[0]:.3f} to {crps_agg.cdf[-1]:.3f}")
print("expert CRPS:", np.round([crps(f, outcome) for f in experts], 5), f"aggregate {crps(crps_agg, outcome):.5f}")

mix = aggregate_mixture(experts, w)
print(f"mixture CRPS {crps(mix, outcome):.5f}")

bary = aggregate_w2_barycenter(experts, w)
print(f"W2 barycenter median {bary.quantile_at(0.5):.4f}; weighted expert medians {w @ [f.quantile_at(0.5) for f in experts]:.4f}")

q = aggregate_ot1d_quantile(experts, w)
draws = q.sample(rng, 10_000)
print(f"quantile aggregate median {q.quantile_at(0.5):.4f}; sample mean of 10000 draws {draws.mean():.4f}")
