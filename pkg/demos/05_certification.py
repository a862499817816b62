"""Certifying every (loss, mode, rule) combination on random instances.

Each row pairs a loss with its aggregation rule and learning rate and tests
the defining inequality on random forecasts, weights and outcomes. This is
the same suite the `mixagg verify` command runs.
"""

from mixagg.certify import run_verification_suite

for row in run_verification_suite(None, trials=200, seed=0):
    print(row.line())
