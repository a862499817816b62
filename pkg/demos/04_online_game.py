"""An online forecasting game run by the aggregating algorithm.

Ten experts forecast a drifting quantity for 1000 rounds under CRPS. The
learner's cumulative loss stays within ln(N)/eta of the best expert, and
each round of the regret argument is re-checked from the recorded trace.
"""

import math
from pathlib import Path

from mixagg import aa_run, verify_regret_chain
from mixagg.cli import load_experiment

config, (experts, outcomes), _, _ = load_experiment(Path(__file__).resolve().parent.parent / "configs" / "crps_demo.json")
trace = aa_run(config, experts, outcomes)
report = verify_regret_chain(trace)

L = trace.cumulative_expert_loss
print(f"eta = {trace.eta}, learner loss {trace.learner_loss.sum():.3f}, best expert {L.min():.3f} (expert {L.argmin() + 1})")
print(f"regret {trace.regret:.4f} <= ln(10)/eta = {math.log(10) / trace.eta:.4f}")
print(f"regret chain verified: {report.passed} ({len(report.checks)} checks)")
print("final weights:", " ".join(f"{x:.3f}" for x in trace.weights[-1]))
