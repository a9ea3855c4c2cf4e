from Micky import *
import logging
from Micky.Enum import *


logging.basicConfig(level=logging.INFO)
LOGGER = logging.getLogger(__name__)
LOGGER.info("START")

# a planted-exemplar matrix: 40 workloads, 10 VM types
spec = SynthSpec(n_workloads=40, n_configs=10, exemplar_fraction=0.8, near_band=0.1, seed=42)
matrix, planted = gen_matrix(spec)
print("planted exemplar:", planted)

# one collective run with the default budget (alpha=1, beta=0.5)
outcome = run_micky(matrix, PolicySpec.ucb1(), Budget(1, 0.5), RewardMode.ONLINE, rng=42)
print("micky picked %s after %d measurements" % (outcome.exemplar, outcome.cost))

# per-workload search for comparison
cp_cost = sum(run_cherrypick(matrix, w, rng=42).cost for w in matrix.workloads)
print("cherrypick measured %d times" % cp_cost)

# replicated comparison
reports = [
	replicate(MethodSpec(Method.MICKY), matrix, n_reps=20),
	replicate(MethodSpec(Method.CHERRYPICK), matrix, n_reps=20),
	replicate(MethodSpec(Method.RANDOM4), matrix, n_reps=20),
]
for r in reports:
	print(r.method, r.np_quantiles[0.5], r.total_cost_stats[1])

micky, cherrypick = reports[0], reports[1]
savings = (cherrypick.total_cost_stats[1] - micky.total_cost_stats[1]) / matrix.n_workloads
delta_p = max(micky.np_quantiles[0.5] - cherrypick.np_quantiles[0.5], 0.0)
print("knee point:", knee_point(KneeInputs(delta_p, savings)))
