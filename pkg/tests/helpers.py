"""Small hand-built matrices shared by the tests."""
from Micky.PerfMatrix import CloudConfig, PerfMatrix


def make_configs(n, prices=None):
	families = ("compute-optimized", "memory-optimized", "general-purpose")
	prices = prices or [1.0] * n
	return [
		CloudConfig("s%d" % i, families[i % 3], "large", 2 * (1 + i % 3), 4.0 * (1 + i % 2), prices[i], 250.0 * (1 + i % 2))
		for i in range(n)
	]


def make_matrix(rows, prices=None, objective_kind="execution-time", workloads=None):
	n_s = len(rows[0])
	workloads = workloads or ["w%d" % i for i in range(len(rows))]
	return PerfMatrix(workloads, make_configs(n_s, prices), rows, objective_kind)


CONFIGS_CSV = """config_id,family,size_tier,vcpus,mem_gb,price_per_hour_usd,ebs_mbps
c4.large,compute-optimized,large,2,3.75,0.10,500
r4.large,memory-optimized,large,2,15.25,1.00,425
"""

MEASUREMENTS_CSV = """workload_id,config_id,elapsed_seconds
w0,c4.large,7200
w0,r4.large,3600
w1,c4.large,120
w1,r4.large,100
"""
