import logging

LOGGER = logging.getLogger(__name__)


# //----------------------------------------------------------------------------
# //        Constants
# //----------------------------------------------------------------------------

DEFAULT_SEED = 42

# Micky budget: alpha sweeps over every VM type, beta pulls per workload
DEFAULT_ALPHA = 1
DEFAULT_BETA = 0.5

# Bandit policy parameters
DEFAULT_EPSILON = 0.1
DEFAULT_TEMPERATURE = 0.1

# CherryPick setup
DEFAULT_N_INIT = 3
DEFAULT_EI_STOP = 0.10  # stop when max EI < 10% of the best observed objective
DEFAULT_XI = 0.0

# Random-k straw men
RANDOM4_K = 4
RANDOM8_K = 8

DEFAULT_REPLICATIONS = 100

# Gaussian process hyperparameter grid (searched by log marginal likelihood)
GP_LENGTHSCALES = (0.1, 0.3, 1.0, 3.0)
GP_SIGNAL_VARIANCES = (0.5, 1.0, 2.0)
GP_NOISE_VARIANCES = (1e-4, 1e-2)
GP_JITTER = 1e-6
GP_JITTER_RETRY = 10.0  # jitter multiplier for the single factorization retry

# Report statistics
NP_QUANTILES = (0.10, 0.25, 0.50, 0.75, 0.90)
NP_THRESHOLDS = (1.1, 1.2, 1.4)
LANDSCAPE_THRESHOLD = 1.3  # "within 30% of the optimal"
SUBOPTIMAL_NP = 1.4
EXEMPLAR_MAJORITY = 0.5

# Knee point: C_P = 10 x C_M
DEFAULT_COST_RATIO = 10.0
# relative distance at which a knee ratio counts as the integer it rounds to
KNEE_TOLERANCE = 1e-9

# Policy comparison budgets S0 < S1 < S2
POLICY_ALPHAS = (0, 1, 2)

# Data layout written by the generator and read by the CLI
CONFIGS_FILE = "configs.csv"
MEASUREMENTS_FILE = "measurements.csv"
SIDECAR_FILE = "planted.json"
REPORT_FILE = "report.json"
SAMPLES_FILE = "np_samples.csv"
COST_CURVE_FILE = "cost_curve.csv"

CONFIG_COLUMNS = ("config_id", "family", "size_tier", "vcpus", "mem_gb", "price_per_hour_usd", "ebs_mbps")
MEASUREMENT_COLUMNS = ("workload_id", "config_id", "elapsed_seconds")
SAMPLE_COLUMNS = ("method", "replication", "workload", "np", "cost")
CURVE_COLUMNS = ("n_workloads", "method", "median_cost")

SECONDS_PER_HOUR = 3600.0
