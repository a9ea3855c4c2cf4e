from .PerfMatrix import (
	CloudConfig, PerfMatrix, Pull, PullLog, MatrixError, MatrixValidationError, IncompleteMatrixError,
	DuplicateMeasurementError, UnknownIdError, load_matrix, load_matrix_dir, workload_groups,
)
from .Bandit import ArmStats, PolicySpec
from .Micky import Budget, EmptyBudgetError, MickyOutcome, run_micky, reward, exemplar_of
from .GaussianProcess import NonPSDKernelError, GpModel, fit, fit_best, predict, expected_improvement, matern52
from .Baselines import EncodingError, RunOutcome, encode_config, run_cherrypick, run_random_k, run_brute
from .Synth import SynthSpec, gen_matrix, write_synth
from .EvalHarness import (
	MethodSpec, ExperimentReport, ComparisonDocument, KneeInputs, replicate, cost_curve, knee_point,
	summarize, landscape, top_exemplars, compare_policies, replicate_groups,
)


def int_or_str(value):
	try:
		return int(value)
	except ValueError:
		return value


__version__ = "0.1.0"
VERSION = tuple(map(int_or_str, __version__.split(".")))

__all__ = [
	"CloudConfig", "PerfMatrix", "Pull", "PullLog", "load_matrix", "load_matrix_dir",
	"PolicySpec", "Budget", "run_micky", "run_cherrypick", "run_random_k", "run_brute",
	"SynthSpec", "gen_matrix", "MethodSpec", "replicate", "cost_curve", "knee_point", "summarize",
]
