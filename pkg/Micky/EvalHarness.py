"""
Replicated experiments and the metrics reported on them.

Replication i runs with seed base_seed + i on its own Generator. Results are
reduced in seed order, so reports do not depend on the number of workers.
"""
import json
import logging
import math
import os
from fractions import Fraction
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from .Bandit import PolicySpec
from .Baselines import encode_configs, run_brute, run_cherrypick, run_random_k
from .Constants import *
from .Enum import Method, RewardMode
from .Micky import Budget, run_micky
from .PerfMatrix import workload_groups

LOGGER = logging.getLogger(__name__)

BUDGET_LEVELS = ("S0", "S1", "S2")


@dataclass(frozen=True)
class MethodSpec:
	method: Method
	policy: PolicySpec = field(default_factory=PolicySpec.ucb1)
	budget: Budget = field(default_factory=Budget)
	reward_mode: RewardMode = RewardMode.ONLINE
	n_init: int = DEFAULT_N_INIT
	ei_stop: float = DEFAULT_EI_STOP
	k: Optional[int] = None
	label: Optional[str] = None

	def __post_init__(self):
		object.__setattr__(self, "method", Method.parse(self.method))
		object.__setattr__(self, "reward_mode", RewardMode.parse(self.reward_mode))
		if self.k is None:
			default_k = {Method.RANDOM4: RANDOM4_K, Method.RANDOM8: RANDOM8_K}.get(self.method)
			object.__setattr__(self, "k", default_k)
		if self.method is Method.RANDOMK and self.k is None:
			raise ValueError("randomk needs k")

	@property
	def name(self):
		return self.label or self.method.value

	@property
	def collective(self):
		return self.method.collective

	def to_dict(self):
		out = {"method": self.method.value}
		if self.collective:
			out.update(policy=self.policy.to_dict(), budget=self.budget.to_dict(), reward_mode=self.reward_mode.value)
		elif self.method is Method.CHERRYPICK:
			out.update(n_init=self.n_init, ei_stop=self.ei_stop)
		elif self.k is not None:
			out.update(k=self.k)
		return out


@dataclass
class Replication:
	seed: int
	samples: List[Tuple[str, float]]  # (workload, NP)
	total_cost: int
	exemplar: Optional[str] = None
	outcomes: list = field(default_factory=list)


@dataclass
class ExperimentReport:
	method: str
	replications: int
	np_quantiles: Dict[float, float]
	threshold_fractions: Dict[float, float]
	total_cost_stats: Tuple[float, float, float]
	exemplar_histogram: Optional[Dict[str, int]] = None
	samples: list = field(default_factory=list, compare=False, repr=False)

	def to_dict(self):
		return {
			"method": self.method,
			"replications": self.replications,
			"np_quantiles": {repr(q): v for q, v in self.np_quantiles.items()},
			"threshold_fractions": {repr(t): f for t, f in self.threshold_fractions.items()},
			"total_cost_stats": dict(zip(("min", "median", "max"), self.total_cost_stats)),
			"exemplar_histogram": self.exemplar_histogram,
		}

	@classmethod
	def from_dict(cls, data):
		stats = data["total_cost_stats"]
		return cls(
			method=data["method"],
			replications=int(data["replications"]),
			np_quantiles={float(q): v for q, v in data["np_quantiles"].items()},
			threshold_fractions={float(t): f for t, f in data["threshold_fractions"].items()},
			total_cost_stats=(stats["min"], stats["median"], stats["max"]),
			exemplar_histogram=data.get("exemplar_histogram"),
		)


def _map(fn, items, workers):
	if workers is None or workers <= 1:
		return [fn(item) for item in items]
	with ThreadPoolExecutor(max_workers=workers) as pool:
		return list(pool.map(fn, items))


def run_once(spec, matrix, seed):
	rng = np.random.default_rng(seed % 2 ** 64)
	if spec.collective:
		outcome = run_micky(matrix, spec.policy, spec.budget, spec.reward_mode, rng)
		column = matrix.normalized_table[:, matrix.config_index(outcome.exemplar)]
		# the exemplar is scored on every workload, pulled or not
		samples = [(w, float(v)) for w, v in zip(matrix.workloads, column)]
		return Replication(seed, samples, outcome.cost, outcome.exemplar, [outcome])

	if spec.method is Method.CHERRYPICK:
		features = encode_configs(matrix.configs)
		run = lambda w: run_cherrypick(matrix, w, spec.n_init, spec.ei_stop, rng, features)
	elif spec.method is Method.BRUTE:
		run = lambda w: run_brute(matrix, w)
	else:
		run = lambda w: run_random_k(matrix, w, spec.k, rng)
	outcomes = [run(w) for w in matrix.workloads]
	samples = [(o.workload, matrix.normalized_performance(o.workload, o.chosen)) for o in outcomes]
	return Replication(seed, samples, sum(o.cost for o in outcomes), None, outcomes)


def quantiles(values, qs=NP_QUANTILES):
	"""Linear interpolation between order statistics (inclusive)."""
	values = np.asarray(values, dtype=float)
	return {float(q): float(v) for q, v in zip(qs, np.quantile(values, qs, method="linear"))}


def threshold_fractions(values, thresholds=NP_THRESHOLDS):
	values = np.asarray(values, dtype=float)
	return {float(t): float(np.count_nonzero(values <= t)) / len(values) for t in thresholds}


def _aggregate(spec, matrix, results):
	nps = [v for r in results for (_, v) in r.samples]
	costs = [r.total_cost for r in results]
	histogram = None
	if spec.collective:
		counts = Counter(r.exemplar for r in results)
		histogram = {c: counts[c] for c in matrix.config_ids if counts[c]}
	samples = [
		# cost is the measurement count of the whole replication
		(spec.name, i, w, v, r.total_cost)
		for i, r in enumerate(results)
		for (w, v) in r.samples
	]
	report = ExperimentReport(
		method=spec.name,
		replications=len(results),
		np_quantiles=quantiles(nps),
		threshold_fractions=threshold_fractions(nps),
		total_cost_stats=(int(min(costs)), float(np.median(costs)), int(max(costs))),
		exemplar_histogram=histogram,
		samples=samples,
	)
	LOGGER.info(
		"%s over %d reps: median NP %.4f, median cost %s",
		spec.name, len(results), report.np_quantiles[0.5], report.total_cost_stats[1],
	)
	return report


def replicate(spec, matrix, n_reps=DEFAULT_REPLICATIONS, base_seed=DEFAULT_SEED, workers=1):
	if n_reps < 1:
		raise ValueError("n_reps must be >= 1, got %r" % (n_reps,))
	seeds = [base_seed + i for i in range(n_reps)]
	results = _map(lambda seed: run_once(spec, matrix, seed), seeds, workers)
	return _aggregate(spec, matrix, results)


def replicate_groups(spec, matrix, n_reps=DEFAULT_REPLICATIONS, base_seed=DEFAULT_SEED, workers=1, separator="/"):
	return {
		group: replicate(spec, matrix.subset(workloads), n_reps, base_seed, workers)
		for group, workloads in workload_groups(matrix, separator).items()
	}


def cost_curve(matrix, workload_counts, methods, seeds, workers=1):
	counts = [int(c) for c in workload_counts]
	for count in counts:
		if not 1 <= count <= matrix.n_workloads:
			raise ValueError("workload count %d outside [1, %d]" % (count, matrix.n_workloads))
	seeds = list(seeds)
	rows = []
	for count in counts:
		for spec in methods:
			def total(seed):
				picked = np.sort(np.random.default_rng(seed % 2 ** 64).choice(matrix.n_workloads, count, replace=False))
				sub = matrix.subset([matrix.workloads[i] for i in picked])
				return run_once(spec, sub, seed).total_cost
			costs = _map(total, seeds, workers)
			median = float(np.median(costs))
			rows.append({"n_workloads": count, "method": spec.name, "median_cost": median})
			LOGGER.debug("cost curve |W|=%d %s: %g", count, spec.name, median)
	return rows


@dataclass(frozen=True)
class KneeInputs:
	delta_p: float
	savings: float  # measurement savings per workload
	cp_over_cm: float = DEFAULT_COST_RATIO

	def __post_init__(self):
		for name in ("delta_p", "savings", "cp_over_cm"):
			value = getattr(self, name)
			if not math.isfinite(value):
				raise ValueError("%s must be finite, got %r" % (name, value))
			if value < 0:
				raise ValueError("%s must be non-negative, got %r" % (name, value))
		if self.cp_over_cm == 0:
			raise ValueError("cp_over_cm must be positive")


def knee_point(k_in):
	"""
	Smallest recurrence count K with K x f(delta_p, C_P) >= g(savings, C_M),
	taking f and g as products. None means the single optimizer never pays off.
	"""
	if k_in.delta_p == 0:
		return None
	# exact in binary; a ratio within KNEE_TOLERANCE of an integer is that integer
	ratio = Fraction(float(k_in.savings)) / (Fraction(float(k_in.cp_over_cm)) * Fraction(float(k_in.delta_p)))
	nearest = round(ratio)
	if nearest > 0 and abs(ratio - nearest) <= Fraction(KNEE_TOLERANCE) * max(1, ratio):
		return nearest
	return math.ceil(ratio)


def knee_inputs_from_reports(single, collective, n_workloads, cp_over_cm=DEFAULT_COST_RATIO):
	"""Knee inputs from a per-workload report and a collective report on the same matrix."""
	delta_p = max(collective.np_quantiles[0.5] - single.np_quantiles[0.5], 0.0)
	savings = max(single.total_cost_stats[1] - collective.total_cost_stats[1], 0) / float(n_workloads)
	return KneeInputs(delta_p, savings, cp_over_cm)


def landscape(matrix, threshold=LANDSCAPE_THRESHOLD):
	"""Per-config exemplar opportunity: how often each VM type is optimal, satisfactory or poor."""
	table = matrix.normalized_table
	rows = []
	for si, c in enumerate(matrix.configs):
		column = table[:, si]
		fraction = matrix.fraction_within(c.id, threshold)
		rows.append({
			"config": c.id,
			"optimal_count": int(np.count_nonzero(column == 1.0)),
			"suboptimal_count": int(np.count_nonzero(column > SUBOPTIMAL_NP)),
			"mean_np": float(column.mean()),
			"fraction_within": fraction,
			"exemplar_candidate": fraction >= EXEMPLAR_MAJORITY,
		})
	return rows


def top_exemplars(matrix, histogram, k=3, thresholds=NP_THRESHOLDS):
	order = {c: i for i, c in enumerate(matrix.config_ids)}
	ranked = sorted(histogram.items(), key=lambda item: (-item[1], order[item[0]]))[:k]
	return [
		{
			"config": c,
			"selections": n,
			"fraction_within": {repr(float(t)): matrix.fraction_within(c, t) for t in thresholds},
		}
		for c, n in ranked
	]


def compare_policies(matrix, policies, alphas=POLICY_ALPHAS, beta=DEFAULT_BETA, n_reps=DEFAULT_REPLICATIONS,
		base_seed=DEFAULT_SEED, reward_mode=RewardMode.ONLINE, workers=1):
	rows = []
	for level, alpha in enumerate(alphas):
		budget = Budget(alpha, beta)
		name = BUDGET_LEVELS[level] if level < len(BUDGET_LEVELS) else "S%d" % level
		for policy in policies:
			spec = MethodSpec(Method.MICKY, policy, budget, reward_mode, label="micky-%s" % policy.label)
			seeds = [base_seed + i for i in range(n_reps)]
			results = _map(lambda seed: run_once(spec, matrix, seed), seeds, workers)
			per_rep = np.array([np.mean([v for (_, v) in r.samples]) for r in results])
			nps = [v for r in results for (_, v) in r.samples]
			rows.append({
				"policy": policy.label,
				"budget_level": name,
				"alpha": alpha,
				"beta": beta,
				"cost": budget.total_cost(matrix.n_workloads, matrix.n_configs),
				"np_quantiles": {repr(q): v for q, v in quantiles(nps).items()},
				"mean_np": float(per_rep.mean()),
				"np_variance": float(per_rep.var()),
			})
	return rows


@dataclass
class ComparisonDocument:
	reports: List[ExperimentReport]
	cost_curve: list = field(default_factory=list)
	policy_comparison: list = field(default_factory=list)
	groups: dict = field(default_factory=dict)
	top_exemplars: dict = field(default_factory=dict)

	def to_dict(self):
		return {
			"methods": {r.method: r.to_dict() for r in self.reports},
			"cost_curve": self.cost_curve,
			"policy_comparison": self.policy_comparison,
			"groups": {
				g: {r.method: r.to_dict() for r in reports}
				for g, reports in self.groups.items()
			},
			"top_exemplars": self.top_exemplars,
		}

	def to_json(self):
		return json.dumps(self.to_dict(), indent=2) + "\n"

	@classmethod
	def from_dict(cls, data):
		return cls(
			[ExperimentReport.from_dict(r) for r in data["methods"].values()],
			list(data.get("cost_curve", [])),
			list(data.get("policy_comparison", [])),
			{
				g: [ExperimentReport.from_dict(r) for r in reports.values()]
				for g, reports in data.get("groups", {}).items()
			},
			dict(data.get("top_exemplars", {})),
		)

	@classmethod
	def from_json(cls, text):
		return cls.from_dict(json.loads(text))

	def samples_frame(self):
		rows = [row for r in self.reports for row in r.samples]
		return pd.DataFrame(rows, columns=list(SAMPLE_COLUMNS))

	def curve_frame(self):
		return pd.DataFrame(self.cost_curve, columns=list(CURVE_COLUMNS))

	def write(self, out_dir):
		os.makedirs(out_dir, exist_ok=True)
		paths = {"report": os.path.join(out_dir, REPORT_FILE), "samples": os.path.join(out_dir, SAMPLES_FILE)}
		with open(paths["report"], "w", encoding="utf-8") as f:
			f.write(self.to_json())
		self.samples_frame().to_csv(paths["samples"], index=False, lineterminator="\n")
		if self.cost_curve:
			paths["cost_curve"] = os.path.join(out_dir, COST_CURVE_FILE)
			self.curve_frame().to_csv(paths["cost_curve"], index=False, lineterminator="\n")
		LOGGER.info("Wrote %s", ", ".join(paths.values()))
		return paths


def summarize(reports, cost_curve=None, policy_comparison=None, groups=None):
	reports = list(reports)
	if not reports:
		raise ValueError("summarize needs at least one report")
	return ComparisonDocument(reports, list(cost_curve or []), list(policy_comparison or []), dict(groups or {}))
