"""
Collective optimization: one exemplar VM type for a whole group of workloads.

Phase 1 sweeps every config alpha times on random workloads (pure exploration);
phase 2 spends ceil(beta x |W|) pulls chosen by a bandit policy. The exemplar
is the arm with the highest mean reward.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List

import numpy as np

from .Bandit import ArmStats, PolicySpec, new_arms, select, update
from .Constants import *
from .Enum import RewardMode
from .PerfMatrix import PullLog

LOGGER = logging.getLogger(__name__)


class EmptyBudgetError(ValueError):
	pass


def exact_fraction(x):
	# floats through repr so 0.1 means one tenth, not its binary neighbour
	if isinstance(x, (int, Fraction)):
		return Fraction(x)
	return Fraction(repr(float(x)))


def ceil_exact(numerator, denominator=1):
	return math.ceil(exact_fraction(numerator) / exact_fraction(denominator))


@dataclass(frozen=True)
class Budget:
	alpha: int = DEFAULT_ALPHA
	beta: float = DEFAULT_BETA

	def __post_init__(self):
		if int(self.alpha) != self.alpha or self.alpha < 0:
			raise ValueError("alpha must be a non-negative integer, got %r" % (self.alpha,))
		if not (self.beta >= 0 and math.isfinite(self.beta)):
			raise ValueError("beta must be a non-negative real, got %r" % (self.beta,))
		object.__setattr__(self, "alpha", int(self.alpha))

	def phase1_pulls(self, n_configs):
		return self.alpha * n_configs

	def phase2_pulls(self, n_workloads):
		return math.ceil(exact_fraction(self.beta) * n_workloads)

	def total_cost(self, n_workloads, n_configs):
		return self.phase1_pulls(n_configs) + self.phase2_pulls(n_workloads)

	def to_dict(self):
		return {"alpha": self.alpha, "beta": self.beta}


@dataclass
class MickyOutcome:
	exemplar: str
	pull_log: PullLog
	arm_stats: List[ArmStats]
	config_ids: List[str]
	budget: Budget = field(default_factory=Budget)

	@property
	def cost(self):
		return self.pull_log.cost

	def to_dict(self):
		return {
			"exemplar": self.exemplar,
			"cost": self.cost,
			"pull_log": self.pull_log.to_list(),
			"arm_stats": [
				{"config": c, "pulls": a.pulls, "mean_reward": a.mean}
				for c, a in zip(self.config_ids, self.arm_stats)
			],
		}

	def to_json(self, **kwargs):
		kwargs.setdefault("indent", 2)
		return json.dumps(self.to_dict(), **kwargs)


def reward(observed, best_observed_for_w):
	if not (observed > 0 and best_observed_for_w > 0):
		raise ValueError(
			"reward needs positive objectives, got observed=%r best=%r" % (observed, best_observed_for_w)
		)
	return min(best_observed_for_w, observed) / observed


def exemplar_index(arm_stats):
	best = None
	best_mean = None
	for i, a in enumerate(arm_stats):
		if a.pulls == 0:
			continue
		if best is None or a.mean > best_mean:
			best, best_mean = i, a.mean
	if best is None:
		raise ValueError("no arm has been pulled; there is no exemplar")
	return best


def exemplar_of(arm_stats, config_ids=None):
	i = exemplar_index(arm_stats)
	return i if config_ids is None else config_ids[i]


class _WorkloadCycle(object):
	"""Seeded permutations of workload indices, consumed in order and reshuffled when exhausted."""

	def __init__(self, n, rng):
		self.n = n
		self.rng = rng
		self.order = rng.permutation(n)
		self.pos = 0

	def next(self):
		if self.pos >= self.n:
			self.order = self.rng.permutation(self.n)
			self.pos = 0
		w = int(self.order[self.pos])
		self.pos += 1
		return w

	def new_round(self):
		self.order = self.rng.permutation(self.n)
		self.pos = 0


def run_micky(matrix, policy=None, budget=None, reward_mode=RewardMode.ONLINE, rng=None):
	if policy is None:
		policy = PolicySpec.ucb1()
	if budget is None:
		budget = Budget()
	reward_mode = RewardMode.parse(reward_mode)
	rng = np.random.default_rng(rng)

	n_w, n_s = matrix.n_workloads, matrix.n_configs
	if n_s < 2:
		raise ValueError("collective optimization needs at least two configs")
	total = budget.total_cost(n_w, n_s)
	if total < 1:
		raise EmptyBudgetError("empty budget: alpha=%d beta=%r gives no pulls" % (budget.alpha, budget.beta))

	table = matrix.objective_table
	config_ids = list(matrix.config_ids)
	arms = new_arms(n_s)
	best_seen = np.full(n_w, np.inf)
	log = PullLog()

	def pull(wi, si):
		nonlocal arms
		value = float(table[wi, si])
		if reward_mode is RewardMode.ORACLE:
			normalizer = float(table[wi].min())
		else:
			best_seen[wi] = min(best_seen[wi], value)
			normalizer = float(best_seen[wi])
		r = reward(value, normalizer)
		arms = update(arms, si, r)
		log.record(matrix.workloads[wi], config_ids[si], value, r)

	# Phase 1: pure exploration, one fresh workload permutation per round
	cycle = _WorkloadCycle(n_w, rng)
	for round_no in range(budget.alpha):
		if round_no:
			cycle.new_round()
		for si in range(n_s):
			pull(cycle.next(), si)

	# Phase 2: the policy picks the arm, workloads come from their own permutation
	cycle = _WorkloadCycle(n_w, rng)
	for _ in range(budget.phase2_pulls(n_w)):
		wi = cycle.next()
		pull(wi, select(policy, arms, rng))

	exemplar = exemplar_of(arms, config_ids)
	LOGGER.info(
		"Micky %s %s budget=(%d, %g) cost=%d exemplar=%s",
		policy.label, reward_mode.value, budget.alpha, budget.beta, log.cost, exemplar,
	)
	return MickyOutcome(exemplar, log, arms, config_ids, budget)
