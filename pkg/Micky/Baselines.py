"""
Per-workload optimizers: CherryPick-style Bayesian optimization, Random-k and brute force.

Each returns a RunOutcome for a single workload; its cost is |E_w|, the number
of distinct configs measured for that workload.
"""
import json
import logging
from dataclasses import dataclass

import numpy as np

from .Constants import *
from .Enum import FAMILY_ORDER, Family, Method
from .GaussianProcess import expected_improvement, fit_best, predict_many
from .PerfMatrix import PullLog

LOGGER = logging.getLogger(__name__)


class EncodingError(ValueError):
	pass


def encode_configs(config_set):
	"""Feature matrix for a config set: family one-hot, vcpus, memory per core, EBS bandwidth."""
	config_set = list(config_set)
	if len(config_set) < 2:
		raise ValueError("encoding needs at least two configs, got %d" % len(config_set))
	onehot = np.zeros((len(config_set), len(FAMILY_ORDER)))
	for i, c in enumerate(config_set):
		try:
			family = Family(c.family) if not isinstance(c.family, Family) else c.family
		except ValueError:
			raise EncodingError("config %s: unknown family %r" % (c.id, c.family)) from None
		onehot[i, FAMILY_ORDER.index(family)] = 1.0

	numeric = np.array([[c.vcpus, c.mem_per_core_gb, c.ebs_mbps] for c in config_set], dtype=float)
	lo = numeric.min(axis=0)
	span = numeric.max(axis=0) - lo
	# degenerate ranges encode as 0
	scaled = np.where(span > 0, (numeric - lo) / np.where(span > 0, span, 1.0), 0.0)
	return np.hstack([onehot, scaled])


def encode_config(config, config_set):
	config_set = list(config_set)
	ids = [c.id for c in config_set]
	if config.id not in ids:
		raise ValueError("config %s is not in the config set" % config.id)
	return encode_configs(config_set)[ids.index(config.id)]


@dataclass
class RunOutcome:
	method: str
	workload: str
	chosen: str
	pull_log: PullLog

	@property
	def cost(self):
		return self.pull_log.cost

	def to_dict(self):
		return {
			"method": self.method,
			"workload": self.workload,
			"exemplar": self.chosen,
			"cost": self.cost,
			"pull_log": self.pull_log.to_list(),
			"arm_stats": [],
		}

	def to_json(self, **kwargs):
		kwargs.setdefault("indent", 2)
		return json.dumps(self.to_dict(), **kwargs)


def _outcome(method, matrix, w, evaluated, row, log):
	chosen = min(evaluated, key=lambda i: (row[i], i))
	return RunOutcome(method, w, matrix.configs[chosen].id, log)


def run_cherrypick(matrix, w, n_init=DEFAULT_N_INIT, ei_stop=DEFAULT_EI_STOP, rng=None, features=None, xi=DEFAULT_XI):
	rng = np.random.default_rng(rng)
	n_s = matrix.n_configs
	if not 1 <= n_init <= n_s:
		raise ValueError("n_init must be in [1, %d], got %r" % (n_s, n_init))
	if features is None:
		features = encode_configs(matrix.configs)
	row = matrix.objective_row(w)
	log = PullLog()
	evaluated = []

	def measure(si):
		evaluated.append(si)
		log.record(w, matrix.configs[si].id, float(row[si]))

	for si in rng.permutation(n_s)[:n_init]:
		measure(int(si))

	while len(evaluated) < n_s:
		model = fit_best(features[evaluated], row[evaluated])
		taken = set(evaluated)
		pending = [i for i in range(n_s) if i not in taken]
		mean, std = predict_many(model, features[pending])
		best = float(row[evaluated].min())
		ei = expected_improvement(mean, std, best, xi)
		top = int(np.argmax(ei))
		if ei[top] < ei_stop * abs(best):
			LOGGER.debug("CherryPick %s: max EI %.3g below %.3g after %d pulls", w, ei[top], ei_stop * abs(best), len(evaluated))
			break
		measure(pending[top])

	return _outcome(Method.CHERRYPICK.value, matrix, w, evaluated, row, log)


def run_random_k(matrix, w, k, rng=None):
	rng = np.random.default_rng(rng)
	n_s = matrix.n_configs
	if int(k) != k or not 1 <= k <= n_s:
		raise ValueError("k must be in [1, %d], got %r" % (n_s, k))
	row = matrix.objective_row(w)
	log = PullLog()
	# a permutation prefix, so Random-4 measures a subset of Random-8 for the same seed
	evaluated = [int(si) for si in rng.permutation(n_s)[:int(k)]]
	for si in evaluated:
		log.record(w, matrix.configs[si].id, float(row[si]))
	method = {RANDOM4_K: Method.RANDOM4.value, RANDOM8_K: Method.RANDOM8.value}.get(int(k), "random%d" % k)
	return _outcome(method, matrix, w, evaluated, row, log)


def run_brute(matrix, w):
	row = matrix.objective_row(w)
	log = PullLog()
	evaluated = list(range(matrix.n_configs))
	for si in evaluated:
		log.record(w, matrix.configs[si].id, float(row[si]))
	return _outcome(Method.BRUTE.value, matrix, w, evaluated, row, log)
