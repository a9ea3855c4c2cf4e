"""
Workload x configuration performance data.

A PerfMatrix is the simulation oracle every optimizer pulls from: a complete
table of elapsed seconds for each (workload, cloud configuration) pair, viewed
either as execution time or as operational cost (elapsed x hourly price).
"""
import io
import logging
import os
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .Constants import *
from .Enum import Family, ObjectiveKind

LOGGER = logging.getLogger(__name__)


class MatrixError(ValueError):
	pass


class MatrixValidationError(MatrixError):
	pass


class IncompleteMatrixError(MatrixError):
	def __init__(self, workload, config):
		self.workload = workload
		self.config = config
		super().__init__("incomplete matrix: no measurement for (%s, %s)" % (workload, config))


class DuplicateMeasurementError(MatrixError):
	def __init__(self, workload, config):
		self.workload = workload
		self.config = config
		super().__init__("duplicate measurement for (%s, %s)" % (workload, config))


class UnknownIdError(KeyError):
	pass


@dataclass(frozen=True)
class CloudConfig:
	"""A VM type: one arm of the bandit."""
	id: str
	family: str
	size_tier: str
	vcpus: int
	mem_gb: float
	price_per_hour: float
	ebs_mbps: float = 0.0

	def __post_init__(self):
		if isinstance(self.family, Family):
			object.__setattr__(self, "family", self.family.value)
		if not self.id:
			raise MatrixValidationError("config id must be non-empty")
		if int(self.vcpus) != self.vcpus or self.vcpus < 1:
			raise MatrixValidationError("config %s: vcpus must be an integer >= 1, got %r" % (self.id, self.vcpus))
		if not self.mem_gb > 0:
			raise MatrixValidationError("config %s: mem_gb must be > 0, got %r" % (self.id, self.mem_gb))
		if not self.price_per_hour > 0:
			raise MatrixValidationError("config %s: price_per_hour must be > 0, got %r" % (self.id, self.price_per_hour))
		if not self.ebs_mbps >= 0:
			raise MatrixValidationError("config %s: ebs_mbps must be >= 0, got %r" % (self.id, self.ebs_mbps))

	@property
	def mem_per_core_gb(self):
		return self.mem_gb / self.vcpus

	def to_row(self):
		return {
			"config_id": self.id,
			"family": self.family,
			"size_tier": self.size_tier,
			"vcpus": int(self.vcpus),
			"mem_gb": float(self.mem_gb),
			"price_per_hour_usd": float(self.price_per_hour),
			"ebs_mbps": float(self.ebs_mbps),
		}


class PerfMatrix(object):
	"""Complete |W| x |S| table of elapsed seconds. Immutable once built."""

	def __init__(self, workloads, configs, elapsed_seconds, objective_kind=ObjectiveKind.OPERATIONAL_COST):
		self.workloads = tuple(str(w) for w in workloads)
		self.configs = tuple(configs)
		self.objective_kind = ObjectiveKind.parse(objective_kind)

		if len(self.workloads) < 1:
			raise MatrixValidationError("a performance matrix needs at least one workload")
		if len(self.configs) < 2:
			raise MatrixValidationError("a performance matrix needs at least two configs, got %d" % len(self.configs))
		if len(set(self.workloads)) != len(self.workloads):
			raise MatrixValidationError("workload ids must be unique")
		config_ids = [c.id for c in self.configs]
		if len(set(config_ids)) != len(config_ids):
			raise MatrixValidationError("config ids must be unique")

		elapsed = np.array(elapsed_seconds, dtype=float)
		if elapsed.shape != (len(self.workloads), len(self.configs)):
			raise MatrixValidationError(
				"elapsed table has shape %s, expected %s" % (elapsed.shape, (len(self.workloads), len(self.configs)))
			)
		bad = np.argwhere(~(np.isfinite(elapsed) & (elapsed > 0)))
		if len(bad):
			wi, si = bad[0]
			raise MatrixValidationError(
				"elapsed_seconds must be finite and > 0, got %r for (%s, %s)"
				% (elapsed[wi, si], self.workloads[wi], config_ids[si])
			)
		elapsed.setflags(write=False)
		self.elapsed_seconds = elapsed

		self._w_index = {w: i for i, w in enumerate(self.workloads)}
		self._s_index = {c: i for i, c in enumerate(config_ids)}
		self.prices = np.array([c.price_per_hour for c in self.configs], dtype=float)
		self.prices.setflags(write=False)

		if self.objective_kind is ObjectiveKind.OPERATIONAL_COST:
			table = elapsed * self.prices / SECONDS_PER_HOUR
		else:
			table = elapsed.copy()
		table.setflags(write=False)
		self._objective = table
		self._optimum = table.min(axis=1)
		self._optimum.setflags(write=False)
		normalized = table / self._optimum[:, None]
		normalized.setflags(write=False)
		self._normalized = normalized

	def __repr__(self):
		return "PerfMatrix(|W|=%d, |S|=%d, objective=%s)" % (self.n_workloads, self.n_configs, self.objective_kind.value)

	@property
	def n_workloads(self):
		return len(self.workloads)

	@property
	def n_configs(self):
		return len(self.configs)

	@property
	def config_ids(self):
		return tuple(c.id for c in self.configs)

	@property
	def objective_table(self):
		return self._objective

	@property
	def normalized_table(self):
		return self._normalized

	def workload_index(self, w):
		try:
			return self._w_index[w]
		except KeyError:
			raise UnknownIdError("unknown workload %r" % (w,)) from None

	def config_index(self, s):
		try:
			return self._s_index[s]
		except KeyError:
			raise UnknownIdError("unknown config %r" % (s,)) from None

	def config(self, s):
		return self.configs[self.config_index(s)]

	def objective(self, w, s):
		return float(self._objective[self.workload_index(w), self.config_index(s)])

	def objective_row(self, w):
		return self._objective[self.workload_index(w)]

	def optimum(self, w):
		return float(self._optimum[self.workload_index(w)])

	def normalized_performance(self, w, s):
		return float(self._normalized[self.workload_index(w), self.config_index(s)])

	def best_config(self, w):
		# np.argmin returns the first minimum: ties go to the lowest config index
		return self.configs[int(np.argmin(self.objective_row(w)))].id

	def fraction_within(self, s, threshold):
		if not threshold >= 1.0:
			raise ValueError("threshold must be >= 1, got %r" % (threshold,))
		column = self._normalized[:, self.config_index(s)]
		return float(np.count_nonzero(column <= threshold)) / self.n_workloads

	def subset(self, workloads):
		workloads = list(workloads)
		if not workloads:
			raise MatrixValidationError("cannot take an empty workload subset")
		rows = [self.workload_index(w) for w in workloads]
		return PerfMatrix(workloads, self.configs, self.elapsed_seconds[rows], self.objective_kind)

	def with_objective(self, objective_kind):
		objective_kind = ObjectiveKind.parse(objective_kind)
		if objective_kind is self.objective_kind:
			return self
		return PerfMatrix(self.workloads, self.configs, self.elapsed_seconds, objective_kind)

	def to_frames(self):
		configs = pd.DataFrame([c.to_row() for c in self.configs], columns=list(CONFIG_COLUMNS))
		measurements = pd.DataFrame(
			[
				(w, c.id, float(self.elapsed_seconds[wi, si]))
				for wi, w in enumerate(self.workloads)
				for si, c in enumerate(self.configs)
			],
			columns=list(MEASUREMENT_COLUMNS),
		)
		return configs, measurements

	def write_tables(self, out_dir):
		os.makedirs(out_dir, exist_ok=True)
		configs, measurements = self.to_frames()
		configs_path = os.path.join(out_dir, CONFIGS_FILE)
		measurements_path = os.path.join(out_dir, MEASUREMENTS_FILE)
		configs.to_csv(configs_path, index=False, lineterminator="\n")
		measurements.to_csv(measurements_path, index=False, lineterminator="\n")
		LOGGER.debug("Wrote %s and %s", configs_path, measurements_path)
		return configs_path, measurements_path


class Pull(object):
	__slots__ = ("workload", "config", "value", "reward")

	def __init__(self, workload, config, value, reward=None):
		self.workload = workload
		self.config = config
		self.value = float(value)
		self.reward = None if reward is None else float(reward)

	def __eq__(self, other):
		return isinstance(other, Pull) and self.to_dict() == other.to_dict()

	def __repr__(self):
		return "Pull(%s, %s, %r, %r)" % (self.workload, self.config, self.value, self.reward)

	def to_dict(self):
		return {"workload": self.workload, "config": self.config, "value": self.value, "reward": self.reward}


class PullLog(object):
	"""Ordered measurements of one optimizer run. Its cost is its length."""

	def __init__(self, entries=()):
		self.entries = list(entries)

	def __len__(self):
		return len(self.entries)

	def __iter__(self):
		return iter(self.entries)

	def __eq__(self, other):
		return isinstance(other, PullLog) and self.entries == other.entries

	@property
	def cost(self):
		return len(self.entries)

	def record(self, workload, config, value, reward=None):
		pull = Pull(workload, config, value, reward)
		self.entries.append(pull)
		return pull

	def evaluated(self, workload):
		"""The evaluated pool E_w, in first-measured order."""
		seen = []
		for pull in self.entries:
			if pull.workload == workload and pull.config not in seen:
				seen.append(pull.config)
		return seen

	def evaluated_union(self):
		return {(pull.workload, pull.config) for pull in self.entries}

	def best(self, workload=None, config_order=None):
		"""Config with the lowest observed value; ties by config_order, then first measured."""
		candidates = [p for p in self.entries if workload is None or p.workload == workload]
		if not candidates:
			return None
		rank = {} if config_order is None else {c: i for i, c in enumerate(config_order)}
		best = min(candidates, key=lambda p: (p.value, rank.get(p.config, len(rank))))
		return best.config

	def to_list(self):
		return [pull.to_dict() for pull in self.entries]

	@classmethod
	def from_list(cls, rows):
		return cls(Pull(r["workload"], r["config"], r["value"], r.get("reward")) for r in rows)


def _read_table(source, columns, name):
	if isinstance(source, pd.DataFrame):
		frame = source.astype(str)
	else:
		if isinstance(source, str) and "\n" in source:
			source = io.StringIO(source)
		try:
			frame = pd.read_csv(source, dtype=str, skipinitialspace=True, keep_default_na=False)
		except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as err:
			LOGGER.error("Could not parse %s table: %s", name, err)
			raise MatrixValidationError("%s table: %s" % (name, err)) from err
	frame.columns = [str(c).strip() for c in frame.columns]
	missing = [c for c in columns if c not in frame.columns]
	if missing:
		raise MatrixValidationError("%s table is missing columns: %s" % (name, ", ".join(missing)))
	frame = frame[list(columns)].copy()
	for column in columns:
		frame[column] = frame[column].str.strip()
	return frame


def _numeric(frame, column, name, default=None):
	parsed = []
	for row, value in enumerate(frame[column]):
		if value == "" and default is not None:
			value = default
		try:
			parsed.append(float(value))
		except (TypeError, ValueError):
			raise MatrixValidationError("%s table row %d: %s=%r is not a number" % (name, row + 2, column, value)) from None
	return np.array(parsed, dtype=float)


def _parse_configs(frame):
	vcpus = _numeric(frame, "vcpus", "configs")
	mem = _numeric(frame, "mem_gb", "configs")
	price = _numeric(frame, "price_per_hour_usd", "configs")
	ebs = _numeric(frame, "ebs_mbps", "configs", default=0)
	configs = []
	seen = set()
	for i, row in enumerate(frame.itertuples(index=False)):
		if row.config_id in seen:
			raise MatrixValidationError("configs table: duplicate config id %r" % (row.config_id,))
		seen.add(row.config_id)
		try:
			family = Family.parse(row.family)
		except ValueError as err:
			raise MatrixValidationError("config %s: %s" % (row.config_id, err)) from err
		if not np.isfinite(vcpus[i]) or vcpus[i] != int(vcpus[i]):
			raise MatrixValidationError("config %s: vcpus must be an integer, got %r" % (row.config_id, vcpus[i]))
		configs.append(CloudConfig(row.config_id, family.value, row.size_tier, int(vcpus[i]), mem[i], price[i], ebs[i]))
	return configs


def load_matrix(configs_table, measurements_table, objective_kind=ObjectiveKind.OPERATIONAL_COST):
	"""
	Build a PerfMatrix from the configs and measurements tables.

	Each table may be a path, a file object, CSV text or a DataFrame. Every
	(workload, config) pair must be measured exactly once.
	"""
	configs = _parse_configs(_read_table(configs_table, CONFIG_COLUMNS, "configs"))
	frame = _read_table(measurements_table, MEASUREMENT_COLUMNS, "measurements")
	elapsed = _numeric(frame, "elapsed_seconds", "measurements")

	config_index = pd.Index([c.id for c in configs])
	s_idx = config_index.get_indexer(frame["config_id"])
	if (s_idx < 0).any():
		row = int(np.flatnonzero(s_idx < 0)[0])
		raise MatrixValidationError(
			"measurements table row %d: unknown config %r" % (row + 2, frame["config_id"].iloc[row])
		)
	nonpositive = np.flatnonzero(~(elapsed > 0))
	if len(nonpositive):
		row = int(nonpositive[0])
		raise MatrixValidationError(
			"measurements table row %d: elapsed_seconds must be > 0 for (%s, %s), got %r"
			% (row + 2, frame["workload_id"].iloc[row], frame["config_id"].iloc[row], elapsed[row])
		)
	dup = frame.duplicated(subset=["workload_id", "config_id"], keep="first").to_numpy()
	if dup.any():
		row = int(np.flatnonzero(dup)[0])
		raise DuplicateMeasurementError(frame["workload_id"].iloc[row], frame["config_id"].iloc[row])

	workloads = list(pd.unique(frame["workload_id"]))
	if not workloads:
		raise MatrixValidationError("measurements table has no rows")
	w_idx = pd.Index(workloads).get_indexer(frame["workload_id"])
	table = np.full((len(workloads), len(configs)), np.nan)
	table[w_idx, s_idx] = elapsed
	holes = np.argwhere(np.isnan(table))
	if len(holes):
		wi, si = holes[0]
		LOGGER.error("%d cells missing from the measurements table", len(holes))
		raise IncompleteMatrixError(workloads[wi], configs[si].id)

	matrix = PerfMatrix(workloads, configs, table, objective_kind)
	LOGGER.info("Loaded %r", matrix)
	return matrix


def load_matrix_dir(data_dir, objective_kind=ObjectiveKind.OPERATIONAL_COST):
	return load_matrix(
		os.path.join(data_dir, CONFIGS_FILE),
		os.path.join(data_dir, MEASUREMENTS_FILE),
		objective_kind,
	)


def objective(matrix, w, s):
	return matrix.objective(w, s)


def normalized_performance(matrix, w, s):
	return matrix.normalized_performance(w, s)


def best_config(matrix, w):
	return matrix.best_config(w)


def fraction_within(matrix, s, threshold):
	return matrix.fraction_within(s, threshold)


def subset(matrix, workloads):
	return matrix.subset(workloads)


def with_objective(matrix, objective_kind):
	return matrix.with_objective(objective_kind)


def workload_groups(matrix, separator="/"):
	groups = {}
	for w in matrix.workloads:
		group = w.split(separator, 1)[0] if separator in w else "all"
		groups.setdefault(group, []).append(w)
	return groups
