"""
Synthetic performance matrices with a planted exemplar config.

For a fraction p of workloads the planted config is within (1 + near_band) of
the optimum; for the rest it pays an exponential penalty. Every other cell is
optimum x (1 + Exp(1)). The structure is planted in the space of the chosen
objective, and prices are jittered so the other objective disagrees.
"""
import json
import logging
import math
import os
from dataclasses import asdict, dataclass

import numpy as np

from .Constants import *
from .Enum import Family, ObjectiveKind
from .PerfMatrix import CloudConfig, PerfMatrix

LOGGER = logging.getLogger(__name__)

# letter, family, GiB per vCPU, USD per vCPU-hour
FAMILIES = (
	("c", Family.COMPUTE, 2.0, 0.0425),
	("r", Family.MEMORY, 7.625, 0.0665),
	("m", Family.GENERAL, 4.0, 0.05),
)
SIZE_TIERS = (("large", 2), ("xlarge", 4), ("2xlarge", 8))
BASE_EBS_MBPS = 500.0


@dataclass(frozen=True)
class SynthSpec:
	n_workloads: int = 40
	n_configs: int = 10
	exemplar_fraction: float = 0.8
	near_band: float = 0.1
	penalty_scale: float = 2.0
	base_time_range: tuple = (60.0, 3600.0)
	seed: int = DEFAULT_SEED
	objective_kind: str = ObjectiveKind.OPERATIONAL_COST.value

	def __post_init__(self):
		object.__setattr__(self, "base_time_range", tuple(float(x) for x in self.base_time_range))
		object.__setattr__(self, "objective_kind", ObjectiveKind.parse(self.objective_kind).value)
		if int(self.n_workloads) != self.n_workloads or self.n_workloads < 1:
			raise ValueError("n_workloads must be a positive integer, got %r" % (self.n_workloads,))
		if int(self.n_configs) != self.n_configs or self.n_configs < 2:
			raise ValueError("n_configs must be an integer >= 2, got %r" % (self.n_configs,))
		if not 0 < self.exemplar_fraction <= 1:
			raise ValueError("exemplar_fraction must be in (0, 1], got %r" % (self.exemplar_fraction,))
		if not (self.near_band >= 0 and math.isfinite(self.near_band)):
			raise ValueError("near_band must be >= 0, got %r" % (self.near_band,))
		if not (self.penalty_scale > 0 and math.isfinite(self.penalty_scale)):
			raise ValueError("penalty_scale must be positive, got %r" % (self.penalty_scale,))
		lo, hi = self.base_time_range if len(self.base_time_range) == 2 else (None, None)
		if lo is None or not 0 < lo < hi:
			raise ValueError("base_time_range must be (min, max) with 0 < min < max, got %r" % (self.base_time_range,))
		if not -2 ** 63 <= int(self.seed) < 2 ** 64:
			raise ValueError("seed must fit in 64 bits, got %r" % (self.seed,))

	def to_dict(self):
		out = asdict(self)
		out["base_time_range"] = list(self.base_time_range)
		return out

	@classmethod
	def from_dict(cls, data):
		known = set(cls.__dataclass_fields__)
		unknown = sorted(set(data) - known)
		if unknown:
			raise ValueError("unknown synth spec keys: %s" % ", ".join(unknown))
		return cls(**data)


def make_configs(n_configs, rng):
	"""c/r/m families x large..2xlarge, one instance generation per nine configs."""
	configs = []
	for i in range(n_configs):
		letter, family, gb_per_vcpu, usd_per_vcpu = FAMILIES[i % len(FAMILIES)]
		k = i // len(FAMILIES)
		size, vcpus = SIZE_TIERS[k % len(SIZE_TIERS)]
		generation = 4 + k // len(SIZE_TIERS)
		price = round(usd_per_vcpu * vcpus * rng.uniform(0.6, 1.6), 4)
		configs.append(CloudConfig(
			"%s%d.%s" % (letter, generation, size),
			family.value,
			size,
			vcpus,
			gb_per_vcpu * vcpus,
			price,
			BASE_EBS_MBPS * vcpus / 2,
		))
	return configs


def gen_matrix(spec):
	rng = np.random.default_rng(int(spec.seed) % 2 ** 64)
	n_w, n_s = int(spec.n_workloads), int(spec.n_configs)
	configs = make_configs(n_s, rng)
	planted = int(rng.integers(n_s))
	others = [i for i in range(n_s) if i != planted]
	delta = float(spec.near_band)
	# chance that the planted config is itself the optimum of a near workload
	p_self = 1.0 / (1.0 + delta * (n_s - 1))

	base = rng.uniform(spec.base_time_range[0], spec.base_time_range[1], size=n_w)
	factors = 1.0 + rng.exponential(1.0, size=(n_w, n_s))
	for wi in range(n_w):
		if rng.random() < spec.exemplar_fraction:
			if rng.random() < p_self:
				factors[wi, planted] = 1.0
				continue
			factors[wi, planted] = 1.0 + rng.uniform(0.0, delta)
		else:
			factors[wi, planted] = 1.0 + spec.penalty_scale * rng.exponential(1.0)
		factors[wi, others[int(rng.integers(len(others)))]] = 1.0

	objective_kind = ObjectiveKind.parse(spec.objective_kind)
	values = base[:, None] * factors
	if objective_kind is ObjectiveKind.OPERATIONAL_COST:
		# plant in cost space: elapsed = cost / price
		prices = np.array([c.price_per_hour for c in configs])
		elapsed = values * float(np.median(prices)) / prices[None, :]
	else:
		elapsed = values

	width = len(str(n_w - 1))
	workloads = ["w%0*d" % (width, i) for i in range(n_w)]
	matrix = PerfMatrix(workloads, configs, elapsed, objective_kind)
	LOGGER.info("Generated %r with planted exemplar %s", matrix, configs[planted].id)
	return matrix, configs[planted].id


def write_synth(out_dir, matrix, planted, spec):
	configs_path, measurements_path = matrix.write_tables(out_dir)
	sidecar_path = os.path.join(out_dir, SIDECAR_FILE)
	with open(sidecar_path, "w", encoding="utf-8") as f:
		json.dump({"planted_exemplar": planted, "spec": spec.to_dict()}, f, indent=2, sort_keys=True)
		f.write("\n")
	return configs_path, measurements_path, sidecar_path


def read_sidecar(data_dir):
	with open(os.path.join(data_dir, SIDECAR_FILE), encoding="utf-8") as f:
		return json.load(f)
