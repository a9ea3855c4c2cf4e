"""
Arm bookkeeping and the three selection policies: epsilon-greedy, softmax and UCB1.

Every policy pulls an unpulled arm first (lowest index), so the formulas only
ever see arms with at least one pull. Ties go to the lowest index.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .Constants import *
from .Enum import PolicyKind

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class ArmStats:
	pulls: int = 0
	reward_sum: float = 0.0

	@property
	def mean(self):
		if self.pulls == 0:
			return None
		return self.reward_sum / self.pulls


@dataclass(frozen=True)
class PolicySpec:
	kind: PolicyKind
	epsilon: Optional[float] = None
	temperature: Optional[float] = None

	def __post_init__(self):
		object.__setattr__(self, "kind", PolicyKind.parse(self.kind))
		if self.kind is PolicyKind.EPSILON_GREEDY:
			if self.epsilon is None or not 0.0 <= self.epsilon <= 1.0:
				raise ValueError("epsilon-greedy needs epsilon in [0, 1], got %r" % (self.epsilon,))
		elif self.epsilon is not None:
			raise ValueError("epsilon only applies to epsilon-greedy, not %s" % self.kind.value)
		if self.kind is PolicyKind.SOFTMAX:
			if self.temperature is None or not self.temperature > 0:
				raise ValueError("softmax needs a positive temperature, got %r" % (self.temperature,))
		elif self.temperature is not None:
			raise ValueError("temperature only applies to softmax, not %s" % self.kind.value)

	@classmethod
	def epsilon_greedy(cls, epsilon=DEFAULT_EPSILON):
		return cls(PolicyKind.EPSILON_GREEDY, epsilon=epsilon)

	@classmethod
	def softmax(cls, temperature=DEFAULT_TEMPERATURE):
		return cls(PolicyKind.SOFTMAX, temperature=temperature)

	@classmethod
	def ucb1(cls):
		return cls(PolicyKind.UCB1)

	@classmethod
	def from_name(cls, kind, epsilon=DEFAULT_EPSILON, temperature=DEFAULT_TEMPERATURE):
		"""Build a spec, keeping only the parameter the kind uses."""
		kind = PolicyKind.parse(kind)
		if kind is PolicyKind.EPSILON_GREEDY:
			return cls.epsilon_greedy(epsilon)
		if kind is PolicyKind.SOFTMAX:
			return cls.softmax(temperature)
		return cls.ucb1()

	@property
	def label(self):
		if self.kind is PolicyKind.EPSILON_GREEDY:
			return "%s(%g)" % (self.kind.value, self.epsilon)
		if self.kind is PolicyKind.SOFTMAX:
			return "%s(%g)" % (self.kind.value, self.temperature)
		return self.kind.value

	def to_dict(self):
		out = {"kind": self.kind.value}
		if self.epsilon is not None:
			out["epsilon"] = self.epsilon
		if self.temperature is not None:
			out["temperature"] = self.temperature
		return out


def new_arms(n):
	return [ArmStats() for _ in range(n)]


def update(arms, arm, reward):
	if not 0.0 <= reward <= 1.0:
		raise ValueError("reward must be in [0, 1], got %r" % (reward,))
	if not 0 <= arm < len(arms):
		raise IndexError("arm index %d out of range for %d arms" % (arm, len(arms)))
	arms = list(arms)
	old = arms[arm]
	arms[arm] = ArmStats(old.pulls + 1, old.reward_sum + reward)
	return arms


def means(arms):
	return np.array([a.reward_sum / a.pulls if a.pulls else np.nan for a in arms], dtype=float)


def first_unpulled(arms):
	for i, a in enumerate(arms):
		if a.pulls == 0:
			return i
	return None


def select_epsilon_greedy(arms, epsilon, rng):
	i = first_unpulled(arms)
	if i is not None:
		return i
	if rng.random() < epsilon:
		return int(rng.integers(len(arms)))
	# argmax keeps the first maximum
	return int(np.argmax(means(arms)))


def softmax_probabilities(arms, temperature):
	prefs = means(arms) / temperature
	prefs = prefs - prefs.max()
	weights = np.exp(prefs)
	return weights / weights.sum()


def select_softmax(arms, temperature, rng):
	i = first_unpulled(arms)
	if i is not None:
		return i
	p = softmax_probabilities(arms, temperature)
	return int(rng.choice(len(arms), p=p))


def ucb1_scores(arms, total_pulls):
	pulls = np.array([a.pulls for a in arms], dtype=float)
	return means(arms) + np.sqrt(2.0 * math.log(total_pulls) / pulls)


def select_ucb1(arms, total_pulls=None):
	i = first_unpulled(arms)
	if i is not None:
		return i
	if total_pulls is None:
		total_pulls = sum(a.pulls for a in arms)
	if total_pulls < 1:
		raise ValueError("total_pulls must be positive, got %r" % (total_pulls,))
	return int(np.argmax(ucb1_scores(arms, total_pulls)))


def select(policy, arms, rng):
	if policy.kind is PolicyKind.EPSILON_GREEDY:
		return select_epsilon_greedy(arms, policy.epsilon, rng)
	if policy.kind is PolicyKind.SOFTMAX:
		return select_softmax(arms, policy.temperature, rng)
	return select_ucb1(arms, sum(a.pulls for a in arms))
