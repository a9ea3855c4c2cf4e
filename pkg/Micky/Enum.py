from enum import Enum

import logging

LOGGER = logging.getLogger(__name__)

# ----------------------------------------------------------------------------
#        Enum definitions
# ----------------------------------------------------------------------------


class LabelEnum(str, Enum):
	"""A str-valued Enum superclass that parses its labels and aliases."""

	@classmethod
	def parse(cls, obj):
		if isinstance(obj, cls):
			return obj
		key = str(obj).strip().lower()
		for member in cls:
			if key == member.value or key == member.name.lower():
				return member
		aliases = getattr(cls, "_aliases", None)
		if aliases is not None and key in aliases():
			return cls(aliases()[key])
		raise ValueError("%r is not a valid %s" % (obj, cls.__name__))

	def __str__(self):
		return self.value


# Instance families, in one-hot encoding order
class Family(LabelEnum):
	COMPUTE = "compute-optimized"
	MEMORY = "memory-optimized"
	GENERAL = "general-purpose"

	@staticmethod
	def _aliases():
		# EC2 family letters (c4, r4, m4, ...)
		return {
			"c": "compute-optimized",
			"compute": "compute-optimized",
			"r": "memory-optimized",
			"memory": "memory-optimized",
			"m": "general-purpose",
			"general": "general-purpose",
		}


class ObjectiveKind(LabelEnum):
	EXECUTION_TIME = "execution-time"
	OPERATIONAL_COST = "operational-cost"

	@staticmethod
	def _aliases():
		return {"time": "execution-time", "cost": "operational-cost"}


class PolicyKind(LabelEnum):
	EPSILON_GREEDY = "epsilon-greedy"
	SOFTMAX = "softmax"
	UCB1 = "ucb1"

	@staticmethod
	def _aliases():
		return {"epsilon": "epsilon-greedy", "egreedy": "epsilon-greedy", "ucb": "ucb1"}


class RewardMode(LabelEnum):
	ONLINE = "online"
	ORACLE = "oracle"


# Optimizer roster
class Method(LabelEnum):
	MICKY = "micky"
	CHERRYPICK = "cherrypick"
	RANDOM4 = "random4"
	RANDOM8 = "random8"
	RANDOMK = "randomk"
	BRUTE = "brute"

	@property
	def collective(self):
		return self is Method.MICKY


FAMILY_ORDER = (Family.COMPUTE, Family.MEMORY, Family.GENERAL)
