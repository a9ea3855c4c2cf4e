from Micky.PerfMatrix import *
from Micky.Enum import ObjectiveKind

from unittest import TestCase
from hypothesis import given, settings, strategies as st

import os
import tempfile
import logging

from tests.helpers import CONFIGS_CSV, MEASUREMENTS_CSV, make_matrix

LOGGER = logging.getLogger(__name__)


class TestLoadMatrix(TestCase):
	def test_minimal_complete_table(self):
		pm = load_matrix(CONFIGS_CSV, MEASUREMENTS_CSV)
		self.assertEqual(pm.n_workloads, 2)
		self.assertEqual(pm.n_configs, 2)
		self.assertEqual(pm.workloads, ("w0", "w1"))
		self.assertEqual(pm.config_ids, ("c4.large", "r4.large"))

	def test_missing_cell(self):
		short = MEASUREMENTS_CSV.rstrip("\n").rsplit("\n", 1)[0] + "\n"
		with self.assertRaises(IncompleteMatrixError) as ctx:
			load_matrix(CONFIGS_CSV, short)
		self.assertEqual((ctx.exception.workload, ctx.exception.config), ("w1", "r4.large"))
		self.assertIn("incomplete matrix", str(ctx.exception))

	def test_duplicate_cell(self):
		with self.assertRaises(DuplicateMeasurementError):
			load_matrix(CONFIGS_CSV, MEASUREMENTS_CSV + "w1,r4.large,101\n")

	def test_non_positive_value(self):
		bad = MEASUREMENTS_CSV.replace("w1,c4.large,120", "w1,c4.large,0")
		with self.assertRaises(MatrixValidationError):
			load_matrix(CONFIGS_CSV, bad)

	def test_unknown_config_in_measurements(self):
		with self.assertRaises(MatrixValidationError):
			load_matrix(CONFIGS_CSV, MEASUREMENTS_CSV + "w1,m4.large,100\n")

	def test_bad_family(self):
		with self.assertRaises(MatrixValidationError):
			load_matrix(CONFIGS_CSV.replace("memory-optimized", "gpu"), MEASUREMENTS_CSV)

	def test_family_letters(self):
		pm = load_matrix(CONFIGS_CSV.replace("memory-optimized", "r"), MEASUREMENTS_CSV)
		self.assertEqual(pm.config("r4.large").family, "memory-optimized")

	def test_errors_are_value_errors(self):
		self.assertTrue(issubclass(IncompleteMatrixError, ValueError))
		self.assertTrue(issubclass(UnknownIdError, KeyError))

	def test_directory_round_trip(self):
		pm = load_matrix(CONFIGS_CSV, MEASUREMENTS_CSV, ObjectiveKind.EXECUTION_TIME)
		with tempfile.TemporaryDirectory() as tmp:
			pm.write_tables(tmp)
			self.assertTrue(os.path.exists(os.path.join(tmp, "configs.csv")))
			back = load_matrix_dir(tmp, "time")
		self.assertEqual(back.workloads, pm.workloads)
		self.assertEqual(back.configs, pm.configs)
		self.assertTrue((back.elapsed_seconds == pm.elapsed_seconds).all())


class TestObjective(TestCase):
	def setUp(self):
		self.pm = load_matrix(CONFIGS_CSV, MEASUREMENTS_CSV)

	def test_cost_conversion(self):
		self.assertAlmostEqual(objective(self.pm, "w0", "r4.large"), 1.00, places=12)
		self.assertAlmostEqual(objective(self.pm, "w0", "c4.large"), 0.20, places=12)

	def test_execution_time_is_identity(self):
		pm = self.pm.with_objective("time")
		self.assertEqual(objective(pm, "w1", "c4.large"), 120.0)

	def test_unknown_ids(self):
		with self.assertRaises(KeyError):
			objective(self.pm, "nope", "c4.large")
		with self.assertRaises(UnknownIdError):
			objective(self.pm, "w0", "nope")

	def test_objectives_disagree(self):
		# c4 is slower on w0 but cheaper
		self.assertEqual(best_config(self.pm, "w0"), "c4.large")
		self.assertEqual(best_config(self.pm.with_objective("time"), "w0"), "r4.large")


class TestNormalized(TestCase):
	def test_row_normalization(self):
		pm = make_matrix([[100.0, 120.0, 150.0]])
		self.assertEqual([normalized_performance(pm, "w0", s) for s in pm.config_ids], [1.0, 1.2, 1.5])

	def test_best_config_ties(self):
		self.assertEqual(best_config(make_matrix([[5.0, 3.0, 4.0]]), "w0"), "s1")
		self.assertEqual(best_config(make_matrix([[3.0, 3.0, 4.0]]), "w0"), "s0")

	def test_fraction_within(self):
		pm = make_matrix([[1.0, 2.0], [1.25, 1.0], [1.4, 1.0]])
		self.assertAlmostEqual(fraction_within(pm, "s0", 1.3), 2.0 / 3.0)
		self.assertAlmostEqual(fraction_within(pm, "s0", 1.0), 1.0 / 3.0)
		with self.assertRaises(ValueError):
			fraction_within(pm, "s0", 0.9)

	@settings(max_examples=50, deadline=None)
	@given(st.lists(st.lists(st.floats(0.1, 1e4), min_size=3, max_size=3), min_size=1, max_size=6))
	def test_normalized_at_least_one(self, rows):
		pm = make_matrix(rows)
		table = pm.normalized_table
		self.assertTrue((table >= 1.0).all())
		for w in pm.workloads:
			self.assertEqual(normalized_performance(pm, w, best_config(pm, w)), 1.0)

	@settings(max_examples=30, deadline=None)
	@given(st.lists(st.lists(st.floats(0.1, 1e4), min_size=2, max_size=2), min_size=1, max_size=8), st.floats(1.0, 3.0))
	def test_fraction_monotone_in_threshold(self, rows, threshold):
		pm = make_matrix(rows)
		self.assertLessEqual(fraction_within(pm, "s1", threshold), fraction_within(pm, "s1", threshold + 0.1))


class TestSubsetAndGroups(TestCase):
	def test_subset_keeps_order(self):
		pm = make_matrix([[1.0, 2.0], [3.0, 1.0], [2.0, 2.5]])
		sub = subset(pm, ["w2", "w0"])
		self.assertEqual(sub.workloads, ("w2", "w0"))
		self.assertEqual(sub.objective("w2", "s1"), 2.5)
		with self.assertRaises(MatrixValidationError):
			subset(pm, [])

	def test_groups_by_prefix(self):
		names = ["hadoop2.7/terasort", "spark2.1/lr", "hadoop2.7/wordcount", "misc"]
		pm = make_matrix([[1.0, 2.0]] * 4, workloads=names)
		self.assertEqual(workload_groups(pm), {
			"hadoop2.7": ["hadoop2.7/terasort", "hadoop2.7/wordcount"],
			"spark2.1": ["spark2.1/lr"],
			"all": ["misc"],
		})


class TestPullLog(TestCase):
	def test_cost_and_pool(self):
		log = PullLog()
		log.record("w0", "s1", 3.0)
		log.record("w0", "s0", 2.0)
		log.record("w1", "s0", 5.0)
		self.assertEqual(log.cost, 3)
		self.assertEqual(log.evaluated("w0"), ["s1", "s0"])
		self.assertEqual(log.best("w0"), "s0")
		self.assertEqual(PullLog.from_list(log.to_list()), log)
