from Micky.Synth import *
from Micky.PerfMatrix import load_matrix_dir

from unittest import TestCase

import os
import math
import filecmp
import tempfile
import logging

import numpy as np

LOGGER = logging.getLogger(__name__)


class TestSynthSpec(TestCase):
	def test_validation(self):
		for bad in (
			dict(n_workloads=0),
			dict(n_configs=1),
			dict(exemplar_fraction=0.0),
			dict(exemplar_fraction=1.5),
			dict(near_band=-0.1),
			dict(penalty_scale=0.0),
			dict(base_time_range=(100.0, 10.0)),
		):
			with self.assertRaises(ValueError):
				SynthSpec(**bad)

	def test_dict_round_trip(self):
		spec = SynthSpec(n_workloads=12, seed=3, objective_kind="time")
		self.assertEqual(SynthSpec.from_dict(spec.to_dict()), spec)
		with self.assertRaises(ValueError):
			SynthSpec.from_dict({"workloads": 3})


class TestGenMatrix(TestCase):
	def test_shape_and_ids(self):
		matrix, planted = gen_matrix(SynthSpec(n_workloads=40, n_configs=10))
		self.assertEqual((matrix.n_workloads, matrix.n_configs), (40, 10))
		self.assertEqual(matrix.workloads[0], "w00")
		self.assertIn(planted, matrix.config_ids)
		self.assertEqual(len(set(matrix.config_ids)), 10)

	def test_perfect_exemplar(self):
		spec = SynthSpec(n_workloads=25, n_configs=8, exemplar_fraction=1.0, near_band=0.0, seed=11)
		matrix, planted = gen_matrix(spec)
		np.testing.assert_allclose(matrix.normalized_table[:, matrix.config_index(planted)], 1.0)

	def test_planted_fraction(self):
		p, delta, n_w = 0.7, 0.1, 40
		shortfalls = 0
		for seed in range(20):
			matrix, planted = gen_matrix(SynthSpec(n_workloads=n_w, exemplar_fraction=p, near_band=delta, seed=seed))
			if matrix.fraction_within(planted, 1 + delta + 1e-9) < p - 2 / math.sqrt(n_w):
				shortfalls += 1
		self.assertLessEqual(shortfalls, 2)

	def test_time_and_cost_diverge(self):
		for seed in range(10):
			matrix, _ = gen_matrix(SynthSpec(n_workloads=40, n_configs=10, seed=seed))
			timed = matrix.with_objective("time")
			differ = sum(matrix.best_config(w) != timed.best_config(w) for w in matrix.workloads)
			LOGGER.info("seed %d: time and cost optima differ on %d/40 workloads", seed, differ)
			self.assertGreaterEqual(differ / 40.0, 0.3)

	def test_planted_beats_random_config(self):
		wins = 0
		for seed in range(40):
			matrix, planted = gen_matrix(SynthSpec(n_workloads=60, n_configs=10, seed=seed))
			table = matrix.normalized_table
			# a uniformly random config scores the mean over all columns in expectation
			wins += table[:, matrix.config_index(planted)].mean() < table.mean()
		self.assertGreaterEqual(wins, 38)

	def test_deterministic(self):
		a, pa = gen_matrix(SynthSpec(seed=99))
		b, pb = gen_matrix(SynthSpec(seed=99))
		c, _ = gen_matrix(SynthSpec(seed=100))
		self.assertEqual(pa, pb)
		self.assertEqual(a.elapsed_seconds.tobytes(), b.elapsed_seconds.tobytes())
		self.assertNotEqual(a.elapsed_seconds.tobytes(), c.elapsed_seconds.tobytes())


class TestWriteSynth(TestCase):
	def test_files_round_trip(self):
		spec = SynthSpec(n_workloads=10, n_configs=5, seed=4)
		matrix, planted = gen_matrix(spec)
		with tempfile.TemporaryDirectory() as one, tempfile.TemporaryDirectory() as two:
			paths = write_synth(one, matrix, planted, spec)
			write_synth(two, *gen_matrix(spec), spec)
			for path in paths:
				self.assertTrue(filecmp.cmp(path, os.path.join(two, os.path.basename(path)), shallow=False))
			back = load_matrix_dir(one, spec.objective_kind)
			sidecar = read_sidecar(one)
		self.assertEqual(sidecar["planted_exemplar"], planted)
		self.assertEqual(SynthSpec.from_dict(sidecar["spec"]), spec)
		self.assertEqual(back.config_ids, matrix.config_ids)
		np.testing.assert_array_equal(back.elapsed_seconds, matrix.elapsed_seconds)
