from Micky.Cli import main
from Micky.PerfMatrix import load_matrix_dir

from unittest import TestCase

import io
import os
import json
import filecmp
import tempfile
import logging
import contextlib

LOGGER = logging.getLogger(__name__)


def run_cli(*argv):
	out, err = io.StringIO(), io.StringIO()
	with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
		try:
			code = main(list(argv))
		except SystemExit as e:
			code = e.code
	return code, out.getvalue()


class CliTestCase(TestCase):
	def setUp(self):
		self._tmp = tempfile.TemporaryDirectory()
		self.tmp = self._tmp.name
		self.data = os.path.join(self.tmp, "data")
		code, out = run_cli("gen", "--out", self.data, "--workloads", "10", "--configs", "5", "--seed", "3")
		self.assertEqual(code, 0)
		self.planted = out.strip()

	def tearDown(self):
		self._tmp.cleanup()


class TestGen(CliTestCase):
	def test_outputs_parse(self):
		matrix = load_matrix_dir(self.data)
		self.assertEqual((matrix.n_workloads, matrix.n_configs), (10, 5))
		self.assertIn(self.planted, matrix.config_ids)
		with open(os.path.join(self.data, "planted.json")) as f:
			self.assertEqual(json.load(f)["planted_exemplar"], self.planted)

	def test_same_seed_same_bytes(self):
		again = os.path.join(self.tmp, "again")
		run_cli("gen", "--out", again, "--workloads", "10", "--configs", "5", "--seed", "3")
		for name in ("configs.csv", "measurements.csv", "planted.json"):
			self.assertTrue(filecmp.cmp(os.path.join(self.data, name), os.path.join(again, name), shallow=False))

	def test_spec_file(self):
		spec_path = os.path.join(self.tmp, "spec.json")
		with open(spec_path, "w") as f:
			json.dump({"n_workloads": 6, "n_configs": 4, "exemplar_fraction": 1.0, "near_band": 0.0}, f)
		out_dir = os.path.join(self.tmp, "perfect")
		code, planted = run_cli("gen", "--spec", spec_path, "--out", out_dir)
		self.assertEqual(code, 0)
		matrix = load_matrix_dir(out_dir)
		self.assertEqual(matrix.fraction_within(planted.strip(), 1.0 + 1e-9), 1.0)

	def test_invalid_spec(self):
		spec_path = os.path.join(self.tmp, "bad.json")
		with open(spec_path, "w") as f:
			json.dump({"n_configs": 1}, f)
		code, out = run_cli("gen", "--spec", spec_path, "--out", os.path.join(self.tmp, "x"))
		self.assertEqual(code, 1)
		self.assertEqual(out, "")


class TestRun(CliTestCase):
	def test_brute_cost(self):
		code, out = run_cli("run", "--method", "brute", "--data", self.data)
		self.assertEqual(code, 0)
		self.assertEqual(json.loads(out)["cost"], 50)

	def test_micky_deterministic(self):
		_, one = run_cli("run", "--method", "micky", "--data", self.data, "--seed", "9")
		_, two = run_cli("run", "--method", "micky", "--data", self.data, "--seed", "9")
		self.assertEqual(one, two)
		doc = json.loads(one)
		self.assertEqual(doc["cost"], 5 + 5)
		self.assertEqual(doc["method"], "micky")

	def test_cherrypick_lower_bound(self):
		path = os.path.join(self.tmp, "cp.json")
		code, out = run_cli("run", "--method", "cherrypick", "--data", self.data, "--out", path)
		self.assertEqual((code, out), (0, ""))
		with open(path) as f:
			doc = json.load(f)
		self.assertTrue(all(o["cost"] >= 3 for o in doc["outcomes"]))

	def test_k_override(self):
		_, out = run_cli("run", "--method", "random4", "--k", "2", "--data", self.data, "--workload", "w0")
		self.assertEqual(json.loads(out)["cost"], 2)

	def test_randomk_needs_k(self):
		code, _ = run_cli("run", "--method", "randomk", "--data", self.data, "--workload", "w0")
		self.assertEqual(code, 2)
		code, out = run_cli("run", "--method", "randomk", "--k", "3", "--data", self.data, "--workload", "w0")
		self.assertEqual(code, 0)
		self.assertEqual(json.loads(out)["cost"], 3)

	def test_unknown_method(self):
		code, _ = run_cli("run", "--method", "annealing", "--data", self.data)
		self.assertEqual(code, 2)

	def test_bad_data(self):
		code, _ = run_cli("run", "--method", "brute", "--data", os.path.join(self.tmp, "missing"))
		self.assertEqual(code, 1)


class TestEval(CliTestCase):
	def test_brute_report(self):
		code, out = run_cli("eval", "--data", self.data, "--methods", "brute", "--reps", "1")
		self.assertEqual(code, 0)
		report = json.loads(out)["methods"]["brute"]
		self.assertEqual(set(report["np_quantiles"].values()), {1.0})
		self.assertEqual(report["replications"], 1)

	def test_files_independent_of_workers(self):
		one, two = os.path.join(self.tmp, "one"), os.path.join(self.tmp, "two")
		args = ("eval", "--data", self.data, "--methods", "micky,random4,brute", "--reps", "4", "--curve", "4,8")
		self.assertEqual(run_cli(*args, "--out", one)[0], 0)
		self.assertEqual(run_cli(*args, "--out", two, "--workers", "3")[0], 0)
		for name in ("report.json", "np_samples.csv", "cost_curve.csv"):
			self.assertTrue(filecmp.cmp(os.path.join(one, name), os.path.join(two, name), shallow=False))

	def test_policies_and_groups(self):
		code, out = run_cli("eval", "--data", self.data, "--methods", "micky", "--reps", "2", "--policies", "--per-group")
		self.assertEqual(code, 0)
		doc = json.loads(out)
		self.assertEqual(len(doc["policy_comparison"]), 9)
		self.assertEqual(list(doc["groups"]), ["all"])
		self.assertIn("micky", doc["top_exemplars"])

	def test_k_override_renames_method(self):
		code, out = run_cli("eval", "--data", self.data, "--methods", "random4,brute", "--k", "2", "--reps", "2")
		self.assertEqual(code, 0)
		methods = json.loads(out)["methods"]
		self.assertEqual(sorted(methods), ["brute", "random2"])
		self.assertEqual(methods["random2"]["total_cost_stats"]["max"], 2 * 10)
		code, _ = run_cli("eval", "--data", self.data, "--methods", "randomk", "--reps", "1")
		self.assertEqual(code, 2)


class TestKnee(TestCase):
	def test_worked_example(self):
		self.assertEqual(run_cli("knee", "--delta-p", "0.05", "--savings", "3.15"), (0, "7\n"))

	def test_never(self):
		self.assertEqual(run_cli("knee", "--delta-p", "0", "--savings", "3.15"), (0, "never\n"))

	def test_zero_savings(self):
		self.assertEqual(run_cli("knee", "--delta-p", "0.05", "--savings", "0"), (0, "0\n"))

	def test_negative_flag(self):
		self.assertEqual(run_cli("knee", "--delta-p", "-0.05", "--savings", "1")[0], 2)


class TestLandscape(CliTestCase):
	def test_rows(self):
		code, out = run_cli("landscape", "--data", self.data)
		self.assertEqual(code, 0)
		rows = json.loads(out)
		self.assertEqual(len(rows), 5)
		self.assertTrue(any(r["config"] == self.planted for r in rows))
