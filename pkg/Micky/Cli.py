"""
Micky command line.

Usage:
    micky gen --out data/ [--spec spec.json] [--workloads 40 --configs 10 ...]
    micky run --method micky|cherrypick|random4|random8|brute --data data/ [--out run.json]
    micky eval --data data/ [--methods micky,cherrypick,...] [--reps 100] [--out results/]
    micky knee --delta-p 0.05 --savings 3.15 [--ratio 10]
    micky landscape --data data/ [--threshold 1.3]

stdout carries only the result; diagnostics go to stderr.
Exit codes: 0 success, 1 data error, 2 usage error.
"""
import argparse
import json
import logging
import math
import sys

import numpy as np

from . import __version__
from .Bandit import PolicySpec
from .Baselines import encode_configs, run_brute, run_cherrypick, run_random_k
from .Constants import *
from .EvalHarness import (
	KneeInputs, MethodSpec, compare_policies, cost_curve, knee_point, landscape, replicate, replicate_groups,
	summarize, top_exemplars,
)
from .Enum import Method, ObjectiveKind, PolicyKind, RewardMode
from .Micky import Budget, run_micky
from .PerfMatrix import MatrixError, load_matrix_dir
from .Synth import SynthSpec, gen_matrix, write_synth

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2

ALL_METHODS = (Method.MICKY, Method.CHERRYPICK, Method.RANDOM4, Method.RANDOM8, Method.BRUTE)
RANDOM_METHODS = (Method.RANDOM4, Method.RANDOM8, Method.RANDOMK)


def _non_negative(cast):
	def parse(text):
		try:
			value = cast(text)
		except ValueError:
			raise argparse.ArgumentTypeError("%r is not a number" % (text,))
		if not (math.isfinite(value) and value >= 0):
			raise argparse.ArgumentTypeError("%r must be a finite non-negative number" % (text,))
		return value
	return parse


def _positive_float(text):
	value = _non_negative(float)(text)
	if value == 0:
		raise argparse.ArgumentTypeError("%r must be positive" % (text,))
	return value


def _positive_int(text):
	value = _non_negative(int)(text)
	if value == 0:
		raise argparse.ArgumentTypeError("%r must be positive" % (text,))
	return value


def _seed(text):
	value = int(text)
	if not -2 ** 63 <= value < 2 ** 64:
		raise argparse.ArgumentTypeError("seed %r does not fit in 64 bits" % (text,))
	return value


def _method(text):
	try:
		return Method.parse(text)
	except ValueError as e:
		raise argparse.ArgumentTypeError(str(e))


def _method_list(text):
	return [_method(part) for part in text.split(",") if part.strip()]


def _int_list(text):
	try:
		return [int(part) for part in text.split(",") if part.strip()]
	except ValueError:
		raise argparse.ArgumentTypeError("%r is not a comma separated list of integers" % (text,))


def _add_method_flags(p):
	p.add_argument("--alpha", type=_non_negative(int), default=DEFAULT_ALPHA, help="phase-1 sweeps over all configs")
	p.add_argument("--beta", type=_non_negative(float), default=DEFAULT_BETA, help="phase-2 pulls per workload")
	p.add_argument("--policy", choices=[k.value for k in PolicyKind], default=PolicyKind.UCB1.value)
	p.add_argument("--epsilon", type=_non_negative(float), default=DEFAULT_EPSILON)
	p.add_argument("--temperature", type=_positive_float, default=DEFAULT_TEMPERATURE)
	p.add_argument("--n-init", type=_non_negative(int), default=DEFAULT_N_INIT)
	p.add_argument("--ei-stop", type=_non_negative(float), default=DEFAULT_EI_STOP)
	p.add_argument("--reward-mode", choices=[m.value for m in RewardMode], default=RewardMode.ONLINE.value)
	p.add_argument("--k", type=_non_negative(int), default=None, help="override the Random-k size")


def build_parser():
	common = argparse.ArgumentParser(add_help=False)
	common.add_argument("--seed", type=_seed, default=None, help="64-bit seed (default %d)" % DEFAULT_SEED)
	common.add_argument("--objective", choices=("time", "cost"), default=None, help="default cost")
	common.add_argument("--out", default=None, help="output file or directory")
	common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")

	parser = argparse.ArgumentParser(prog="micky", description="Collective cloud configuration optimization")
	parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
	sub = parser.add_subparsers(dest="command", metavar="{gen,run,eval,knee,landscape}")
	sub.required = True

	p = sub.add_parser("gen", parents=[common], help="generate a synthetic performance matrix")
	p.add_argument("--spec", default=None, help="JSON file with synth spec fields")
	p.add_argument("--workloads", type=int, default=None)
	p.add_argument("--configs", type=int, default=None)
	p.add_argument("--exemplar-fraction", type=float, default=None)
	p.add_argument("--near-band", type=float, default=None)
	p.add_argument("--penalty-scale", type=float, default=None)
	p.set_defaults(func=cmd_gen)

	p = sub.add_parser("run", parents=[common], help="run one optimizer on a matrix")
	p.add_argument("--method", type=_method, required=True, help="micky, cherrypick, random4, random8 or brute")
	p.add_argument("--data", required=True)
	p.add_argument("--workload", default=None, help="restrict a per-workload method to one workload")
	_add_method_flags(p)
	p.set_defaults(func=cmd_run)

	p = sub.add_parser("eval", parents=[common], help="replicated comparison of methods")
	p.add_argument("--data", required=True)
	p.add_argument("--methods", type=_method_list, default=list(ALL_METHODS))
	p.add_argument("--reps", type=_positive_int, default=DEFAULT_REPLICATIONS)
	p.add_argument("--workers", type=_positive_int, default=1)
	p.add_argument("--curve", type=_int_list, default=None, help="workload counts for the cost curve")
	p.add_argument("--policies", action="store_true", help="add the policy x budget comparison")
	p.add_argument("--per-group", action="store_true", help="add reports per workload prefix")
	_add_method_flags(p)
	p.set_defaults(func=cmd_eval)

	p = sub.add_parser("knee", parents=[common], help="recurrence count at which per-workload search pays off")
	p.add_argument("--delta-p", type=_non_negative(float), required=True)
	p.add_argument("--savings", type=_non_negative(float), required=True)
	p.add_argument("--ratio", type=_positive_float, default=DEFAULT_COST_RATIO)
	p.set_defaults(func=cmd_knee)

	p = sub.add_parser("landscape", parents=[common], help="per-config exemplar opportunity")
	p.add_argument("--data", required=True)
	p.add_argument("--threshold", type=_positive_float, default=LANDSCAPE_THRESHOLD)
	p.set_defaults(func=cmd_landscape)
	return parser


def _objective(args):
	return ObjectiveKind.parse(args.objective or ObjectiveKind.OPERATIONAL_COST.value)


def _seed_of(args):
	return DEFAULT_SEED if args.seed is None else args.seed


def _emit(text, out=None):
	if out:
		with open(out, "w", encoding="utf-8") as f:
			f.write(text)
	else:
		sys.stdout.write(text)


def _method_spec(args, method):
	policy = PolicySpec.from_name(args.policy, args.epsilon, args.temperature)
	k = args.k if args.k is not None and method in RANDOM_METHODS else None
	return MethodSpec(
		method,
		policy=policy,
		budget=Budget(args.alpha, args.beta),
		reward_mode=args.reward_mode,
		n_init=args.n_init,
		ei_stop=args.ei_stop,
		k=k,
		label=None if k is None else "random%d" % k,
	)


def cmd_gen(args):
	data = {}
	if args.spec:
		with open(args.spec, encoding="utf-8") as f:
			data = json.load(f)
	flags = {
		"n_workloads": args.workloads,
		"n_configs": args.configs,
		"exemplar_fraction": args.exemplar_fraction,
		"near_band": args.near_band,
		"penalty_scale": args.penalty_scale,
		"seed": args.seed,
		"objective_kind": _objective(args).value if args.objective else None,
	}
	data.update({k: v for k, v in flags.items() if v is not None})
	spec = SynthSpec.from_dict(data)
	if not args.out:
		raise ValueError("gen needs --out <dir>")
	matrix, planted = gen_matrix(spec)
	write_synth(args.out, matrix, planted, spec)
	sys.stdout.write(planted + "\n")
	return EXIT_OK


def cmd_run(args):
	matrix = load_matrix_dir(args.data, _objective(args))
	spec = _method_spec(args, args.method)
	rng = np.random.default_rng(_seed_of(args) % 2 ** 64)
	if spec.collective:
		outcome = run_micky(matrix, spec.policy, spec.budget, spec.reward_mode, rng)
		doc = dict(method=spec.method.value, **outcome.to_dict())
	else:
		workloads = [args.workload] if args.workload else list(matrix.workloads)
		if spec.method is Method.CHERRYPICK:
			features = encode_configs(matrix.configs)
			outcomes = [run_cherrypick(matrix, w, spec.n_init, spec.ei_stop, rng, features) for w in workloads]
		elif spec.method is Method.BRUTE:
			outcomes = [run_brute(matrix, w) for w in workloads]
		else:
			outcomes = [run_random_k(matrix, w, spec.k, rng) for w in workloads]
		doc = {
			"method": outcomes[0].method,
			"cost": sum(o.cost for o in outcomes),
			"outcomes": [o.to_dict() for o in outcomes],
		}
	_emit(json.dumps(doc, indent=2) + "\n", args.out)
	return EXIT_OK


def cmd_eval(args):
	matrix = load_matrix_dir(args.data, _objective(args))
	seed = _seed_of(args)
	specs = [_method_spec(args, m) for m in args.methods]
	reports = [replicate(s, matrix, args.reps, seed, args.workers) for s in specs]

	curve = []
	if args.curve:
		curve = cost_curve(matrix, args.curve, specs, [seed + i for i in range(args.reps)], args.workers)
	policies = []
	if args.policies:
		roster = [PolicySpec.epsilon_greedy(args.epsilon), PolicySpec.softmax(args.temperature), PolicySpec.ucb1()]
		policies = compare_policies(
			matrix, roster, beta=args.beta, n_reps=args.reps, base_seed=seed,
			reward_mode=args.reward_mode, workers=args.workers,
		)
	groups = {}
	if args.per_group:
		per_method = [replicate_groups(s, matrix, args.reps, seed, args.workers) for s in specs]
		groups = {g: [reps[g] for reps in per_method] for g in per_method[0]} if per_method else {}

	doc = summarize(reports, curve, policies, groups)
	doc.top_exemplars = {
		r.method: top_exemplars(matrix, r.exemplar_histogram) for r in reports if r.exemplar_histogram
	}
	if args.out:
		doc.write(args.out)
	sys.stdout.write(doc.to_json())
	return EXIT_OK


def cmd_knee(args):
	k = knee_point(KneeInputs(args.delta_p, args.savings, args.ratio))
	sys.stdout.write(("never" if k is None else str(k)) + "\n")
	return EXIT_OK


def cmd_landscape(args):
	matrix = load_matrix_dir(args.data, _objective(args))
	_emit(json.dumps(landscape(matrix, args.threshold), indent=2) + "\n", args.out)
	return EXIT_OK


def main(argv=None):
	parser = build_parser()
	args = parser.parse_args(argv)
	methods = [args.method] if getattr(args, "method", None) is not None else getattr(args, "methods", [])
	if Method.RANDOMK in methods and args.k is None:
		parser.error("randomk needs --k")
	logging.basicConfig(
		level=logging.DEBUG if args.verbose else logging.WARNING,
		format="%(levelname)s: %(message)s",
		stream=sys.stderr,
	)
	try:
		return args.func(args)
	except (MatrixError, KeyError, OSError, ValueError) as e:
		# json.JSONDecodeError is a ValueError
		LOGGER.error("%s failed: %s", args.command, e)
		return EXIT_DATA


if __name__ == "__main__":
	sys.exit(main())
