"""
Exact Gaussian-process regression with a Matern 5/2 kernel, and Expected Improvement.

Targets are standardized per fit; predictions come back in the original units.
All acquisition values follow the minimization convention.
"""
import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.spatial.distance import cdist
from scipy.stats import norm

from .Constants import *

LOGGER = logging.getLogger(__name__)

SQRT5 = math.sqrt(5.0)


class NonPSDKernelError(np.linalg.LinAlgError):
	pass


def _lengthscales(lengthscales, dim):
	ls = np.broadcast_to(np.asarray(lengthscales, dtype=float), (dim,)).copy()
	if np.any(ls <= 0):
		raise ValueError("lengthscales must be positive, got %r" % (lengthscales,))
	return ls


def _matern52_from_r(r, signal_variance):
	sr = SQRT5 * r
	return signal_variance * (1.0 + sr + sr * sr / 3.0) * np.exp(-sr)


def matern52(x, x2, lengthscales, signal_variance):
	x = np.atleast_1d(np.asarray(x, dtype=float))
	x2 = np.atleast_1d(np.asarray(x2, dtype=float))
	if x.shape != x2.shape:
		raise ValueError("dimension mismatch: %s vs %s" % (x.shape, x2.shape))
	if not signal_variance > 0:
		raise ValueError("signal_variance must be positive, got %r" % (signal_variance,))
	ls = _lengthscales(lengthscales, x.shape[0])
	r = math.sqrt(float(np.sum(((x - x2) / ls) ** 2)))
	return float(_matern52_from_r(r, signal_variance))


def matern52_matrix(X1, X2, lengthscales, signal_variance):
	X1 = np.atleast_2d(np.asarray(X1, dtype=float))
	X2 = np.atleast_2d(np.asarray(X2, dtype=float))
	if X1.shape[1] != X2.shape[1]:
		raise ValueError("dimension mismatch: %d vs %d" % (X1.shape[1], X2.shape[1]))
	ls = _lengthscales(lengthscales, X1.shape[1])
	r = cdist(X1 / ls, X2 / ls)
	return _matern52_from_r(r, signal_variance)


@dataclass(frozen=True, eq=False)
class GpModel:
	train_inputs: np.ndarray
	train_targets: np.ndarray  # standardized
	y_mean: float
	y_scale: float
	lengthscales: np.ndarray
	signal_variance: float
	noise_variance: float
	jitter: float
	factor: tuple  # (lower Cholesky factor, lower flag) as cho_factor returns
	alpha: np.ndarray

	@property
	def n(self):
		return self.train_inputs.shape[0]


def _standardize(y):
	mean = float(np.mean(y))
	std = float(np.std(y))
	if len(y) == 1:
		scale = max(abs(mean), 1e-12)
	elif std > 0:
		scale = std
	else:
		# a flat response: predictive spread is negligible relative to the level
		scale = 1e-9 * max(abs(mean), 1e-12)
	return mean, scale


def fit(X, y, lengthscales, signal_variance, noise_variance):
	X = np.atleast_2d(np.asarray(X, dtype=float))
	y = np.asarray(y, dtype=float).ravel()
	if X.shape[0] < 1:
		raise ValueError("fit needs at least one training point")
	if X.shape[0] != y.shape[0]:
		raise ValueError("got %d inputs but %d targets" % (X.shape[0], y.shape[0]))
	if not (signal_variance > 0 and noise_variance >= 0):
		raise ValueError("signal_variance must be > 0 and noise_variance >= 0")
	ls = _lengthscales(lengthscales, X.shape[1])

	y_mean, y_scale = _standardize(y)
	targets = (y - y_mean) / y_scale

	K = matern52_matrix(X, X, ls, signal_variance)
	jitter = GP_JITTER
	try:
		factor = linalg.cho_factor(K + (noise_variance + jitter) * np.eye(len(y)), lower=True)
	except np.linalg.LinAlgError:
		jitter = GP_JITTER * GP_JITTER_RETRY
		LOGGER.warning("Kernel factorization failed, retrying with jitter %g", jitter)
		try:
			factor = linalg.cho_factor(K + (noise_variance + jitter) * np.eye(len(y)), lower=True)
		except np.linalg.LinAlgError as err:
			raise NonPSDKernelError("non-PSD kernel: %s" % err) from err

	alpha = linalg.cho_solve(factor, targets)
	return GpModel(X, targets, y_mean, y_scale, ls, float(signal_variance), float(noise_variance), jitter, factor, alpha)


def predict_many(model, Xs, standardized=False):
	Xs = np.atleast_2d(np.asarray(Xs, dtype=float))
	if Xs.shape[1] != model.train_inputs.shape[1]:
		raise ValueError("dimension mismatch: %d vs %d" % (Xs.shape[1], model.train_inputs.shape[1]))
	k_star = matern52_matrix(model.train_inputs, Xs, model.lengthscales, model.signal_variance)
	mean = k_star.T @ model.alpha
	v = linalg.solve_triangular(model.factor[0], k_star, lower=True)
	var = model.signal_variance - np.sum(v * v, axis=0)
	std = np.sqrt(np.clip(var, 0.0, None))
	if standardized:
		return mean, std
	return mean * model.y_scale + model.y_mean, std * model.y_scale


def predict(model, x, standardized=False):
	mean, std = predict_many(model, np.atleast_1d(np.asarray(x, dtype=float))[None, :], standardized)
	return float(mean[0]), float(std[0])


def log_marginal_likelihood(model):
	L = model.factor[0]
	n = model.n
	return float(
		-0.5 * model.train_targets @ model.alpha
		- np.sum(np.log(np.diag(L)))
		- 0.5 * n * math.log(2.0 * math.pi)
	)


def hyperparameter_grid():
	return list(itertools.product(GP_LENGTHSCALES, GP_SIGNAL_VARIANCES, GP_NOISE_VARIANCES))


def fit_best(X, y, grid=None):
	"""Fit every grid candidate and keep the highest log marginal likelihood (first wins ties)."""
	best = None
	best_lml = -np.inf
	for lengthscale, signal_variance, noise_variance in (grid or hyperparameter_grid()):
		try:
			model = fit(X, y, lengthscale, signal_variance, noise_variance)
		except NonPSDKernelError:
			LOGGER.debug("Skipping grid point (%g, %g, %g)", lengthscale, signal_variance, noise_variance)
			continue
		lml = log_marginal_likelihood(model)
		if lml > best_lml:
			best, best_lml = model, lml
	if best is None:
		raise NonPSDKernelError("non-PSD kernel for every grid candidate")
	return best


def expected_improvement(mean, std, best_observed, xi=DEFAULT_XI):
	mean = np.asarray(mean, dtype=float)
	std = np.asarray(std, dtype=float)
	if np.any(std < 0):
		raise ValueError("std must be non-negative")
	improvement = best_observed - mean - xi
	with np.errstate(divide="ignore", invalid="ignore"):
		z = np.where(std > 0, improvement / np.where(std > 0, std, 1.0), 0.0)
	ei = np.where(std > 0, improvement * norm.cdf(z) + std * norm.pdf(z), np.maximum(improvement, 0.0))
	ei = np.maximum(ei, 0.0)
	if ei.ndim == 0:
		return float(ei)
	return ei
