"""
Random polynomial models whose Weyl-orthonormal coordinates are i.i.d.

    F = sum_{|alpha| = d} sqrt(binom(d, alpha)) c_alpha X^alpha

with c_alpha centered, subgaussian and anti-concentrated:
  kss     - standard Gaussian
  weyl    - uniform on [-1, 1]
  prandom - density proportional to exp(-|t|^p), p >= 2

Every coefficient has its own counter-based stream keyed by (seed, alpha index),
so a draw does not depend on the order coefficients are generated in.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from .condition import kappa_direct
from .geometry import require_nonzero
from .models import DobroSpec, Model, SmoothingSpec
from .poly import AffinePolynomial, HomogeneousPolynomial, dehomogenize, multinomials, weyl_dimension

logger = logging.getLogger(__name__)

_SEED_LIMIT = 2 ** 64


def coefficient_rng(seed: int, index: int) -> np.random.Generator:
	if not 0 <= seed < _SEED_LIMIT:
		raise ValueError(f"seed must lie in [0, 2^64), got {seed}")
	return np.random.Generator(np.random.Philox(key=seed * _SEED_LIMIT + index))


def draw_coefficients(spec: DobroSpec, rng: np.random.Generator, size: int) -> np.ndarray:
	"""size i.i.d. draws of the coefficient law of spec"""
	if spec.model is Model.KSS:
		return rng.standard_normal(size)
	if spec.model is Model.WEYL:
		return rng.uniform(-1.0, 1.0, size)
	# |c|^p ~ Gamma(1/p, 1) gives density proportional to exp(-|c|^p)
	p = float(spec.p)
	magnitude = rng.gamma(1.0 / p, 1.0, size) ** (1.0 / p)
	sign = rng.integers(0, 2, size) * 2 - 1
	return sign * magnitude


def sample_dobro(spec: DobroSpec, n: int, d: int, seed: int) -> HomogeneousPolynomial:
	N = weyl_dimension(n, d)
	c = np.array([draw_coefficients(spec, coefficient_rng(seed, i), 1)[0] for i in range(N)])
	return HomogeneousPolynomial(n, d, np.sqrt(multinomials(n, d)) * c)


def sample_dobro_affine(spec: DobroSpec, n: int, d: int, seed: int) -> AffinePolynomial:
	"""Affine random polynomial: the dehomogenization X0 = 1 of a homogeneous draw"""
	return dehomogenize(sample_dobro(spec, n, d, seed))


def smoothed_instance(spec: SmoothingSpec, seed: int) -> AffinePolynomial:
	"""q = f + sigma ||f|| g with g drawn from spec.noise"""
	f = spec.base
	norm = require_nonzero(f, "smoothed_instance")
	g = sample_dobro_affine(spec.noise, f.n, f.d, seed)
	return f + (spec.sigma * norm) * g


def _prandom_parameters(p: float) -> Tuple[float, float]:
	# rho = 2 sup density = p / Gamma(1/p)
	rho = math.exp(math.log(p) - gammaln(1.0 / p))
	# K = sup_q (E|c|^q)^(1/q) / sqrt(q), with E|c|^q = Gamma((q+1)/p) / Gamma(1/p)
	q = np.linspace(1.0, 64.0, 2521)
	moments = (gammaln((q + 1) / p) - gammaln(1.0 / p)) / q
	K = float(np.max(np.exp(moments) / np.sqrt(q)))
	return K, rho


def model_parameters(spec: DobroSpec) -> Tuple[float, float]:
	"""(K, rho) of the coefficient law; the bounds consume only the product K*rho.

	rho is twice the supremum of the density. For the Gaussian and uniform laws
	K is fixed at 1/2 so that K*rho reproduces 1/sqrt(2 pi) and 1/2. For the
	p-random law K is the moment-growth constant sup_q ||c||_q / sqrt(q).
	"""
	if spec.model is Model.KSS:
		return 0.5, 2.0 / math.sqrt(2 * math.pi)
	if spec.model is Model.WEYL:
		return 0.5, 1.0
	return _prandom_parameters(float(spec.p))


def krho(spec: DobroSpec) -> float:
	K, rho = model_parameters(spec)
	return K * rho


def anti_concentration(samples, eps: float, grid: Optional[Sequence[float]] = None) -> float:
	"""max over u of the empirical P(|c - u| <= eps)"""
	s = np.sort(np.asarray(samples, dtype=float))
	u = np.linspace(-3.0, 3.0, 1201) if grid is None else np.asarray(grid, dtype=float)
	counts = np.searchsorted(s, u + eps, side="right") - np.searchsorted(s, u - eps, side="left")
	return float(counts.max() / len(s))


def empirical_kappa_tail(spec: DobroSpec, n: int, d: int, x, draws: int, seed: int, thresholds: Sequence[float]) -> np.ndarray:
	"""Empirical P(kappa_aff(f, x)^n >= t) over fresh draws f, one entry per threshold t"""
	x = np.asarray(x, dtype=float)
	seeds = np.random.SeedSequence(seed).generate_state(draws, dtype=np.uint64)
	powers = np.empty(draws)
	for i, s in enumerate(seeds):
		powers[i] = kappa_direct(sample_dobro_affine(spec, n, d, int(s)), x) ** n
	logger.debug(f"📦 {draws} condition numbers drawn, median kappa^n = {np.median(powers):.4g}")
	return np.array([np.mean(powers >= t) for t in thresholds])
