"""
Local condition number kappa_aff(f, x) and the local size bounds built on it.

Three independent computations are kept on purpose and cross-checked in tests:

- kappa_direct: through the homogenization F = f^h at y = phi(x), with the
  gradient of F projected onto the tangent space of the sphere at y;
- kappa_projection: ||f|| / ||P_x f||, the orthogonal projection of f (in
  Weyl-orthonormal coordinates) onto the span of the n+1 evaluation
  functionals g -> g(x), g -> dg/dx_i(x);
- kappa_field: the chain rule through phi, vectorized over many points.
"""

import logging
import math
from typing import Tuple, Union

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import FormulaDomainError, RankDeficiencyError
from .geometry import require_nonzero, f_hat, grad_f_hat, phi
from .models import ConditionSample, Regime
from .poly import AffinePolynomial, homogenize, monomial_exponents, multinomials

logger = logging.getLogger(__name__)

SINGULAR_THRESHOLD = 1e-300
SINGULAR = math.inf


def is_singular(kappa: float) -> bool:
	return math.isinf(kappa)


def _require_degree(f: AffinePolynomial):
	if f.d < 1:
		raise FormulaDomainError("kappa_aff", f"needs degree bound d >= 1, got d = {f.d}")


def _ratio(norm: float, denom: float) -> float:
	if not denom > SINGULAR_THRESHOLD * norm:
		return SINGULAR
	return norm / denom


def kappa_direct(f: AffinePolynomial, x) -> float:
	norm = require_nonzero(f, "kappa_direct")
	_require_degree(f)
	F = homogenize(f)
	y = phi(x)
	value = F.evaluate(y)
	grad = F.evaluate_gradient(y)
	radial = grad @ y
	tangential_sq = max(grad @ grad - radial * radial, 0.0)
	return _ratio(norm, math.sqrt(value * value + tangential_sq / f.d))


def evaluation_functionals(n: int, d: int, x) -> np.ndarray:
	"""Rows: g -> g(x) and g -> dg/dx_i(x) expressed on Weyl-orthonormal coordinates, shape (n+1, N)."""
	x = np.asarray(x, dtype=float).reshape(-1)
	exps = monomial_exponents(n, d)
	scale = np.sqrt(multinomials(n, d))
	rows = [scale * np.prod(x ** exps, axis=1)]
	for i in range(n):
		lowered = exps.copy()
		lowered[:, i] = np.maximum(lowered[:, i] - 1, 0)
		rows.append(scale * exps[:, i] * np.prod(x ** lowered, axis=1))
	return np.vstack(rows)


def kappa_projection(f: AffinePolynomial, x) -> float:
	norm = require_nonzero(f, "kappa_projection")
	x = np.asarray(x, dtype=float).reshape(-1)
	A = evaluation_functionals(f.n, f.d, x)
	gram = A @ A.T
	try:
		factor = cho_factor(gram)
	except LinAlgError:
		raise RankDeficiencyError(int(np.linalg.matrix_rank(A)), A.shape[0])
	w = f.coeffs / np.sqrt(multinomials(f.n, f.d))
	b = A @ w
	projected_sq = float(b @ cho_solve(factor, b))
	return _ratio(norm, math.sqrt(max(projected_sq, 0.0)))


def kappa_field(f: AffinePolynomial, points) -> np.ndarray:
	"""kappa_aff at every row of points (singular rows come back as inf)"""
	norm = require_nonzero(f, "kappa_field")
	_require_degree(f)
	pts = np.atleast_2d(np.asarray(points, dtype=float))
	d = f.d
	s = 1.0 + np.sum(pts * pts, axis=1)
	values = f.evaluate_many(pts)
	grads = f.gradient_many(pts)
	sd = s ** (d / 2)
	F = values / sd
	g = grads / sd[:, np.newaxis] - (d * values / (sd * s))[:, np.newaxis] * pts
	gx = np.sum(g * pts, axis=1)
	denom = np.sqrt(F * F + s * (np.sum(g * g, axis=1) + gx * gx) / d)
	singular = ~(denom > SINGULAR_THRESHOLD * norm)
	with np.errstate(divide="ignore"):
		kappa = norm / np.where(singular, 1.0, denom)
	kappa[singular] = SINGULAR
	if singular.any():
		logger.debug(f"⚠️ {int(singular.sum())} singular point(s) in a batch of {len(pts)}")
	return kappa


def size_bound_from_kappa(kappa: Union[float, np.ndarray], n: int, d: int, regime: Regime = Regime.LIPSCHITZ):
	"""Local size bound as a function of kappa; 0 where kappa is singular.

	Lipschitz enclosures: 1 / (2^(5/2) d n kappa)^n
	Taylor enclosures:    1 / (2^(3n) d^2 kappa)^n   (d > 1 only)
	"""
	if regime is Regime.TAYLOR:
		if d <= 1:
			raise FormulaDomainError("taylor size bound", f"needs d > 1, got d = {d}")
		scale = 2.0 ** (3 * n) * d * d
	else:
		scale = 2.0 ** 2.5 * d * n
	k = np.asarray(kappa, dtype=float)
	out = np.where(np.isinf(k), 0.0, 1.0 / (scale * np.where(np.isinf(k), 1.0, k)) ** n)
	return float(out) if out.ndim == 0 else out


def local_size_bound(f: AffinePolynomial, x) -> float:
	return size_bound_from_kappa(kappa_direct(f, x), f.n, f.d, Regime.LIPSCHITZ)


def local_size_bound_bgt(f: AffinePolynomial, x) -> float:
	if f.d <= 1:
		raise FormulaDomainError("taylor size bound", f"needs d > 1, got d = {f.d}")
	return size_bound_from_kappa(kappa_direct(f, x), f.n, f.d, Regime.TAYLOR)


def fundamental_gap(f: AffinePolynomial, x) -> Tuple[float, float, float]:
	"""(|f_hat(x)|, ||grad_f_hat(x)||, 1/(2 sqrt(2d) kappa)); one of the first two exceeds the third"""
	kappa = kappa_direct(f, x)
	threshold = 0.0 if is_singular(kappa) else 1.0 / (2 * math.sqrt(2 * f.d) * kappa)
	return abs(f_hat(f, x)), float(np.linalg.norm(grad_f_hat(f, x))), threshold


def condition_sample(f: AffinePolynomial, x) -> ConditionSample:
	x = np.asarray(x, dtype=float).reshape(-1)
	return ConditionSample(
		x=tuple(float(c) for c in x),
		kappa_direct=kappa_direct(f, x),
		kappa_projection=kappa_projection(f, x),
		f_hat_value=f_hat(f, x),
		grad_hat_norm=float(np.linalg.norm(grad_f_hat(f, x))),
	)
