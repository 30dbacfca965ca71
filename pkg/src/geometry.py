"""
Cubes, the sphere map phi, the normalized evaluators f_hat / grad_f_hat and the
termination predicates of the subdivision routine.

f_hat(x)      = f(x) / (||f|| (1+||x||^2)^((d-1)/2))
grad_f_hat(x) = grad f(x) / (d ||f|| (1+||x||^2)^(d/2-1))

Both are Lipschitz with constants 1+sqrt(d) and 1+sqrt(d-1) and bounded by
sqrt(1+||x||^2), which is what makes midpoint-plus-radius enclosures valid.
"""

from typing import Tuple, Union

import numpy as np

from .errors import ZeroPolynomialError
from .models import Branch, Cube, Interval, IntervalBox, PredicateMode
from .poly import AffinePolynomial


def phi(x) -> np.ndarray:
	"""x -> (1, x) / sqrt(1 + ||x||^2), a point of the upper unit hemisphere"""
	x = np.asarray(x, dtype=float).reshape(-1)
	return np.concatenate([[1.0], x]) / np.sqrt(1.0 + x @ x)


def phi_jacobian(x) -> np.ndarray:
	"""d phi / dx, shape (n+1, n)"""
	x = np.asarray(x, dtype=float).reshape(-1)
	s = 1.0 + x @ x
	lifted = np.concatenate([[1.0], x])
	eye = np.vstack([np.zeros((1, x.size)), np.eye(x.size)])
	return eye / np.sqrt(s) - np.outer(lifted, x) / s ** 1.5


def require_nonzero(f: AffinePolynomial, operation: str) -> float:
	norm = f.norm
	if norm == 0.0:
		raise ZeroPolynomialError(operation)
	return norm


def f_hat_many(f: AffinePolynomial, points) -> np.ndarray:
	norm = require_nonzero(f, "f_hat")
	pts = np.atleast_2d(np.asarray(points, dtype=float))
	s = 1.0 + np.sum(pts * pts, axis=1)
	return f.evaluate_many(pts) / (norm * s ** ((f.d - 1) / 2))


def grad_f_hat_many(f: AffinePolynomial, points) -> np.ndarray:
	norm = require_nonzero(f, "grad_f_hat")
	if f.d < 1:
		raise ValueError("grad_f_hat needs degree bound d >= 1")
	pts = np.atleast_2d(np.asarray(points, dtype=float))
	s = 1.0 + np.sum(pts * pts, axis=1)
	return f.gradient_many(pts) / (f.d * norm * s ** (f.d / 2 - 1))[:, np.newaxis]


def f_hat(f: AffinePolynomial, x) -> float:
	return float(f_hat_many(f, np.asarray(x, dtype=float)[np.newaxis])[0])


def grad_f_hat(f: AffinePolynomial, x) -> np.ndarray:
	return grad_f_hat_many(f, np.asarray(x, dtype=float)[np.newaxis])[0]


def value_radius(n: int, d: int, w: float) -> float:
	return (1 + np.sqrt(d)) * np.sqrt(n) * w / 2


def gradient_radius(n: int, d: int, w: float) -> float:
	"""Per-component radius of the gradient box"""
	return (1 + np.sqrt(d - 1)) * np.sqrt(n) * w / 2


def interval_f(f: AffinePolynomial, J: Cube) -> Interval:
	"""Enclosure of f_hat over J: f_hat(m) + (1+sqrt(d)) sqrt(n) w [-1/2, 1/2]"""
	return Interval.around(f_hat(f, J.m), value_radius(f.n, f.d, J.w))


def interval_grad(f: AffinePolynomial, J: Cube) -> IntervalBox:
	center = grad_f_hat(f, J.m)
	r = gradient_radius(f.n, f.d, J.w)
	return IntervalBox(tuple(Interval.around(float(c), r) for c in center))


def _tag(value_ok: bool, gradient_ok: bool) -> Tuple[bool, Branch]:
	if value_ok:
		return True, Branch.VALUE
	if gradient_ok:
		return True, Branch.GRADIENT
	return False, Branch.NONE


def predicate_C(f: AffinePolynomial, J: Cube) -> Tuple[bool, Branch]:
	"""0 not in the value enclosure, or 0 not in <B, B> for the gradient box B"""
	value_ok = not interval_f(f, J).contains_zero()
	box = interval_grad(f, J)
	gradient_ok = not box.dot(box).contains_zero()
	return _tag(value_ok, gradient_ok)


def predicate_C_prime(f: AffinePolynomial, J: Cube) -> Tuple[bool, Branch]:
	"""Point-evaluation test that implies predicate_C"""
	value_ok, gradient_ok = c_prime_batch(f, np.asarray(J.m, dtype=float)[np.newaxis], J.w)
	return _tag(bool(value_ok[0]), bool(gradient_ok[0]))


def predicate(f: AffinePolynomial, J: Cube, mode: Union[PredicateMode, str]) -> Tuple[bool, Branch]:
	if PredicateMode(mode) is PredicateMode.C_PRIME:
		return predicate_C_prime(f, J)
	return predicate_C(f, J)


def c_prime_batch(f: AffinePolynomial, mids: np.ndarray, w: float) -> Tuple[np.ndarray, np.ndarray]:
	"""Both disjuncts of C' on a frontier of cubes sharing width w."""
	n, d = f.n, f.d
	values = f_hat_many(f, mids)
	grads = grad_f_hat_many(f, mids)
	value_ok = np.abs(values) > (1 + np.sqrt(d)) * np.sqrt(n) * w
	gradient_ok = np.linalg.norm(grads, axis=1) > np.sqrt(2) * (1 + np.sqrt(d - 1)) * n * w
	return value_ok, gradient_ok


def interval_batch(f: AffinePolynomial, mids: np.ndarray, w: float) -> Tuple[np.ndarray, np.ndarray]:
	"""Both disjuncts of C on a frontier of cubes sharing width w.

	Same float operations, in the same order, as interval_f / interval_grad /
	IntervalBox.dot, so the batch and the scalar predicate agree bit for bit.
	"""
	values = f_hat_many(f, mids)
	grads = grad_f_hat_many(f, mids)
	rv = value_radius(f.n, f.d, w)
	value_ok = (values - rv > 0) | (values + rv < 0)

	rg = gradient_radius(f.n, f.d, w)
	lo, hi = grads - rg, grads + rg
	candidates = np.stack([lo * lo, lo * hi, hi * lo, hi * hi])
	plo, phi_ = candidates.min(axis=0), candidates.max(axis=0)
	total_lo, total_hi = plo[:, 0], phi_[:, 0]
	for i in range(1, f.n):
		total_lo = total_lo + plo[:, i]
		total_hi = total_hi + phi_[:, i]
	gradient_ok = (total_lo > 0) | (total_hi < 0)
	return value_ok, gradient_ok


def predicate_batch(f: AffinePolynomial, mids: np.ndarray, w: float, mode: PredicateMode) -> Tuple[np.ndarray, np.ndarray]:
	if mode is PredicateMode.C_PRIME:
		return c_prime_batch(f, mids, w)
	return interval_batch(f, mids, w)
