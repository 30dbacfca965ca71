"""
Dense multivariate polynomials with the Weyl inner product.

Coefficients are stored as one dense vector in graded-lexicographic order:
monomials sorted by total degree, and inside one degree lexicographically
descending (x1^2, x1 x2, x2^2, ...). The homogenization of an affine
polynomial reuses the same vector: the monomial x^a of P_{n,d} corresponds to
X0^(d-|a|) X^a of H_{n,d}, so both spaces share one ordering and one table of
multinomial coefficients.
"""

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, Iterator, List, Mapping, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln

from .errors import DegreeMismatchError, DimensionMismatchError


# Upper bound on temporaries during batched Horner evaluation
_HORNER_CHUNK_ELEMS = 1 << 22


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
	if parts == 1:
		yield (total,)
		return
	for first in range(total, -1, -1):
		for rest in _compositions(total - first, parts - 1):
			yield (first,) + rest


@lru_cache(maxsize=None)
def monomial_exponents(n: int, d: int) -> np.ndarray:
	"""Exponents of P_{n,d} in graded-lex order, shape (N, n) with N = binom(n+d, n)."""
	rows = [alpha for k in range(d + 1) for alpha in _compositions(k, n)]
	exps = np.array(rows, dtype=np.int64).reshape(len(rows), n)
	exps.setflags(write=False)
	return exps


@lru_cache(maxsize=None)
def homogeneous_exponents(n: int, d: int) -> np.ndarray:
	"""Exponents of H_{n,d} (n+1 variables, X0 first), aligned with monomial_exponents(n, d)."""
	affine = monomial_exponents(n, d)
	exps = np.hstack([d - affine.sum(axis=1, keepdims=True), affine])
	exps.setflags(write=False)
	return exps


@lru_cache(maxsize=None)
def multinomials(n: int, d: int) -> np.ndarray:
	"""binom(d, alpha) for every monomial, via log-gamma (no integer overflow)."""
	exps = homogeneous_exponents(n, d)
	logs = gammaln(d + 1) - gammaln(exps + 1).sum(axis=1)
	vals = np.exp(logs)
	# exactly representable integers are snapped back
	vals = np.where(vals < 2.0 ** 52, np.rint(vals), vals)
	vals.setflags(write=False)
	return vals


@lru_cache(maxsize=None)
def _index_map(n: int, d: int) -> Dict[Tuple[int, ...], int]:
	return {tuple(int(e) for e in row): i for i, row in enumerate(monomial_exponents(n, d))}


def weyl_dimension(n: int, d: int) -> int:
	return int(monomial_exponents(n, d).shape[0])


def _horner(tensor: np.ndarray, points: np.ndarray) -> np.ndarray:
	"""Iterated Horner over a dense coefficient grid, vectorized over points.

	tensor[k0, ..., k_{m-1}] is the coefficient of x0^k0 ... x_{m-1}^k_{m-1};
	the last variable is eliminated first.
	"""
	m_points = points.shape[0]
	acc = tensor[..., np.newaxis]
	for j in reversed(range(points.shape[1])):
		x = points[:, j]
		c = acc
		acc = c[..., -1, :]
		for k in range(c.shape[-2] - 2, -1, -1):
			acc = acc * x + c[..., k, :]
	return np.array(np.broadcast_to(acc, (m_points,)), dtype=float)


@dataclass(frozen=True, eq=False)
class _DensePolynomial:
	n: int
	d: int
	coeffs: np.ndarray = field(repr=False)

	def __post_init__(self):
		if self.n < 1:
			raise ValueError(f"need at least one variable, got n = {self.n}")
		if self.d < 0:
			raise ValueError(f"degree bound must be non-negative, got d = {self.d}")
		coeffs = np.array(self.coeffs, dtype=float).reshape(-1)
		expected = weyl_dimension(self.n, self.d)
		if coeffs.shape[0] != expected:
			raise DimensionMismatchError(expected, coeffs.shape[0], what="coefficient vector")
		coeffs.setflags(write=False)
		object.__setattr__(self, "coeffs", coeffs)

	@property
	def exponents(self) -> np.ndarray:
		raise NotImplementedError

	@property
	def nvars(self) -> int:
		return int(self.exponents.shape[1])

	@property
	def space(self) -> Tuple[int, int]:
		return (self.n, self.d)

	@cached_property
	def tensor(self) -> np.ndarray:
		grid = np.zeros((self.d + 1,) * self.nvars)
		grid[tuple(self.exponents.T)] = self.coeffs
		grid.setflags(write=False)
		return grid

	@cached_property
	def norm(self) -> float:
		return weyl_norm(self)

	@cached_property
	def partials(self) -> List["_DensePolynomial"]:
		return [_partial(self, i) for i in range(self.nvars)]

	def prepare(self) -> "_DensePolynomial":
		"""Fill the lazy caches before the polynomial is shared between threads."""
		self.tensor, self.norm
		for p in self.partials:
			p.tensor
		return self

	def is_zero(self) -> bool:
		return not np.any(self.coeffs)

	def terms(self) -> Dict[Tuple[int, ...], float]:
		return {
			tuple(int(e) for e in self.exponents[i]): float(c)
			for i, c in enumerate(self.coeffs) if c != 0.0
		}

	def _check_points(self, points) -> np.ndarray:
		pts = np.atleast_2d(np.asarray(points, dtype=float))
		if pts.shape[1] != self.nvars:
			raise DimensionMismatchError(self.nvars, pts.shape[1])
		return pts

	def evaluate_many(self, points) -> np.ndarray:
		pts = self._check_points(points)
		if pts.shape[0] == 0:
			return np.zeros(0)
		per_point = max(1, self.tensor.size // (self.d + 1))
		chunk = max(1, _HORNER_CHUNK_ELEMS // per_point)
		if pts.shape[0] <= chunk:
			return _horner(self.tensor, pts)
		return np.concatenate([_horner(self.tensor, pts[i:i + chunk]) for i in range(0, pts.shape[0], chunk)])

	def gradient_many(self, points) -> np.ndarray:
		pts = self._check_points(points)
		if self.d == 0:
			return np.zeros_like(pts)
		return np.column_stack([p.evaluate_many(pts) for p in self.partials])

	def _same_space(self, other: "_DensePolynomial"):
		if type(self) is not type(other) or self.space != other.space:
			raise DegreeMismatchError(self.space, getattr(other, "space", ()))

	def __add__(self, other):
		self._same_space(other)
		return type(self)(self.n, self.d, self.coeffs + other.coeffs)

	def __sub__(self, other):
		self._same_space(other)
		return type(self)(self.n, self.d, self.coeffs - other.coeffs)

	def __mul__(self, scalar: float):
		return type(self)(self.n, self.d, float(scalar) * self.coeffs)

	__rmul__ = __mul__

	def __neg__(self):
		return type(self)(self.n, self.d, -self.coeffs)

	def __eq__(self, other):
		return (
			type(self) is type(other)
			and self.space == other.space
			and np.array_equal(self.coeffs, other.coeffs)
		)

	__hash__ = None


class AffinePolynomial(_DensePolynomial):
	"""f in P_{n,d}: real polynomial in n variables of degree at most d."""

	@property
	def exponents(self) -> np.ndarray:
		return monomial_exponents(self.n, self.d)

	@classmethod
	def from_terms(cls, n: int, d: int, terms: Mapping[Sequence[int], float]) -> "AffinePolynomial":
		index = _index_map(n, d)
		coeffs = np.zeros(len(index))
		for alpha, c in terms.items():
			alpha = tuple(int(a) for a in alpha)
			if len(alpha) != n:
				raise DimensionMismatchError(n, len(alpha), what="exponent")
			if min(alpha) < 0 or sum(alpha) > d:
				raise ValueError(f"exponent {alpha} is not a monomial of degree <= {d}")
			coeffs[index[alpha]] += float(c)
		return cls(n, d, coeffs)

	@classmethod
	def constant(cls, n: int, d: int, c: float) -> "AffinePolynomial":
		return cls.from_terms(n, d, {(0,) * n: c})

	@classmethod
	def variable(cls, n: int, d: int, i: int) -> "AffinePolynomial":
		alpha = [0] * n
		alpha[i] = 1
		return cls.from_terms(n, d, {tuple(alpha): 1.0})

	def evaluate(self, x) -> float:
		return float(self.evaluate_many(np.asarray(x, dtype=float)[np.newaxis])[0])

	def evaluate_gradient(self, x) -> np.ndarray:
		return self.gradient_many(np.asarray(x, dtype=float)[np.newaxis])[0]


class HomogeneousPolynomial(_DensePolynomial):
	"""F in H_{n,d}: homogeneous of degree d in X0, ..., Xn (X0 homogenizes)."""

	@property
	def exponents(self) -> np.ndarray:
		return homogeneous_exponents(self.n, self.d)

	@classmethod
	def from_terms(cls, n: int, d: int, terms: Mapping[Sequence[int], float]) -> "HomogeneousPolynomial":
		index = _index_map(n, d)
		coeffs = np.zeros(len(index))
		for alpha, c in terms.items():
			alpha = tuple(int(a) for a in alpha)
			if len(alpha) != n + 1:
				raise DimensionMismatchError(n + 1, len(alpha), what="exponent")
			if min(alpha) < 0 or sum(alpha) != d:
				raise ValueError(f"exponent {alpha} is not a monomial of degree exactly {d}")
			coeffs[index[alpha[1:]]] += float(c)
		return cls(n, d, coeffs)

	def evaluate(self, y) -> float:
		return float(self.evaluate_many(np.asarray(y, dtype=float)[np.newaxis])[0])

	def evaluate_gradient(self, y) -> np.ndarray:
		return self.gradient_many(np.asarray(y, dtype=float)[np.newaxis])[0]


Polynomial = Union[AffinePolynomial, HomogeneousPolynomial]


def _partial(poly: _DensePolynomial, i: int) -> _DensePolynomial:
	"""Derivative with respect to variable i (X0 is variable 0 for homogeneous input)."""
	if poly.d == 0:
		return type(poly)(poly.n, 0, np.zeros(1))
	index = _index_map(poly.n, poly.d - 1)
	out = np.zeros(len(index))
	offset = 1 if isinstance(poly, HomogeneousPolynomial) else 0
	for row, c in zip(poly.exponents, poly.coeffs):
		if c == 0.0 or row[i] == 0:
			continue
		lowered = row.copy()
		lowered[i] -= 1
		out[index[tuple(int(e) for e in lowered[offset:])]] += row[i] * c
	return type(poly)(poly.n, poly.d - 1, out)


def weyl_inner(f: Polynomial, g: Polynomial) -> float:
	"""<f, g>_W = sum_alpha binom(d, alpha)^-1 f_alpha g_alpha (affine input goes through f^h)."""
	if f.space != g.space or isinstance(f, HomogeneousPolynomial) != isinstance(g, HomogeneousPolynomial):
		raise DegreeMismatchError(f.space, g.space)
	return float(np.sum(f.coeffs * g.coeffs / multinomials(f.n, f.d)))


def weyl_norm(f: Polynomial) -> float:
	return float(np.sqrt(weyl_inner(f, f)))


def gradient_norm(system: Sequence[Polynomial]) -> float:
	"""Joint Weyl norm of a polynomial map, sum of squared component norms."""
	return float(np.sqrt(sum(weyl_inner(g, g) for g in system)))


def weyl_coordinates(f: Polynomial) -> np.ndarray:
	"""Coordinates in the Weyl-orthonormal basis: f_alpha / sqrt(binom(d, alpha))."""
	return f.coeffs / np.sqrt(multinomials(f.n, f.d))


def from_weyl_coordinates(n: int, d: int, coords) -> AffinePolynomial:
	return AffinePolynomial(n, d, np.asarray(coords, dtype=float) * np.sqrt(multinomials(n, d)))


def homogenize(f: AffinePolynomial) -> HomogeneousPolynomial:
	return HomogeneousPolynomial(f.n, f.d, f.coeffs)


def dehomogenize(F: HomogeneousPolynomial) -> AffinePolynomial:
	return AffinePolynomial(F.n, F.d, F.coeffs)


def evaluate(f: Polynomial, x) -> float:
	return f.evaluate(x)


def evaluate_gradient(f: Polynomial, x) -> np.ndarray:
	return f.evaluate_gradient(x)


def gradient_system(f: AffinePolynomial) -> List[AffinePolynomial]:
	"""(df/dx1, ..., df/dxn), each an element of P_{n,d-1}."""
	return list(f.partials)
