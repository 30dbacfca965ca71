import numpy as np
import pytest

from src.models import DobroSpec, Model
from src.poly import AffinePolynomial
from src.randpoly import sample_dobro_affine


@pytest.fixture
def line():
	"""x1 in P_{2,1}"""
	return AffinePolynomial.variable(2, 1, 0)


@pytest.fixture
def line_1d():
	"""x1 in P_{1,1}"""
	return AffinePolynomial.variable(1, 1, 0)


@pytest.fixture
def constant():
	"""1 in P_{2,2}"""
	return AffinePolynomial.constant(2, 2, 1.0)


@pytest.fixture
def unit_sum():
	"""x1^2 + x2^2 + 1, no real zeros"""
	return AffinePolynomial.from_terms(2, 2, {(2, 0): 1.0, (0, 2): 1.0, (0, 0): 1.0})


@pytest.fixture
def circle():
	"""x1^2 + x2^2 - 0.25"""
	return AffinePolynomial.from_terms(2, 2, {(2, 0): 1.0, (0, 2): 1.0, (0, 0): -0.25})


@pytest.fixture
def singular():
	"""x1^2: every zero is singular"""
	return AffinePolynomial.from_terms(2, 2, {(2, 0): 1.0})


@pytest.fixture
def kss():
	"""Factory for seeded KSS polynomials"""
	spec = DobroSpec(Model.KSS)

	def make(n: int, d: int, seed: int) -> AffinePolynomial:
		return sample_dobro_affine(spec, n, d, seed)

	return make


@pytest.fixture
def rng():
	return np.random.default_rng(20240611)
