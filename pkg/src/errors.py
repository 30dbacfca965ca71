from typing import Optional, Sequence


class PVError(Exception):
	"""Base class for every error raised by the library."""


class DimensionMismatchError(PVError, ValueError):
	def __init__(self, expected: int, got: int, what: str = "point"):
		self.expected = expected
		self.got = got
		self.what = what
		super().__init__(f"{what} has dimension {got}, expected {expected}")


class DegreeMismatchError(PVError, ValueError):
	def __init__(self, left: Sequence[int], right: Sequence[int]):
		self.left = tuple(left)
		self.right = tuple(right)
		super().__init__(f"polynomials live in different spaces: (n, d) = {self.left} vs {self.right}")


class ZeroPolynomialError(PVError, ValueError):
	def __init__(self, operation: str):
		self.operation = operation
		super().__init__(f"{operation} is undefined for the zero polynomial")


class RankDeficiencyError(PVError, ArithmeticError):
	def __init__(self, rank: int, size: int):
		self.rank = rank
		self.size = size
		super().__init__(f"Gram matrix of the evaluation functionals is singular (rank {rank} < {size})")


class FormulaDomainError(PVError, ValueError):
	def __init__(self, formula: str, message: str):
		self.formula = formula
		super().__init__(f"{formula}: {message}")


class UnsupportedRangeError(PVError, ValueError):
	def __init__(self, n: int, d: int, max_n: int, max_d: int):
		self.n = n
		self.d = d
		super().__init__(f"(n, d) = ({n}, {d}) outside the supported range n <= {max_n}, d <= {max_d}")


class MaxDepthExceeded(PVError, RuntimeError):
	"""Cubes at the depth limit still fail the termination predicate.

	Typical cause is a singular zero of f inside the region, where the local
	condition number is infinite and no finite subdivision exists.
	"""

	def __init__(self, depth: int, failing: int, example: Optional[object] = None):
		self.depth = depth
		self.failing = failing
		self.example = example
		super().__init__(f"{failing} cube(s) at depth {depth} still fail the predicate (possible singular zero)")
