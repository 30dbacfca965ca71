from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np


class Branch(Enum):
	"""Which disjunct of the termination predicate fired"""
	VALUE = "value"
	GRADIENT = "gradient"
	NONE = "none"


class PredicateMode(Enum):
	C_PRIME = "cprime"
	INTERVAL = "interval"


class Regime(Enum):
	"""Interval-approximation regime a size bound or cube bound refers to"""
	LIPSCHITZ = "lipschitz"  # midpoint + Lipschitz-radius enclosures (executable here)
	TAYLOR = "taylor"  # Taylor-expansion enclosures (bounds only)


class Model(Enum):
	KSS = "kss"
	WEYL = "weyl"
	PRANDOM = "prandom"


@dataclass(frozen=True)
class Interval:
	lo: float
	hi: float

	def __post_init__(self):
		if not self.lo <= self.hi:
			raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

	@classmethod
	def around(cls, center: float, radius: float) -> "Interval":
		return cls(center - radius, center + radius)

	@property
	def width(self) -> float:
		return self.hi - self.lo

	@property
	def midpoint(self) -> float:
		return (self.lo + self.hi) / 2

	def contains(self, x: float) -> bool:
		return self.lo <= x <= self.hi

	def contains_zero(self) -> bool:
		return self.contains(0.0)

	def __add__(self, other: "Interval") -> "Interval":
		return Interval(self.lo + other.lo, self.hi + other.hi)

	def __mul__(self, other: "Interval") -> "Interval":
		products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
		return Interval(min(products), max(products))

	def __str__(self):
		return f"[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class IntervalBox:
	components: Tuple[Interval, ...]

	def __len__(self):
		return len(self.components)

	def __getitem__(self, i: int) -> Interval:
		return self.components[i]

	def contains(self, v: Sequence[float]) -> bool:
		return len(v) == len(self.components) and all(c.contains(float(x)) for c, x in zip(self.components, v))

	def dot(self, other: "IntervalBox") -> Interval:
		"""<B, B'> with the two factors treated as independent interval vectors"""
		total = self.components[0] * other.components[0]
		for a, b in zip(self.components[1:], other.components[1:]):
			total = total + a * b
		return total


@dataclass(frozen=True)
class Cube:
	"""Axis-aligned n-cube m + w*[-1/2, 1/2]^n"""
	m: Tuple[float, ...]
	w: float

	def __post_init__(self):
		if not self.w > 0:
			raise ValueError(f"cube width must be positive, got {self.w}")
		object.__setattr__(self, "m", tuple(float(c) for c in self.m))

	@property
	def n(self) -> int:
		return len(self.m)

	@property
	def volume(self) -> float:
		return self.w ** self.n

	@property
	def lower(self) -> np.ndarray:
		return np.asarray(self.m) - self.w / 2

	@property
	def upper(self) -> np.ndarray:
		return np.asarray(self.m) + self.w / 2

	def contains(self, x: Sequence[float]) -> bool:
		return bool(np.all(np.abs(np.asarray(x, dtype=float) - np.asarray(self.m)) <= self.w / 2))

	def children(self) -> List["Cube"]:
		# lexicographic orthant order: (-,-), (-,+), (+,-), (+,+) for n = 2
		q = self.w / 4
		return [
			Cube(tuple(c + s * q for c, s in zip(self.m, signs)), self.w / 2)
			for signs in product((-1, 1), repeat=self.n)
		]

	def corners(self) -> np.ndarray:
		h = self.w / 2
		return np.array([[c + s * h for c, s in zip(self.m, signs)] for signs in product((-1, 1), repeat=self.n)])


@dataclass(frozen=True)
class Leaf:
	cube: Cube
	depth: int
	branch: Branch


@dataclass
class SubdivisionStats:
	leaf_count: int = 0
	max_depth: int = 0
	value_branch: int = 0
	gradient_branch: int = 0
	internal_count: int = 0
	evaluations: int = 0
	depth_histogram: Dict[int, int] = field(default_factory=dict)

	def to_dict(self) -> Dict:
		return {
			"leaf_count": self.leaf_count,
			"max_depth": self.max_depth,
			"value_branch": self.value_branch,
			"gradient_branch": self.gradient_branch,
			"internal_count": self.internal_count,
			"evaluations": self.evaluations,
			"depth_histogram": {str(k): v for k, v in sorted(self.depth_histogram.items())},
		}


@dataclass
class Subdivision:
	"""Leaf set of a subdivision of [-a, a]^n plus its statistics"""
	a: float
	n: int
	mode: PredicateMode
	leaves: List[Leaf]
	stats: SubdivisionStats
	internal: Optional[List[Cube]] = None

	@property
	def cubes(self) -> List[Cube]:
		return [leaf.cube for leaf in self.leaves]


@dataclass(frozen=True)
class ConditionSample:
	x: Tuple[float, ...]
	kappa_direct: float
	kappa_projection: float
	f_hat_value: float
	grad_hat_norm: float

	@property
	def relative_gap(self) -> float:
		if np.isinf(self.kappa_direct) and np.isinf(self.kappa_projection):
			return 0.0
		return abs(self.kappa_projection - self.kappa_direct) / self.kappa_direct


@dataclass(frozen=True)
class DobroSpec:
	model: Model
	p: Optional[float] = None

	def __post_init__(self):
		if self.model is Model.PRANDOM:
			if self.p is None or self.p < 2:
				raise ValueError(f"p-random model needs p >= 2, got p = {self.p}")


@dataclass(frozen=True)
class SmoothingSpec:
	base: object  # AffinePolynomial
	sigma: float
	noise: DobroSpec

	def __post_init__(self):
		if not self.sigma > 0:
			raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass
class EstimateReport:
	estimate: float
	uncertainty: float
	samples: int
	seed: Optional[int]
	method: str = "median_of_means"
	blocks: int = 16
	excluded_singular: int = 0
	heavy_tail: bool = False

	def to_dict(self) -> Dict:
		return {
			"estimate": self.estimate,
			"uncertainty": self.uncertainty,
			"samples": self.samples,
			"seed": self.seed,
			"method": self.method,
			"blocks": self.blocks,
			"excluded_singular": self.excluded_singular,
			"heavy_tail": self.heavy_tail,
		}


@dataclass
class ContourSet:
	"""Marching-squares segments for display; carries no topological guarantee"""
	segments: List[Tuple[Tuple[float, float], Tuple[float, float]]]
	certified: bool = False

	def __len__(self):
		return len(self.segments)

	def points(self) -> np.ndarray:
		if not self.segments:
			return np.zeros((0, 2))
		return np.array([p for seg in self.segments for p in seg])
