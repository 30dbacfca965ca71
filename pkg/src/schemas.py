import logging
import math
from datetime import datetime
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from .models import Branch, Cube, Leaf, Model, PredicateMode, Regime, Subdivision, SubdivisionStats
from .poly import AffinePolynomial, HomogeneousPolynomial, dehomogenize

logger = logging.getLogger(__name__)

POLY_FORMAT = "pv.poly/1"
SUBDIVISION_FORMAT = "pv.subdivision/1"
BOUND_FORMAT = "pv.bound/1"
MANIFEST_FORMAT = "pv.manifest/1"
BENCH_FORMAT = "pv.bench/1"


# Wire documents
class TermDocument(BaseModel):
	alpha: List[int]
	coeff: float


class PolynomialDocument(BaseModel):
	format: Literal["pv.poly/1"] = POLY_FORMAT
	n: int = Field(ge=1)
	d: int = Field(ge=1)
	homogeneous: bool = False
	terms: List[TermDocument]
	source: Optional[Dict[str, Any]] = Field(default=None, description="Sampler settings that produced the polynomial")

	@model_validator(mode="after")
	def _check_terms(self):
		width = self.n + 1 if self.homogeneous else self.n
		for t in self.terms:
			if len(t.alpha) != width:
				raise ValueError(f"exponent {t.alpha} has {len(t.alpha)} entries, expected {width}")
			if min(t.alpha) < 0:
				raise ValueError(f"exponent {t.alpha} has a negative entry")
			total = sum(t.alpha)
			if self.homogeneous and total != self.d:
				raise ValueError(f"exponent {t.alpha} is not of degree {self.d}")
			if not self.homogeneous and total > self.d:
				raise ValueError(f"exponent {t.alpha} exceeds degree {self.d}")
		return self

	def to_polynomial(self) -> AffinePolynomial:
		terms: Dict[tuple, float] = {}
		for t in self.terms:
			key = tuple(t.alpha)
			terms[key] = terms.get(key, 0.0) + t.coeff
		if self.homogeneous:
			return dehomogenize(HomogeneousPolynomial.from_terms(self.n, self.d, terms))
		return AffinePolynomial.from_terms(self.n, self.d, terms)

	@classmethod
	def from_polynomial(cls, f: AffinePolynomial, source: Optional[Dict[str, Any]] = None) -> "PolynomialDocument":
		terms = [TermDocument(alpha=list(alpha), coeff=c) for alpha, c in f.terms().items()]
		return cls(n=f.n, d=f.d, terms=terms, source=source)


class LeafDocument(BaseModel):
	m: List[float]
	w: float = Field(gt=0)
	depth: Optional[int] = Field(default=None, ge=0, description="Derived from the width when absent")
	branch: Literal["value", "gradient"]


class SubdivisionDocument(BaseModel):
	format: Literal["pv.subdivision/1"] = SUBDIVISION_FORMAT
	a: float = Field(gt=0)
	n: int = Field(ge=1)
	mode: PredicateMode
	leaves: List[LeafDocument]
	stats: Dict[str, Any] = {}

	@classmethod
	def from_subdivision(cls, S: Subdivision) -> "SubdivisionDocument":
		leaves = [
			LeafDocument(m=list(leaf.cube.m), w=leaf.cube.w, depth=leaf.depth, branch=leaf.branch.value)
			for leaf in S.leaves
		]
		return cls(a=S.a, n=S.n, mode=S.mode, leaves=leaves, stats=S.stats.to_dict())

	def _depth(self, leaf: LeafDocument) -> int:
		if leaf.depth is not None:
			return leaf.depth
		return max(0, int(round(math.log2(2 * self.a / leaf.w))))

	def to_subdivision(self) -> Subdivision:
		leaves = [Leaf(Cube(tuple(doc.m), doc.w), self._depth(doc), Branch(doc.branch)) for doc in self.leaves]
		hist = {int(k): int(v) for k, v in self.stats.get("depth_histogram", {}).items()}
		if not hist:
			for leaf in leaves:
				hist[leaf.depth] = hist.get(leaf.depth, 0) + 1
		value_count = sum(1 for leaf in leaves if leaf.branch is Branch.VALUE)
		stats = SubdivisionStats(
			leaf_count=int(self.stats.get("leaf_count", len(leaves))),
			max_depth=int(self.stats.get("max_depth", max((leaf.depth for leaf in leaves), default=0))),
			value_branch=int(self.stats.get("value_branch", value_count)),
			gradient_branch=int(self.stats.get("gradient_branch", len(leaves) - value_count)),
			internal_count=int(self.stats.get("internal_count", 0)),
			evaluations=int(self.stats.get("evaluations", 0)),
			depth_histogram=hist,
		)
		return Subdivision(a=self.a, n=self.n, mode=self.mode, leaves=leaves, stats=stats)


# Validated command configuration
class BoundConfig(BaseModel):
	n: int = Field(ge=1)
	d: int = Field(ge=1)
	a: float = Field(default=1.0, gt=0)
	krho: float = Field(default=1.0, gt=0, description="Product K*rho of the coefficient law")
	c1: float = Field(default=1.0, ge=1)
	c2: float = Field(default=1.0, ge=1)
	sigma: Optional[float] = Field(default=None, gt=0)
	regime: Regime = Regime.LIPSCHITZ

	@property
	def scale(self) -> float:
		"""c1 * c2 * K * rho"""
		return self.c1 * self.c2 * self.krho

	@model_validator(mode="after")
	def _warn_on_small_scale(self):
		if self.scale < 1:
			logger.warning(f"⚠️ c1*c2*K*rho = {self.scale:.4g} < 1; the closed forms assume it is at least 1")
		return self

	def assumptions(self) -> Dict[str, Any]:
		return {
			"c1": self.c1,
			"c2": self.c2,
			"krho": self.krho,
			"c1c2krho": self.scale,
			"c1c2krho_at_least_one": self.scale >= 1,
			"universal_constants_defaulted": self.c1 == 1.0 and self.c2 == 1.0,
		}


class MeshConfig(BaseModel):
	poly: str
	a: float = Field(gt=0)
	mode: PredicateMode = PredicateMode.C_PRIME
	max_depth: int = Field(default=40, ge=1)
	out: Optional[str] = None
	svg: Optional[str] = None
	n_jobs: int = 1


class EstimatorConfig(BaseModel):
	samples: int = Field(default=4096, ge=16)
	seed: int = Field(default=0, ge=0)
	blocks: int = Field(default=16, ge=1)
	quadrature: bool = False
	points_per_axis: int = Field(default=2 ** 12, ge=2)

	@model_validator(mode="after")
	def _blocks_fit(self):
		if self.blocks > self.samples:
			raise ValueError(f"{self.blocks} blocks need at least as many samples, got {self.samples}")
		return self


class BenchConfig(BaseModel):
	model: Model = Model.KSS
	p: Optional[float] = None
	n: int = Field(default=2, ge=1)
	d_lo: int = Field(ge=1)
	d_hi: int = Field(ge=1)
	trials: int = Field(default=50, ge=1)
	seed: int = Field(default=0, ge=0)
	a: float = Field(default=1.0, gt=0)
	mode: PredicateMode = PredicateMode.C_PRIME
	max_depth: int = Field(default=40, ge=1)
	csv: str
	timing: bool = False
	n_jobs: int = 1

	@model_validator(mode="after")
	def _check_range(self):
		if self.d_lo > self.d_hi:
			raise ValueError(f"empty degree range {self.d_lo}:{self.d_hi}")
		if self.model is Model.PRANDOM and (self.p is None or self.p < 2):
			raise ValueError(f"p-random model needs --p >= 2, got {self.p}")
		return self

	@property
	def degrees(self) -> List[int]:
		return list(range(self.d_lo, self.d_hi + 1))


class RunManifest(BaseModel):
	format: Literal["pv.manifest/1"] = MANIFEST_FORMAT
	command: str
	config: Dict[str, Any]
	seed: Optional[int] = None
	version: str
	started_at: datetime
	elapsed_s: float = 0.0
	outputs: List[str] = []
	output_format: Optional[str] = None
