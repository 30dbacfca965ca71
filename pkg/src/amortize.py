"""
Continuous amortization: the cube count of the subdivision is controlled by
the integral of 2^n / b_f over [-a, a]^n, b_f the local size bound. This
module estimates that integral (Monte Carlo with median of means, or tensor
trapezoid quadrature for n <= 2) and evaluates the closed-form complexity
bounds in both interval regimes.

Closed forms (log = log2, C = c1 c2 K rho):

  average cubes   lipschitz  d^((n^2+3n)/2) max{1,a^n} 2^((n^2+16 n log n)/2) C^(n+1)
                  taylor     d^((n^2+5n)/2) max{1,a^n} 2^((7n^2+9 n log n)/2) C^(n+1)
  smoothed        average * (1 + 1/sigma)^(n+1)
  E kappa^n       d^((n^2+n)/2) 2^((n^2+3 log n+9)/2) C^(n+1)
  tail P(kappa^n >= t), t >= e^n
                  4 (C sqrt(N) / sqrt(n(n+1)))^(n+1) ln(t)^((n+1)/2) / t^(1+1/n)
"""

import logging
import math
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from .condition import kappa_field, size_bound_from_kappa
from .errors import FormulaDomainError, MaxDepthExceeded
from .geometry import require_nonzero
from .models import EstimateReport, PredicateMode, Regime
from .poly import AffinePolynomial, weyl_dimension
from .schemas import BOUND_FORMAT, BoundConfig, EstimatorConfig
from .subdivide import DEFAULT_MAX_DEPTH, pv_subdivide

logger = logging.getLogger(__name__)

MOM_BLOCKS = 16
QUADRATURE_POINTS = 2 ** 12
HEAVY_TAIL_SHARE = 0.5
# Rows of the quadrature grid evaluated per batch
_QUADRATURE_ROWS = 64


def median_of_means(values, blocks: int = MOM_BLOCKS) -> Tuple[float, float]:
	"""Median of contiguous block means, plus a MAD-based spread of that median"""
	x = np.asarray(values, dtype=float)
	if x.size == 0:
		raise ValueError("median of means needs at least one value")
	blocks = min(blocks, x.size)
	means = np.array([chunk.mean() for chunk in np.array_split(x, blocks)])
	estimate = float(np.median(means))
	mad = float(np.median(np.abs(means - estimate)))
	return estimate, 1.4826 * mad / math.sqrt(blocks)


def is_heavy_tailed(values, top: float = 0.01, share: float = HEAVY_TAIL_SHARE) -> bool:
	"""True when the largest top-fraction of the values carries more than share of their sum"""
	x = np.sort(np.asarray(values, dtype=float))
	total = x.sum()
	if x.size == 0 or total <= 0:
		return False
	k = max(1, int(math.ceil(top * x.size)))
	return bool(x[-k:].sum() > share * total)


def _monte_carlo(f: AffinePolynomial, a: float, integrand: Callable[[np.ndarray], np.ndarray], cfg: EstimatorConfig) -> EstimateReport:
	rng = np.random.default_rng(cfg.seed)
	points = rng.uniform(-a, a, size=(cfg.samples, f.n))
	kappa = kappa_field(f, points)
	singular = np.isinf(kappa)
	excluded = int(singular.sum())
	if excluded:
		logger.warning(f"⚠️ {excluded} of {cfg.samples} sample points are singular; excluded from the estimate")
	values = integrand(kappa[~singular])
	if values.size == 0:
		return EstimateReport(math.inf, math.inf, 0, cfg.seed, blocks=cfg.blocks, excluded_singular=excluded, heavy_tail=True)
	estimate, spread = median_of_means(values, cfg.blocks)
	heavy = is_heavy_tailed(values)
	if heavy:
		logger.warning(f"⚠️ heavy tail: top 1% of {values.size} samples carries over half of the sum")
	return EstimateReport(estimate, spread, int(values.size), cfg.seed, blocks=min(cfg.blocks, values.size), excluded_singular=excluded, heavy_tail=heavy)


def _quadrature(f: AffinePolynomial, a: float, integrand: Callable[[np.ndarray], np.ndarray], points_per_axis: int) -> EstimateReport:
	"""Tensor trapezoid rule of the mean of integrand(kappa) over [-a, a]^n, n <= 2"""
	if f.n > 2:
		raise ValueError(f"tensor quadrature is limited to n <= 2, got n = {f.n}")
	xs = np.linspace(-a, a, points_per_axis)
	if f.n == 1:
		mean = trapezoid(integrand(kappa_field(f, xs[:, np.newaxis])), xs) / (2 * a)
	else:
		rows = np.empty(points_per_axis)
		for start in range(0, points_per_axis, _QUADRATURE_ROWS):
			ys = xs[start:start + _QUADRATURE_ROWS]
			gx, gy = np.meshgrid(xs, ys)
			k = kappa_field(f, np.column_stack([gx.ravel(), gy.ravel()])).reshape(len(ys), points_per_axis)
			rows[start:start + len(ys)] = trapezoid(integrand(k), xs, axis=1)
		mean = trapezoid(rows, xs) / (2 * a) ** 2
	mean = float(mean)
	return EstimateReport(mean, 0.0, points_per_axis ** f.n, None, method="trapezoid", blocks=0, excluded_singular=0)


def _estimate(f: AffinePolynomial, a: float, integrand, estimator: Optional[EstimatorConfig]) -> EstimateReport:
	require_nonzero(f, "expectation")
	if not a > 0:
		raise ValueError(f"region half-width must be positive, got a = {a}")
	cfg = estimator or EstimatorConfig()
	if cfg.quadrature:
		return _quadrature(f, a, integrand, cfg.points_per_axis)
	return _monte_carlo(f, a, integrand, cfg)


def expectation_kappa_n(f: AffinePolynomial, a: float, samples: int = 4096, seed: int = 0, blocks: int = MOM_BLOCKS) -> EstimateReport:
	"""Median-of-means estimate of E kappa_aff(f, x)^n for x uniform in [-a, a]^n"""
	cfg = EstimatorConfig(samples=samples, seed=seed, blocks=blocks)
	return _estimate(f, a, lambda k: k ** f.n, cfg)


def quadrature_kappa_n(f: AffinePolynomial, a: float, points_per_axis: int = QUADRATURE_POINTS) -> EstimateReport:
	cfg = EstimatorConfig(quadrature=True, points_per_axis=points_per_axis)
	return _estimate(f, a, lambda k: k ** f.n, cfg)


def amortized_cube_bound(f: AffinePolynomial, a: float, regime: Regime = Regime.LIPSCHITZ, estimator: Optional[EstimatorConfig] = None) -> float:
	"""max{1, integral over [-a, a]^n of 2^n / b_f(x) dx}"""
	n, d = f.n, f.d
	report = _estimate(f, a, lambda k: 2.0 ** n / size_bound_from_kappa(k, n, d, regime), estimator)
	return max(1.0, (2 * a) ** n * report.estimate)


def condition_cube_bound(n: int, d: int, a: float, expectation: float, regime: Regime = Regime.LIPSCHITZ) -> float:
	"""Cube-count bound written in terms of E kappa^n"""
	spread = max(1.0, a ** n)
	if regime is Regime.TAYLOR:
		return float(d) ** (2 * n) * spread * 2.0 ** (3 * n * n + 2 * n) * expectation
	return float(d) ** n * spread * 2.0 ** (n * math.log2(n) + 4.5 * n) * expectation


def worst_case_cube_bound(f: AffinePolynomial, a: float, points_per_axis: Optional[int] = None, regime: Regime = Regime.LIPSCHITZ) -> float:
	"""(2a)^n divided by the smallest local size bound seen on a regular grid"""
	n = f.n
	ppa = points_per_axis or max(2, int(2 ** (20 / n)))
	axes = [np.linspace(-a, a, ppa)] * n
	grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
	smallest = float(np.min(size_bound_from_kappa(kappa_field(f, grid), n, f.d, regime)))
	if smallest == 0.0:
		return math.inf
	return max(1.0, (2 * a) ** n / smallest)


def _smoothing_factor(config: BoundConfig) -> float:
	return 1.0 if config.sigma is None else (1 + 1 / config.sigma) ** (config.n + 1)


def average_bound(config: BoundConfig) -> float:
	n, d = config.n, config.d
	spread = max(1.0, config.a ** n)
	scale = config.scale ** (n + 1)
	if config.regime is Regime.TAYLOR:
		return float(d ** ((n * n + 5 * n) // 2)) * spread * 2.0 ** ((7 * n * n + 9 * n * math.log2(n)) / 2) * scale
	return float(d ** ((n * n + 3 * n) // 2)) * spread * 2.0 ** ((n * n + 16 * n * math.log2(n)) / 2) * scale


def smoothed_bound(config: BoundConfig) -> float:
	if config.sigma is None:
		raise FormulaDomainError("smoothed_bound", "needs sigma > 0")
	return average_bound(config) * _smoothing_factor(config)


def expected_kappa_bound(config: BoundConfig) -> float:
	"""Bound on E_f E_x kappa^n; the smoothed variant when sigma is set"""
	n, d = config.n, config.d
	core = float(d ** ((n * n + n) // 2)) * 2.0 ** ((n * n + 3 * math.log2(n) + 9) / 2) * config.scale ** (n + 1)
	return core * _smoothing_factor(config)


def kappa_tail_bound(config: BoundConfig, t: float) -> float:
	"""Bound on P(kappa^n >= t); the smoothed variant when sigma is set"""
	n = config.n
	if not t >= math.exp(n):
		raise FormulaDomainError("kappa_tail_bound", f"needs t >= e^{n} = {math.exp(n):.6g}, got t = {t}")
	N = weyl_dimension(n, config.d)
	base = config.scale * math.sqrt(N) / math.sqrt(n * (n + 1))
	value = 4 * base ** (n + 1) * math.log(t) ** ((n + 1) / 2) / t ** (1 + 1 / n)
	return value * _smoothing_factor(config)


def fit_loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
	"""Least-squares slope of log y against log x over the pairs with positive y"""
	x = np.asarray(xs, dtype=float)
	y = np.asarray(ys, dtype=float)
	keep = (x > 0) & (y > 0) & np.isfinite(y)
	if keep.sum() < 2:
		raise ValueError("a log-log fit needs at least two positive points")
	slope, _ = np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)
	return float(slope)


def bound_report(config: BoundConfig, tail_t: Sequence[float] = ()) -> Dict[str, Any]:
	"""Every closed-form bound for config, with the configuration and assumptions echoed"""
	report: Dict[str, Any] = {
		"format": BOUND_FORMAT,
		"config": config.model_dump(mode="json"),
		"assumptions": config.assumptions(),
		"weyl_dimension": weyl_dimension(config.n, config.d),
		"average_bound": average_bound(config),
		"expected_kappa_bound": expected_kappa_bound(config),
	}
	if config.sigma is not None:
		report["smoothed_bound"] = smoothed_bound(config)
	report["kappa_tail_bound"] = {repr(float(t)): kappa_tail_bound(config, t) for t in tail_t}
	return report


def analyze_instance(
	f: AffinePolynomial,
	a: float,
	estimator: Optional[EstimatorConfig] = None,
	mode: PredicateMode = PredicateMode.C_PRIME,
	max_depth: int = DEFAULT_MAX_DEPTH,
	regime: Regime = Regime.LIPSCHITZ,
) -> Dict[str, Any]:
	"""E kappa^n, the amortized / closed-form / grid bounds and an actual subdivision run side by side"""
	cfg = estimator or EstimatorConfig()
	expectation = _estimate(f, a, lambda k: k ** f.n, cfg)
	result: Dict[str, Any] = {
		"n": f.n,
		"d": f.d,
		"a": a,
		"regime": regime.value,
		"estimator": cfg.model_dump(mode="json"),
		"expectation_kappa_n": expectation.to_dict(),
		"amortized_cube_bound": amortized_cube_bound(f, a, regime, cfg),
		"condition_cube_bound": condition_cube_bound(f.n, f.d, a, expectation.estimate, regime),
		"worst_case_cube_bound": worst_case_cube_bound(f, a, regime=regime),
	}
	try:
		S = pv_subdivide(f, a, mode, max_depth)
		result["subdivision"] = {"mode": mode.value, **S.stats.to_dict()}
	except MaxDepthExceeded as e:
		logger.warning(f"❌ {e}")
		result["subdivision"] = {"mode": mode.value, "error": str(e)}
	return result
