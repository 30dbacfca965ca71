import logging
import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.integrate import trapezoid

from src.amortize import (
	amortized_cube_bound,
	analyze_instance,
	average_bound,
	bound_report,
	condition_cube_bound,
	expectation_kappa_n,
	expected_kappa_bound,
	fit_loglog_slope,
	is_heavy_tailed,
	kappa_tail_bound,
	median_of_means,
	quadrature_kappa_n,
	smoothed_bound,
	worst_case_cube_bound,
)
from src.errors import FormulaDomainError
from src.models import Regime
from src.poly import AffinePolynomial
from src.schemas import BoundConfig, EstimatorConfig
from src.subdivide import pv_subdivide


def test_median_of_means_ignores_one_outlier():
	values = np.ones(1600)
	values[5] = 1e6
	estimate, spread = median_of_means(values, 16)
	assert estimate == 1.0
	assert spread == 0.0


def test_median_of_means_of_few_values():
	assert median_of_means([2.0, 4.0], 16) == (3.0, pytest.approx(1.4826 / math.sqrt(2)))
	with pytest.raises(ValueError):
		median_of_means([])


def test_heavy_tail_flag():
	assert is_heavy_tailed([1.0] * 99 + [1000.0])
	assert not is_heavy_tailed(np.ones(100))


def test_average_bound_example():
	assert average_bound(BoundConfig(n=2, d=2)) == 8_388_608


def test_smoothed_bound_at_unit_sigma():
	cfg = BoundConfig(n=2, d=2, sigma=1.0)
	assert smoothed_bound(cfg) == 8 * average_bound(cfg)
	with pytest.raises(FormulaDomainError):
		smoothed_bound(BoundConfig(n=2, d=2))


def test_smoothed_bound_approaches_average():
	for sigma in (1e-2, 1e-1, 1.0, 10.0):
		assert smoothed_bound(BoundConfig(n=2, d=3, sigma=sigma)) > smoothed_bound(BoundConfig(n=2, d=3, sigma=sigma * 10))
	assert smoothed_bound(BoundConfig(n=2, d=3, sigma=1e12)) == pytest.approx(average_bound(BoundConfig(n=2, d=3)))


def test_average_bound_is_monotone():
	base = average_bound(BoundConfig(n=2, d=4))
	assert average_bound(BoundConfig(n=2, d=5)) > base
	assert average_bound(BoundConfig(n=2, d=4, a=2.0)) > base
	assert average_bound(BoundConfig(n=2, d=4, krho=2.0)) > base
	assert average_bound(BoundConfig(n=2, d=4, a=0.5)) == base


def test_taylor_regime_is_larger():
	assert average_bound(BoundConfig(n=2, d=2, regime="taylor")) == 128 * 2.0 ** 23
	assert average_bound(BoundConfig(n=2, d=2, regime="taylor")) > average_bound(BoundConfig(n=2, d=2))


def test_expected_kappa_bound():
	assert expected_kappa_bound(BoundConfig(n=2, d=2)) == 2048
	assert expected_kappa_bound(BoundConfig(n=2, d=2, sigma=1.0)) == 8 * 2048


def test_tail_bound_domain():
	cfg = BoundConfig(n=2, d=3)
	with pytest.raises(FormulaDomainError):
		kappa_tail_bound(cfg, 7.0)
	assert kappa_tail_bound(cfg, math.exp(2)) > 0
	ts = np.exp(np.linspace(4, 20, 30))
	values = [kappa_tail_bound(cfg, t) for t in ts]
	assert all(a > b for a, b in zip(values, values[1:]))


def test_small_scale_warns(caplog):
	with caplog.at_level(logging.WARNING, logger="src.schemas"):
		cfg = BoundConfig(n=2, d=2, krho=0.4)
	assert "< 1" in caplog.text
	assert cfg.assumptions()["c1c2krho_at_least_one"] is False
	with pytest.raises(ValidationError):
		BoundConfig(n=2, d=2, c1=0.5)


def test_bound_report_keys():
	report = bound_report(BoundConfig(n=2, d=2, sigma=0.5), tail_t=[10.0, 100.0])
	assert report["average_bound"] == 8_388_608
	assert report["weyl_dimension"] == 6
	assert set(report["kappa_tail_bound"]) == {"10.0", "100.0"}
	assert "smoothed_bound" in report


def test_condition_cube_bound_example():
	assert condition_cube_bound(2, 2, 1.0, 1.0) == 8192


def test_expectation_of_a_coordinate(line_1d):
	# kappa is identically 1 for x1 in P_{1,1}
	assert expectation_kappa_n(line_1d, 1.0).estimate == pytest.approx(1.0, rel=1e-12)
	assert quadrature_kappa_n(line_1d, 1.0).estimate == pytest.approx(1.0, rel=1e-12)


def test_monte_carlo_matches_quadrature():
	f = AffinePolynomial.constant(1, 2, 1.0)
	mc = expectation_kappa_n(f, 1.0, samples=4096, seed=3)
	quad = quadrature_kappa_n(f, 1.0)
	assert mc.estimate == pytest.approx(quad.estimate, rel=0.01)
	assert mc.excluded_singular == 0 and not mc.heavy_tail
	# closed form kappa = (1 + x^2) / sqrt(1 + 2 x^2)
	x = np.linspace(-1, 1, 20001)
	exact = trapezoid((1 + x * x) / np.sqrt(1 + 2 * x * x), x) / 2
	assert quad.estimate == pytest.approx(exact, rel=1e-6)


def test_estimates_are_seeded(kss):
	f = kss(2, 3, seed=6)
	assert expectation_kappa_n(f, 1.0, seed=5).to_dict() == expectation_kappa_n(f, 1.0, seed=5).to_dict()


@pytest.mark.parametrize("regime", [Regime.LIPSCHITZ, Regime.TAYLOR])
def test_amortized_bound_equals_closed_form(kss, regime):
	f = kss(2, 3, seed=13)
	quad = EstimatorConfig(quadrature=True, points_per_axis=257)
	expectation = quadrature_kappa_n(f, 1.0, 257).estimate
	assert amortized_cube_bound(f, 1.0, regime, quad) == pytest.approx(condition_cube_bound(2, 3, 1.0, expectation, regime), rel=1e-10)

	mc = EstimatorConfig(samples=2048, seed=1)
	expectation = expectation_kappa_n(f, 1.0, samples=2048, seed=1).estimate
	assert amortized_cube_bound(f, 1.0, regime, mc) == pytest.approx(condition_cube_bound(2, 3, 1.0, expectation, regime), rel=1e-10)


def test_worst_case_bound(kss, singular):
	f = kss(2, 3, seed=13)
	assert 1.0 <= worst_case_cube_bound(f, 1.0, points_per_axis=65) < math.inf
	assert worst_case_cube_bound(singular, 1.0, points_per_axis=5) == math.inf


def _leaf_counts_dominated(kss, count, points_per_axis):
	quad = EstimatorConfig(quadrature=True, points_per_axis=points_per_axis)
	for i in range(count):
		d = 2 + i % 5
		f = kss(2, d, seed=300 + i)
		leaves = pv_subdivide(f, 1.0).stats.leaf_count
		if leaves > amortized_cube_bound(f, 1.0, Regime.LIPSCHITZ, quad):
			return False
	return True


def test_leaf_count_below_amortized_bound(kss):
	assert _leaf_counts_dominated(kss, 3, 2 ** 9)


@pytest.mark.slow
def test_leaf_count_below_amortized_bound_many(kss):
	assert _leaf_counts_dominated(kss, 20, 2 ** 12)


def test_analyze_instance(kss):
	f = kss(2, 3, seed=2)
	result = analyze_instance(f, 1.0, EstimatorConfig(samples=512, seed=0))
	assert result["subdivision"]["leaf_count"] <= result["amortized_cube_bound"]
	assert result["expectation_kappa_n"]["samples"] == 512
	assert result["condition_cube_bound"] > 0


def test_analyze_instance_reports_max_depth(singular):
	result = analyze_instance(singular, 1.0, EstimatorConfig(samples=64, seed=0), max_depth=6)
	assert "error" in result["subdivision"]


def test_loglog_slope():
	x = np.arange(2, 11)
	assert fit_loglog_slope(x, 3 * x ** 2.5) == pytest.approx(2.5)
	with pytest.raises(ValueError):
		fit_loglog_slope([1.0], [1.0])
