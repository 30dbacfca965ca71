import numpy as np
import pytest

from src import subdivide
from src.condition import local_size_bound
from src.errors import DimensionMismatchError, MaxDepthExceeded, ZeroPolynomialError
from src.geometry import predicate_C_prime
from src.models import Branch, Cube, PredicateMode
from src.poly import AffinePolynomial
from src.subdivide import extract_segments, pv_subdivide


def _reference_leaves(f, J, depth=0):
	"""Depth-first version of the same routine"""
	ok, branch = predicate_C_prime(f, J)
	if ok:
		return [(J, depth, branch)]
	out = []
	for child in J.children():
		out.extend(_reference_leaves(f, child, depth + 1))
	return out


def test_constant_is_one_leaf(constant):
	S = pv_subdivide(constant, 0.05)
	assert len(S.leaves) == 1
	leaf = S.leaves[0]
	assert leaf.depth == 0 and leaf.branch is Branch.VALUE
	assert leaf.cube == Cube((0.0, 0.0), 0.1)
	assert S.stats.evaluations == 1


def test_matches_depth_first_reference(line, circle):
	for f in (line, circle):
		S = pv_subdivide(f, 1.0)
		expected = _reference_leaves(f, Cube((0.0, 0.0), 2.0))
		assert S.stats.leaf_count == len(expected)
		got = {(leaf.cube, leaf.depth, leaf.branch) for leaf in S.leaves}
		assert got == set(expected)


def test_stats_are_consistent(circle):
	S = pv_subdivide(circle, 1.0, keep_internal=True)
	stats = S.stats
	assert stats.leaf_count == len(S.leaves)
	assert stats.value_branch + stats.gradient_branch == stats.leaf_count
	assert sum(stats.depth_histogram.values()) == stats.leaf_count
	assert stats.max_depth == max(leaf.depth for leaf in S.leaves)
	assert stats.internal_count == len(S.internal)
	assert stats.evaluations == stats.leaf_count + stats.internal_count
	# every split produces 2^n children
	assert stats.leaf_count + stats.internal_count == 1 + 4 * stats.internal_count


def test_singular_zero_hits_max_depth(singular):
	with pytest.raises(MaxDepthExceeded) as info:
		pv_subdivide(singular, 1.0, max_depth=8)
	assert info.value.depth == 8
	assert info.value.failing > 0
	assert isinstance(info.value.example, Cube)


def test_rejects_bad_input(line):
	with pytest.raises(ValueError):
		pv_subdivide(line, 0.0)
	with pytest.raises(ValueError):
		pv_subdivide(line, 1.0, max_depth=0)
	with pytest.raises(ZeroPolynomialError):
		pv_subdivide(AffinePolynomial(2, 2, np.zeros(6)), 1.0)


def test_interval_mode_never_needs_more_leaves(kss):
	for seed in range(5):
		f = kss(2, 3 + seed, seed=seed)
		fine = pv_subdivide(f, 1.0, PredicateMode.C_PRIME)
		coarse = pv_subdivide(f, 1.0, "interval")
		assert coarse.mode is PredicateMode.INTERVAL
		assert coarse.stats.leaf_count <= fine.stats.leaf_count


def test_deterministic(kss):
	f = kss(2, 5, seed=12)
	S1, S2 = pv_subdivide(f, 1.0), pv_subdivide(f, 1.0)
	assert S1.leaves == S2.leaves
	assert S1.stats.to_dict() == S2.stats.to_dict()


def test_threaded_levels_match_serial(kss, monkeypatch):
	monkeypatch.setattr(subdivide, "FRONTIER_CHUNK", 4)
	f = kss(2, 6, seed=40)
	serial = pv_subdivide(f, 1.0)
	threaded = pv_subdivide(f, 1.0, n_jobs=2)
	assert serial.leaves == threaded.leaves


def test_internal_cubes_are_not_below_the_size_bound(kss, rng):
	# a cube that failed C' cannot be smaller than b_f at any of its points
	f = kss(2, 4, seed=17)
	S = pv_subdivide(f, 1.0, keep_internal=True)
	for J in S.internal:
		for x in np.asarray(J.m) + J.w * (rng.uniform(size=(5, 2)) - 0.5):
			assert J.volume >= local_size_bound(f, x)


def test_no_segments_without_real_zeros(unit_sum):
	S = pv_subdivide(unit_sum, 1.0)
	assert len(extract_segments(unit_sum, S)) == 0


def test_segments_of_a_coordinate(line):
	S = pv_subdivide(line, 1.0)
	contours = extract_segments(line, S)
	pts = contours.points()
	assert len(contours) > 0 and not contours.certified
	np.testing.assert_allclose(pts[:, 0], 0.0, atol=1e-12)
	assert pts[:, 1].min() == pytest.approx(-1.0)
	assert pts[:, 1].max() == pytest.approx(1.0)


def test_segments_follow_the_circle(circle):
	S = pv_subdivide(circle, 1.0)
	pts = extract_segments(circle, S).points()
	widest = max(leaf.cube.w for leaf in S.leaves)
	radii = np.linalg.norm(pts, axis=1)
	assert np.all(np.abs(radii - 0.5) <= widest)
	angles = np.arctan2(pts[:, 1], pts[:, 0])
	assert np.histogram(angles, bins=4, range=(-np.pi, np.pi))[0].min() > 0


def test_segments_need_two_variables(kss):
	f = kss(3, 2, seed=0)
	S = pv_subdivide(f, 1.0)
	with pytest.raises(DimensionMismatchError):
		extract_segments(f, S)
