"""
Adaptive subdivision of [-a, a]^n driven by the termination predicates.

The frontier is processed level by level: every cube of one level has width
2a * 2^-k, so the predicate kernels run on the whole level at once. Cubes
that pass are frozen as leaves, the others are split into 2^n children in
lexicographic orthant order.
"""

import logging
from itertools import product
from typing import List, Optional, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from .errors import DimensionMismatchError, MaxDepthExceeded
from .geometry import predicate_batch, require_nonzero
from .models import Branch, ContourSet, Cube, Leaf, PredicateMode, Subdivision, SubdivisionStats
from .poly import AffinePolynomial

logger = logging.getLogger(__name__)

DEFAULT_MAX_DEPTH = 40
DEFAULT_MODE = PredicateMode.C_PRIME

# Frontier rows handed to one worker
FRONTIER_CHUNK = 8192


def _evaluate_level(f: AffinePolynomial, mids: np.ndarray, w: float, mode: PredicateMode, n_jobs: int) -> Tuple[np.ndarray, np.ndarray]:
	if n_jobs == 1 or len(mids) <= FRONTIER_CHUNK:
		return predicate_batch(f, mids, w, mode)
	chunks = [mids[i:i + FRONTIER_CHUNK] for i in range(0, len(mids), FRONTIER_CHUNK)]
	results = Parallel(n_jobs=n_jobs, prefer="threads")(
		delayed(predicate_batch)(f, chunk, w, mode) for chunk in chunks
	)
	return np.concatenate([r[0] for r in results]), np.concatenate([r[1] for r in results])


def child_steps(n: int) -> np.ndarray:
	"""Grid offsets of the 2^n children inside their parent, shape (2^n, n)"""
	return np.array(list(product((0, 1), repeat=n)), dtype=np.int64)


def grid_midpoints(idx: np.ndarray, w: float, a: float) -> np.ndarray:
	"""Midpoints -a + (2j + 1) w/2 of the width-w cubes at integer grid positions idx"""
	return -a + (2 * idx + 1).astype(float) * (w / 2)


def pv_subdivide(
	f: AffinePolynomial,
	a: float,
	mode: Union[PredicateMode, str] = DEFAULT_MODE,
	max_depth: int = DEFAULT_MAX_DEPTH,
	keep_internal: bool = False,
	n_jobs: int = 1,
) -> Subdivision:
	"""Subdivide [-a, a]^n until every cube satisfies the predicate selected by mode.

	Raises MaxDepthExceeded when cubes of depth max_depth still fail, which
	happens around singular zeros of f.
	"""
	require_nonzero(f, "pv_subdivide")
	if not a > 0:
		raise ValueError(f"region half-width must be positive, got a = {a}")
	if max_depth < 1:
		raise ValueError(f"max_depth must be at least 1, got {max_depth}")
	mode = PredicateMode(mode)
	n = f.n
	if n_jobs != 1:
		f.prepare()

	stats = SubdivisionStats()
	leaves: List[Leaf] = []
	internal: Optional[List[Cube]] = [] if keep_internal else None

	idx = np.zeros((1, n), dtype=np.int64)
	w = 2.0 * a
	steps = child_steps(n)
	for depth in range(max_depth + 1):
		mids = grid_midpoints(idx, w, a)
		value_ok, gradient_ok = _evaluate_level(f, mids, w, mode, n_jobs)
		stats.evaluations += len(mids)
		passed = value_ok | gradient_ok
		for i in np.flatnonzero(passed):
			branch = Branch.VALUE if value_ok[i] else Branch.GRADIENT
			leaves.append(Leaf(Cube(tuple(mids[i]), w), depth, branch))
		npassed = int(passed.sum())
		if npassed:
			stats.depth_histogram[depth] = npassed
			stats.max_depth = depth
		failing = mids[~passed]
		logger.debug(f"🔄 depth {depth}: {len(mids)} cubes, {npassed} frozen, {len(failing)} split")
		if len(failing) == 0:
			break
		if depth == max_depth:
			raise MaxDepthExceeded(depth, len(failing), Cube(tuple(failing[0]), w))
		if internal is not None:
			internal.extend(Cube(tuple(m), w) for m in failing)
		stats.internal_count += len(failing)
		idx = (2 * idx[~passed][:, np.newaxis, :] + steps[np.newaxis, :, :]).reshape(-1, n)
		w = w / 2

	stats.leaf_count = len(leaves)
	stats.value_branch = sum(1 for leaf in leaves if leaf.branch is Branch.VALUE)
	stats.gradient_branch = stats.leaf_count - stats.value_branch
	logger.debug(f"✅ subdivision done: {stats.leaf_count} leaves, max depth {stats.max_depth}")
	return Subdivision(a=float(a), n=n, mode=mode, leaves=leaves, stats=stats, internal=internal)


# Corners are visited counter-clockwise starting at the lower-left one; the
# case index reads the corner signs (positive = 1) as a 4-bit number, corner 0
# first. Ambiguous saddles (0101, 1010) carry both pairings and are resolved by
# the sign at the cube center.
_SQUARE_CASES = {
	0b0001: [((0, 3), (2, 3))],
	0b0010: [((1, 2), (2, 3))],
	0b0011: [((0, 3), (1, 2))],
	0b0100: [((0, 1), (1, 2))],
	0b0110: [((0, 1), (2, 3))],
	0b0111: [((0, 1), (0, 3))],
	0b1000: [((0, 1), (0, 3))],
	0b1001: [((0, 1), (2, 3))],
	0b1011: [((0, 1), (1, 2))],
	0b1100: [((0, 3), (1, 2))],
	0b1101: [((1, 2), (2, 3))],
	0b1110: [((0, 3), (2, 3))],
}
_SADDLES = {
	# (center not positive, center positive)
	0b0101: ([((0, 1), (1, 2)), ((0, 3), (2, 3))], [((0, 1), (0, 3)), ((1, 2), (2, 3))]),
	0b1010: ([((0, 1), (0, 3)), ((1, 2), (2, 3))], [((0, 1), (1, 2)), ((0, 3), (2, 3))]),
}


def _crossing(p0: np.ndarray, p1: np.ndarray, v0: float, v1: float) -> Tuple[float, float]:
	t = min(max(v0 / (v0 - v1), 0.0), 1.0)
	p = p0 * (1 - t) + t * p1
	return (float(p[0]), float(p[1]))


def extract_segments(f: AffinePolynomial, S: Subdivision) -> ContourSet:
	"""Marching-squares segments of the zero set of f over the leaves of S (n = 2).

	Intended for display: the segments are not certified to be isotopic to the curve.
	"""
	if S.n != 2 or f.n != 2:
		raise DimensionMismatchError(2, S.n if S.n != 2 else f.n, what="subdivision")
	if not S.leaves:
		return ContourSet(segments=[])
	mids = np.array([leaf.cube.m for leaf in S.leaves])
	half = np.array([leaf.cube.w / 2 for leaf in S.leaves])[:, np.newaxis]
	signs = np.array([(-1, -1), (1, -1), (1, 1), (-1, 1)], dtype=float)
	corners = mids[:, np.newaxis, :] + half[:, np.newaxis, :] * signs[np.newaxis, :, :]
	values = f.evaluate_many(corners.reshape(-1, 2)).reshape(-1, 4)
	weights = np.array([8, 4, 2, 1])
	cases = ((values > 0).astype(int) * weights).sum(axis=1)

	segments = []
	for k in np.flatnonzero((cases != 0) & (cases != 15)):
		case = int(cases[k])
		if case in _SADDLES:
			edges = _SADDLES[case][int(f.evaluate(mids[k]) > 0)]
		else:
			edges = _SQUARE_CASES[case]
		v, c = values[k], corners[k]
		for (i0, i1), (j0, j1) in edges:
			segments.append((_crossing(c[i0], c[i1], v[i0], v[i1]), _crossing(c[j0], c[j1], v[j0], v[j1])))
	logger.debug(f"📦 {len(segments)} contour segment(s) from {len(S.leaves)} leaves")
	return ContourSet(segments=segments)
