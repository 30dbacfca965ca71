import math
from collections import defaultdict
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .geometry import c_prime_batch, interval_batch, predicate_batch
from .models import Branch, PredicateMode, Subdivision
from .poly import AffinePolynomial

VOLUME_RTOL = 1e-9
ALIGNMENT_TOL = 1e-6
EPS = float(np.finfo(float).eps)


def alignment_tolerance(k: int) -> float:
	"""Allowed distance, in cell units, between a depth-k midpoint and its grid position.

	Rounding in a midpoint of magnitude up to a is about eps * a, which is
	2^k * eps cells at width 2a * 2^-k; the (k + 4) factor covers midpoints
	built by k successive halvings.
	"""
	return ALIGNMENT_TOL + (k + 4) * 2.0 ** k * EPS


def _address(m: Tuple[float, ...], w: float, a: float, k: int) -> Optional[Tuple[int, ...]]:
	"""Integer grid position of a depth-k cube of width w inside [-a, a]^n, or None if off-grid"""
	cells = [(c + a) / w - 0.5 for c in m]
	idx = tuple(int(round(c)) for c in cells)
	tol = alignment_tolerance(k)
	if any(abs(c - j) > tol for c, j in zip(cells, idx)):
		return None
	return idx


def check_tiling(S: Subdivision) -> List[Dict[str, Any]]:
	reports: List[Dict[str, Any]] = []
	root = 2.0 * S.a
	expected = root ** S.n
	total = math.fsum(leaf.cube.volume for leaf in S.leaves)
	if abs(total - expected) > VOLUME_RTOL * expected:
		reports.append({"level": "error", "check": "tiling", "message": f"leaf volumes sum to {total!r}, region volume is {expected!r}"})

	addresses: Dict[Tuple[int, Tuple[int, ...]], int] = {}
	for i, leaf in enumerate(S.leaves):
		cube = leaf.cube
		if cube.n != S.n:
			reports.append({"level": "error", "check": "dimension", "leaf": i, "message": f"cube has dimension {cube.n}, expected {S.n}"})
			continue
		k = int(round(math.log2(root / cube.w)))
		if k < 0 or root * 2.0 ** -k != cube.w:
			reports.append({"level": "error", "check": "dyadic", "leaf": i, "message": f"width {cube.w!r} is not 2a * 2^-k"})
			continue
		if k != leaf.depth:
			reports.append({"level": "warning", "check": "depth", "leaf": i, "message": f"recorded depth {leaf.depth}, width implies {k}"})
		idx = _address(cube.m, cube.w, S.a, k)
		if idx is None:
			reports.append({"level": "error", "check": "alignment", "leaf": i, "message": f"midpoint {cube.m} is off the dyadic grid"})
			continue
		if any(j < 0 or j >= 2 ** k for j in idx):
			reports.append({"level": "error", "check": "region", "leaf": i, "message": f"cube at {cube.m} lies outside [-a, a]^n"})
			continue
		if (k, idx) in addresses:
			reports.append({"level": "error", "check": "disjoint", "leaf": i, "message": f"duplicates leaf {addresses[(k, idx)]}"})
			continue
		addresses[(k, idx)] = i

	for (k, idx), i in addresses.items():
		level, cell = k, idx
		while level > 0:
			level, cell = level - 1, tuple(j // 2 for j in cell)
			if (level, cell) in addresses:
				reports.append({"level": "error", "check": "disjoint", "leaf": i, "message": f"overlaps leaf {addresses[(level, cell)]}"})
				break
	return reports


def check_predicates(S: Subdivision, f: AffinePolynomial) -> List[Dict[str, Any]]:
	"""Re-run the predicate of S.mode on every leaf; C' leaves must also pass C."""
	reports: List[Dict[str, Any]] = []
	by_width: Dict[float, List[int]] = defaultdict(list)
	for i, leaf in enumerate(S.leaves):
		by_width[leaf.cube.w].append(i)
	for w, members in sorted(by_width.items(), reverse=True):
		mids = np.array([S.leaves[i].cube.m for i in members])
		value_ok, gradient_ok = predicate_batch(f, mids, w, S.mode)
		if S.mode is PredicateMode.C_PRIME:
			cv, cg = value_ok, gradient_ok
			iv, ig = interval_batch(f, mids, w)
		else:
			iv, ig = value_ok, gradient_ok
			cv, cg = c_prime_batch(f, mids, w)
		for row, i in enumerate(members):
			leaf = S.leaves[i]
			if not (value_ok[row] or gradient_ok[row]):
				reports.append({"level": "error", "check": "predicate", "leaf": i, "message": f"cube at {leaf.cube.m} (w={w!r}) fails {S.mode.value}"})
				continue
			recomputed = Branch.VALUE if value_ok[row] else Branch.GRADIENT
			if recomputed is not leaf.branch:
				reports.append({"level": "warning", "check": "branch", "leaf": i, "message": f"recorded {leaf.branch.value}, recomputed {recomputed.value}"})
			if (cv[row] or cg[row]) and not (iv[row] or ig[row]):
				reports.append({"level": "error", "check": "implication", "leaf": i, "message": f"C' holds but C fails at {leaf.cube.m}"})
	return reports


def verify_subdivision(S: Subdivision, f: AffinePolynomial) -> List[Dict[str, Any]]:
	"""Independent re-check of a subdivision; violations are returned, never raised."""
	if f.n != S.n:
		return [{"level": "error", "check": "dimension", "message": f"polynomial has n = {f.n}, subdivision n = {S.n}"}]
	reports = check_tiling(S)
	reports.extend(check_predicates(S, f))
	stats = S.stats
	if stats.leaf_count != len(S.leaves):
		reports.append({"level": "warning", "check": "stats", "message": f"stats report {stats.leaf_count} leaves, found {len(S.leaves)}"})
	return reports


def print_report(items: List[Dict[str, Any]]):
	if not items:
		print("✅ No issues found.")
		return
	for i in items:
		lvl = i.get("level", "info").upper()
		detail = {k: v for k, v in i.items() if k != "level"}
		print(f"[{lvl}] {detail}")


if __name__ == "__main__":
	import argparse
	import sys

	from .io import load_polynomial, load_subdivision

	parser = argparse.ArgumentParser(description="Re-check a saved subdivision against its polynomial")
	parser.add_argument("--poly", required=True)
	parser.add_argument("--subdivision", required=True)
	args = parser.parse_args()
	report = verify_subdivision(load_subdivision(args.subdivision), load_polynomial(args.poly))
	print_report(report)
	sys.exit(1 if any(r["level"] == "error" for r in report) else 0)
