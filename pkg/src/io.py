import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd
from pydantic import BaseModel

from .models import ContourSet, Subdivision
from .poly import AffinePolynomial
from .schemas import PolynomialDocument, SubdivisionDocument

logger = logging.getLogger(__name__)

BENCH_COLUMNS = [
	"model", "n", "d", "a", "trial", "seed",
	"leaf_count", "depth_max", "value_branch", "gradient_branch", "runtime_ms",
]
SVG_SIZE = 1024


def _read_text(path: str, what: str) -> str:
	p = Path(path)
	if not p.exists():
		raise FileNotFoundError(f"{what} not found: {path}")
	return p.read_text(encoding="utf-8")


def _write_text(path: str, text: str):
	p = Path(path)
	p.parent.mkdir(parents=True, exist_ok=True)
	p.write_text(text, encoding="utf-8")


def save_json(obj: Any, path: str):
	if isinstance(obj, BaseModel):
		obj = obj.model_dump(mode="json")
	_write_text(path, json.dumps(obj, indent=2, sort_keys=False) + "\n")


def load_polynomial_document(path: str) -> PolynomialDocument:
	return PolynomialDocument.model_validate_json(_read_text(path, "Polynomial JSON"))


def load_polynomial(path: str) -> AffinePolynomial:
	return load_polynomial_document(path).to_polynomial()


def save_polynomial(f: AffinePolynomial, path: str, source: Optional[Dict[str, Any]] = None):
	save_json(PolynomialDocument.from_polynomial(f, source), path)


def load_subdivision(path: str) -> Subdivision:
	return SubdivisionDocument.model_validate_json(_read_text(path, "Subdivision JSON")).to_subdivision()


def save_subdivision(S: Subdivision, path: str):
	save_json(SubdivisionDocument.from_subdivision(S), path)
	logger.info(f"📦 subdivision with {len(S.leaves)} leaves written to {path}")


def write_bench_csv(df: pd.DataFrame, path: str):
	p = Path(path)
	p.parent.mkdir(parents=True, exist_ok=True)
	df.to_csv(p, index=False, columns=BENCH_COLUMNS, lineterminator="\n")


def read_bench_csv(path: str) -> pd.DataFrame:
	p = Path(path)
	if not p.exists():
		raise FileNotFoundError(f"Bench CSV not found: {path}")
	df = pd.read_csv(p, dtype={"trial": str})
	missing = [c for c in BENCH_COLUMNS if c not in df.columns]
	if missing:
		raise ValueError(f"Bench CSV {path} lacks columns {missing}")
	return df


def render_svg(S: Subdivision, contours: Optional[ContourSet] = None, size: int = SVG_SIZE) -> str:
	"""Leaves as rectangles and contour segments as lines, [-a, a]^2 mapped onto a size x size viewport"""
	if S.n != 2:
		raise ValueError(f"SVG output needs n = 2, got n = {S.n}")
	scale = size / (2 * S.a)

	def sx(x: float) -> float:
		return (x + S.a) * scale

	def sy(y: float) -> float:
		return (S.a - y) * scale

	colors = {"value": "#dbe9f6", "gradient": "#fbe3c9"}
	lines = [
		f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
		'<g stroke="#5f6b7a" stroke-width="0.5">',
	]
	for leaf in S.leaves:
		(x0, y0), w = leaf.cube.lower, leaf.cube.w
		lines.append(
			f'<rect x="{sx(x0):.3f}" y="{sy(y0 + w):.3f}" width="{w * scale:.3f}" height="{w * scale:.3f}" '
			f'fill="{colors[leaf.branch.value]}"/>'
		)
	lines.append("</g>")
	if contours is not None and len(contours):
		lines.append('<g stroke="#c0392b" stroke-width="1.5" fill="none">')
		for (x0, y0), (x1, y1) in contours.segments:
			lines.append(f'<polyline points="{sx(x0):.3f},{sy(y0):.3f} {sx(x1):.3f},{sy(y1):.3f}"/>')
		lines.append("</g>")
	lines.append("</svg>")
	return "\n".join(lines) + "\n"


def write_svg(S: Subdivision, path: str, contours: Optional[ContourSet] = None):
	_write_text(path, render_svg(S, contours))
	logger.info(f"📦 SVG written to {path}")
