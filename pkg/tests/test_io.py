import json

import pytest
from pydantic import ValidationError

from src.io import (
	load_polynomial,
	load_polynomial_document,
	load_subdivision,
	read_bench_csv,
	render_svg,
	save_polynomial,
	save_subdivision,
)
from src.schemas import PolynomialDocument
from src.subdivide import extract_segments, pv_subdivide
from src.validate import check_tiling


def test_polynomial_file(tmp_path, kss):
	f = kss(2, 4, seed=3)
	path = tmp_path / "f.json"
	save_polynomial(f, str(path), {"model": "kss", "seed": 3})
	assert load_polynomial(str(path)) == f
	doc = load_polynomial_document(str(path))
	assert doc.format == "pv.poly/1"
	assert doc.source["seed"] == 3


def test_homogeneous_document_is_dehomogenized():
	doc = PolynomialDocument(n=1, d=2, homogeneous=True, terms=[{"alpha": [2, 0], "coeff": 1.0}, {"alpha": [0, 2], "coeff": -4.0}])
	f = doc.to_polynomial()
	assert f.evaluate([0.5]) == pytest.approx(0.0)
	assert f.evaluate([0.0]) == pytest.approx(1.0)


def test_repeated_terms_add_up():
	doc = PolynomialDocument(n=1, d=1, terms=[{"alpha": [1], "coeff": 1.0}, {"alpha": [1], "coeff": 2.0}])
	assert doc.to_polynomial().terms() == {(1,): 3.0}


@pytest.mark.parametrize("terms", [
	[{"alpha": [1, 0, 0], "coeff": 1.0}],
	[{"alpha": [3, 0], "coeff": 1.0}],
	[{"alpha": [-1, 0], "coeff": 1.0}],
])
def test_malformed_documents(terms):
	with pytest.raises(ValidationError):
		PolynomialDocument(n=2, d=2, terms=terms)


def test_missing_file(tmp_path):
	with pytest.raises(FileNotFoundError):
		load_polynomial(str(tmp_path / "nope.json"))


def test_subdivision_file(tmp_path, circle):
	S = pv_subdivide(circle, 1.0)
	path = tmp_path / "S.json"
	save_subdivision(S, str(path))
	back = load_subdivision(str(path))
	assert back.leaves == S.leaves
	assert back.stats.to_dict() == S.stats.to_dict()
	assert json.loads(path.read_text())["format"] == "pv.subdivision/1"


def test_leaf_depth_is_derived_from_the_width(tmp_path, circle):
	S = pv_subdivide(circle, 0.75)
	doc = {
		"format": "pv.subdivision/1", "a": 0.75, "n": 2, "mode": "cprime",
		"leaves": [{"m": list(leaf.cube.m), "w": leaf.cube.w, "branch": leaf.branch.value} for leaf in S.leaves],
	}
	path = tmp_path / "bare.json"
	path.write_text(json.dumps(doc))
	back = load_subdivision(str(path))
	assert [leaf.depth for leaf in back.leaves] == [leaf.depth for leaf in S.leaves]
	assert back.stats.depth_histogram == S.stats.depth_histogram
	assert back.stats.value_branch == S.stats.value_branch
	assert check_tiling(back) == []


def test_svg(circle):
	S = pv_subdivide(circle, 1.0)
	contours = extract_segments(circle, S)
	svg = render_svg(S, contours)
	assert 'viewBox="0 0 1024 1024"' in svg
	assert svg.count("<rect") == len(S.leaves)
	assert svg.count("<polyline") == len(contours)


def test_svg_needs_a_plane(kss):
	f = kss(3, 2, seed=0)
	with pytest.raises(ValueError):
		render_svg(pv_subdivide(f, 1.0))


def test_bench_csv_columns(tmp_path):
	path = tmp_path / "bad.csv"
	path.write_text("model,n,d\nkss,2,3\n")
	with pytest.raises(ValueError):
		read_bench_csv(str(path))
