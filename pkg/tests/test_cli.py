import json

import pytest

from src import cli
from src.io import load_polynomial, save_json, save_polynomial


def _run(capsys, *argv):
	code = cli.main(["--quiet", *argv])
	return code, capsys.readouterr().out


@pytest.fixture
def poly_file(tmp_path):
	def write(f, name="f.json"):
		path = tmp_path / name
		save_polynomial(f, str(path))
		return str(path)
	return write


def test_sample_writes_polynomial_and_manifest(tmp_path, capsys):
	out = tmp_path / "g.json"
	code, _ = _run(capsys, "sample", "--n", "2", "--d", "3", "--seed", "5", "--out", str(out))
	assert code == cli.EXIT_OK
	f = load_polynomial(str(out))
	assert f.space == (2, 3)
	manifest = json.loads((tmp_path / "g.json.manifest.json").read_text())
	assert manifest["command"] == "sample" and manifest["seed"] == 5
	config = manifest["config"]
	assert (config["n"], config["d"], config["model"]) == (2, 3, "kss")

	again = tmp_path / "again.json"
	argv = ["sample", "--model", config["model"], "--n", str(config["n"]), "--d", str(config["d"]), "--seed", str(manifest["seed"]), "--out", str(again)]
	assert _run(capsys, *argv)[0] == cli.EXIT_OK
	assert load_polynomial(str(again)) == f


def test_smoothed_sample(tmp_path, capsys, poly_file, circle):
	base = poly_file(circle)
	out = tmp_path / "q.json"
	assert _run(capsys, "sample", "--sigma", "0.1", "--base", base, "--seed", "1", "--out", str(out))[0] == cli.EXIT_OK
	assert load_polynomial(str(out)).space == (2, 2)
	assert _run(capsys, "sample", "--sigma", "0.1", "--out", str(out))[0] == cli.EXIT_INPUT


def test_mesh(tmp_path, capsys, poly_file, constant, circle):
	code, out = _run(capsys, "mesh", "--poly", poly_file(constant), "--a", "0.05")
	assert code == cli.EXIT_OK
	assert json.loads(out)["stats"]["leaf_count"] == 1

	target, svg = tmp_path / "S.json", tmp_path / "S.svg"
	code, out = _run(capsys, "mesh", "--poly", poly_file(circle), "--a", "1", "--out", str(target), "--svg", str(svg), "--check")
	assert code == cli.EXIT_OK
	assert json.loads(out)["outputs"] == [str(target), str(svg)]
	assert "<polyline" in svg.read_text()
	assert (tmp_path / "S.json.manifest.json").exists()


def test_mesh_max_depth(capsys, poly_file, singular):
	code, _ = _run(capsys, "mesh", "--poly", poly_file(singular), "--a", "1", "--max-depth", "10")
	assert code == cli.EXIT_MAX_DEPTH


def test_kappa(capsys, poly_file, line_1d, singular):
	code, out = _run(capsys, "kappa", "--poly", poly_file(line_1d), "--point=0")
	assert code == cli.EXIT_OK
	result = json.loads(out)
	assert result["kappa_direct"] == pytest.approx(1.0)
	assert result["kappa_projection"] == pytest.approx(1.0)

	code, out = _run(capsys, "kappa", "--poly", poly_file(singular), "--point=0,0")
	assert code == cli.EXIT_SINGULAR
	assert json.loads(out)["kappa_direct"] == "singular"


def test_kappa_rejects_a_wrong_point(capsys, poly_file, circle):
	assert _run(capsys, "kappa", "--poly", poly_file(circle), "--point=0,0,0")[0] == cli.EXIT_INPUT


def test_bound(capsys):
	code, out = _run(capsys, "bound", "--n", "2", "--d", "2")
	assert code == cli.EXIT_OK
	assert json.loads(out)["average_bound"] == 8_388_608

	code, out = _run(capsys, "bound", "--n", "2", "--d", "2", "--sigma", "1", "--t", "10")
	report = json.loads(out)
	assert report["smoothed_bound"] == 8 * 8_388_608
	assert "10.0" in report["kappa_tail_bound"]

	assert _run(capsys, "bound", "--n", "2", "--d", "2", "--t", "1")[0] == cli.EXIT_INPUT
	assert _run(capsys, "bound", "--n", "2", "--d", "2", "--c1", "0.5")[0] == cli.EXIT_INPUT


def test_bound_from_model(capsys):
	_, out = _run(capsys, "bound", "--n", "2", "--d", "2", "--model", "weyl")
	assert json.loads(out)["config"]["krho"] == pytest.approx(0.5)


def test_analyze(capsys, poly_file, circle):
	code, out = _run(capsys, "analyze", "--poly", poly_file(circle), "--samples", "256")
	assert code == cli.EXIT_OK
	result = json.loads(out)
	assert result["subdivision"]["leaf_count"] <= result["amortized_cube_bound"]


def test_unsupported_range(tmp_path, capsys):
	path = tmp_path / "big.json"
	save_json({"format": "pv.poly/1", "n": 5, "d": 1, "terms": [{"alpha": [1, 0, 0, 0, 0], "coeff": 1.0}]}, str(path))
	assert _run(capsys, "mesh", "--poly", str(path), "--a", "1")[0] == cli.EXIT_INPUT
	assert _run(capsys, "sample", "--n", "2", "--d", "21", "--out", str(tmp_path / "x.json"))[0] == cli.EXIT_INPUT


def test_malformed_input(tmp_path, capsys):
	path = tmp_path / "broken.json"
	path.write_text("{not json")
	assert _run(capsys, "mesh", "--poly", str(path), "--a", "1")[0] == cli.EXIT_INPUT
	assert _run(capsys, "mesh", "--poly", str(tmp_path / "missing.json"), "--a", "1")[0] == cli.EXIT_INPUT


def test_parsers():
	assert cli.parse_point("-0.5, 1") == [-0.5, 1.0]
	assert cli.parse_d_range("2:10") == (2, 10)
	assert cli.parse_d_range("4") == (4, 4)


def test_svg_only_mesh_writes_a_manifest(tmp_path, capsys, poly_file, circle):
	svg = tmp_path / "only.svg"
	code, out = _run(capsys, "mesh", "--poly", poly_file(circle), "--a", "1", "--svg", str(svg))
	assert code == cli.EXIT_OK
	assert json.loads(out)["outputs"] == [str(svg)]
	manifest = json.loads((tmp_path / "only.svg.manifest.json").read_text())
	assert manifest["command"] == "mesh" and manifest["outputs"] == [str(svg)]


def test_analyze_manifest_records_the_estimator(capsys, poly_file, circle):
	_, out = _run(capsys, "analyze", "--poly", poly_file(circle), "--samples", "128", "--seed", "3")
	config = json.loads(out)["manifest"]["config"]
	assert config["samples"] == 128 and config["seed"] == 3
	assert config["quadrature"] is False
	assert "points_per_axis" in config
