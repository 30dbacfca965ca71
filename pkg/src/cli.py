"""
Command-line surface: python main.py <command> [flags]

  mesh     subdivide [-a, a]^n for a polynomial file (JSON, optional SVG for n = 2)
  kappa    local condition number at one point, computed two ways
  analyze  E kappa^n, amortized / closed-form / grid bounds and an actual run
  sample   draw a random (optionally smoothed) polynomial
  bound    evaluate the closed-form complexity bounds
  bench    cube-count benchmark over a degree range, written as CSV

Exit codes: 0 success, 2 invalid input or I/O failure, 3 subdivision hit
max depth, 4 singular point.
"""

import argparse
import json
import logging
import sys
import time
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from . import __version__
from .amortize import analyze_instance, bound_report
from .bench import run_bench
from .condition import condition_sample, is_singular, local_size_bound
from .errors import MaxDepthExceeded, PVError, UnsupportedRangeError
from .io import load_polynomial, save_json, save_polynomial, save_subdivision, write_bench_csv, write_svg
from .models import DobroSpec, Model, PredicateMode, Regime, SmoothingSpec
from .randpoly import krho, sample_dobro_affine, smoothed_instance
from .schemas import BENCH_FORMAT, BenchConfig, BoundConfig, EstimatorConfig, MeshConfig, RunManifest
from .subdivide import DEFAULT_MAX_DEPTH, extract_segments, pv_subdivide
from .validate import verify_subdivision

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MAX_DEPTH = 3
EXIT_SINGULAR = 4

MAX_N = 4
MAX_D = 20

_handler: Optional[logging.Handler] = None


def setup_logging(verbose: bool = False, quiet: bool = False):
	"""One stderr handler on the root logger; stdout stays reserved for results."""
	global _handler
	root = logging.getLogger()
	if _handler is not None:
		root.removeHandler(_handler)
	_handler = logging.StreamHandler(sys.stderr)
	_handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
	root.addHandler(_handler)
	root.setLevel(logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO)


def check_range(n: int, d: int):
	if n > MAX_N or d > MAX_D:
		raise UnsupportedRangeError(n, d, MAX_N, MAX_D)


def parse_point(text: str) -> List[float]:
	return [float(v) for v in text.replace(" ", "").split(",") if v]


def parse_d_range(text: str):
	lo, sep, hi = text.partition(":")
	if not sep:
		return int(lo), int(lo)
	return int(lo), int(hi)


def _manifest(command: str, config: Dict[str, Any], seed: Optional[int], started: datetime, t0: float, outputs: Sequence[str] = (), output_format: Optional[str] = None) -> RunManifest:
	return RunManifest(
		command=command,
		config=config,
		seed=seed,
		version=__version__,
		started_at=started,
		elapsed_s=round(time.perf_counter() - t0, 6),
		outputs=list(outputs),
		output_format=output_format,
	)


def _emit(obj: Dict[str, Any]):
	print(json.dumps(obj, indent=2))


def cmd_mesh(args) -> int:
	started, t0 = datetime.now(timezone.utc), time.perf_counter()
	cfg = MeshConfig(poly=args.poly, a=args.a, mode=args.mode, max_depth=args.max_depth, out=args.out, svg=args.svg, n_jobs=args.n_jobs)
	f = load_polynomial(cfg.poly)
	check_range(f.n, f.d)
	logger.info(f"🔄 subdividing [-{cfg.a}, {cfg.a}]^{f.n} for a degree-{f.d} polynomial ({cfg.mode.value})")
	S = pv_subdivide(f, cfg.a, cfg.mode, cfg.max_depth, n_jobs=cfg.n_jobs)
	logger.info(f"✅ {S.stats.leaf_count} leaves, max depth {S.stats.max_depth}")
	if args.check:
		problems = [r for r in verify_subdivision(S, f) if r["level"] == "error"]
		if problems:
			logger.error(f"❌ {len(problems)} verification error(s), first: {problems[0]}")
			return EXIT_INPUT
	outputs = []
	if cfg.out:
		save_subdivision(S, cfg.out)
		outputs.append(cfg.out)
	if cfg.svg:
		if f.n != 2:
			logger.warning(f"⚠️ SVG needs n = 2, skipping (n = {f.n})")
		else:
			write_svg(S, cfg.svg, extract_segments(f, S))
			outputs.append(cfg.svg)
	manifest = _manifest("mesh", cfg.model_dump(mode="json"), None, started, t0, outputs)
	for path in outputs:
		save_json(manifest, f"{path}.manifest.json")
	_emit({"stats": S.stats.to_dict(), "outputs": outputs})
	return EXIT_OK


def cmd_kappa(args) -> int:
	started, t0 = datetime.now(timezone.utc), time.perf_counter()
	f = load_polynomial(args.poly)
	check_range(f.n, f.d)
	sample = condition_sample(f, parse_point(args.point))
	singular = is_singular(sample.kappa_direct) or is_singular(sample.kappa_projection)

	def shown(k: float):
		return "singular" if is_singular(k) else k

	result: Dict[str, Any] = {"x": list(sample.x)}
	if args.method in ("direct", "both"):
		result["kappa_direct"] = shown(sample.kappa_direct)
	if args.method in ("projection", "both"):
		result["kappa_projection"] = shown(sample.kappa_projection)
	if args.method == "both" and not singular:
		result["relative_gap"] = sample.relative_gap
	result["f_hat"] = sample.f_hat_value
	result["grad_hat_norm"] = sample.grad_hat_norm
	result["local_size_bound"] = local_size_bound(f, sample.x)
	result["manifest"] = _manifest("kappa", {"poly": args.poly, "point": args.point, "method": args.method}, None, started, t0).model_dump(mode="json")
	_emit(result)
	if singular:
		logger.error(f"❌ singular point {list(sample.x)}")
		return EXIT_SINGULAR
	return EXIT_OK


def cmd_analyze(args) -> int:
	started, t0 = datetime.now(timezone.utc), time.perf_counter()
	f = load_polynomial(args.poly)
	check_range(f.n, f.d)
	estimator = EstimatorConfig(samples=args.samples, seed=args.seed, quadrature=args.quadrature, points_per_axis=args.points_per_axis)
	result = analyze_instance(f, args.a, estimator, PredicateMode(args.mode), args.max_depth, Regime(args.regime))
	config = {"poly": args.poly, "a": args.a, "mode": args.mode, "max_depth": args.max_depth, "regime": args.regime}
	config.update(estimator.model_dump(mode="json"))
	result["manifest"] = _manifest("analyze", config, args.seed, started, t0).model_dump(mode="json")
	_emit(result)
	return EXIT_OK


def cmd_sample(args) -> int:
	started, t0 = datetime.now(timezone.utc), time.perf_counter()
	spec = DobroSpec(Model(args.model), args.p)
	source: Dict[str, Any] = {"model": spec.model.value, "p": spec.p, "seed": args.seed}
	if args.sigma is not None:
		if not args.base:
			raise ValueError("--sigma needs --base PATH (the polynomial to perturb)")
		base = load_polynomial(args.base)
		check_range(base.n, base.d)
		source.update({"n": base.n, "d": base.d})
		f = smoothed_instance(SmoothingSpec(base, args.sigma, spec), args.seed)
		source.update({"sigma": args.sigma, "base": args.base})
	else:
		check_range(args.n, args.d)
		source.update({"n": args.n, "d": args.d})
		f = sample_dobro_affine(spec, args.n, args.d, args.seed)
	save_polynomial(f, args.out, source)
	save_json(_manifest("sample", source, args.seed, started, t0, [args.out]), f"{args.out}.manifest.json")
	logger.info(f"✅ n={f.n} d={f.d} polynomial written to {args.out}")
	return EXIT_OK


def cmd_bound(args) -> int:
	started, t0 = datetime.now(timezone.utc), time.perf_counter()
	product = args.krho
	if product is None:
		product = krho(DobroSpec(Model(args.model), args.p)) if args.model else 1.0
	config = BoundConfig(n=args.n, d=args.d, a=args.a, krho=product, c1=args.c1, c2=args.c2, sigma=args.sigma, regime=args.regime)
	report = bound_report(config, args.t or [])
	report["manifest"] = _manifest("bound", config.model_dump(mode="json"), None, started, t0).model_dump(mode="json")
	_emit(report)
	return EXIT_OK


def cmd_bench(args) -> int:
	started, t0 = datetime.now(timezone.utc), time.perf_counter()
	lo, hi = parse_d_range(args.d_range)
	cfg = BenchConfig(
		model=args.model, p=args.p, n=args.n, d_lo=lo, d_hi=hi, trials=args.trials, seed=args.seed,
		a=args.a, mode=args.mode, max_depth=args.max_depth, csv=args.csv, timing=args.timing, n_jobs=args.n_jobs,
	)
	check_range(cfg.n, cfg.d_hi)
	df = run_bench(cfg)
	write_bench_csv(df, cfg.csv)
	save_json(_manifest("bench", cfg.model_dump(mode="json"), cfg.seed, started, t0, [cfg.csv], BENCH_FORMAT), f"{cfg.csv}.manifest.json")
	logger.info(f"📦 {len(df)} rows written to {cfg.csv}")
	return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
	parser = argparse.ArgumentParser(prog="pv", description="Adaptive subdivision with condition-number instrumentation")
	parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
	parser.add_argument("--verbose", action="store_true", help="debug logging")
	parser.add_argument("--quiet", action="store_true", help="warnings and errors only")
	sub = parser.add_subparsers(dest="command", required=True)

	modes = [m.value for m in PredicateMode]
	models = [m.value for m in Model]
	regimes = [r.value for r in Regime]

	p = sub.add_parser("mesh", help="subdivide a region for a polynomial file")
	p.add_argument("--poly", required=True)
	p.add_argument("--a", type=float, required=True)
	p.add_argument("--mode", choices=modes, default=PredicateMode.C_PRIME.value)
	p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
	p.add_argument("--out")
	p.add_argument("--svg")
	p.add_argument("--n-jobs", type=int, default=1)
	p.add_argument("--check", action="store_true", help="re-verify the subdivision before writing it")
	p.set_defaults(handler=cmd_mesh)

	p = sub.add_parser("kappa", help="local condition number at a point")
	p.add_argument("--poly", required=True)
	p.add_argument("--point", required=True, help="comma separated coordinates, e.g. --point=-0.5,1")
	p.add_argument("--method", choices=["direct", "projection", "both"], default="both")
	p.set_defaults(handler=cmd_kappa)

	p = sub.add_parser("analyze", help="expected condition and cube-count bounds for one polynomial")
	p.add_argument("--poly", required=True)
	p.add_argument("--a", type=float, default=1.0)
	p.add_argument("--samples", type=int, default=4096)
	p.add_argument("--seed", type=int, default=0)
	p.add_argument("--quadrature", action="store_true", help="tensor trapezoid instead of Monte Carlo (n <= 2)")
	p.add_argument("--points-per-axis", type=int, default=2 ** 12)
	p.add_argument("--mode", choices=modes, default=PredicateMode.C_PRIME.value)
	p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
	p.add_argument("--regime", choices=regimes, default=Regime.LIPSCHITZ.value)
	p.set_defaults(handler=cmd_analyze)

	p = sub.add_parser("sample", help="draw a random polynomial")
	p.add_argument("--model", choices=models, default=Model.KSS.value)
	p.add_argument("--p", type=float)
	p.add_argument("--n", type=int, default=2)
	p.add_argument("--d", type=int, default=3)
	p.add_argument("--seed", type=int, default=0)
	p.add_argument("--sigma", type=float)
	p.add_argument("--base")
	p.add_argument("--out", required=True)
	p.set_defaults(handler=cmd_sample)

	p = sub.add_parser("bound", help="closed-form complexity bounds")
	p.add_argument("--n", type=int, required=True)
	p.add_argument("--d", type=int, required=True)
	p.add_argument("--a", type=float, default=1.0)
	p.add_argument("--krho", type=float, help="K*rho of the coefficient law (default 1, or taken from --model)")
	p.add_argument("--model", choices=models)
	p.add_argument("--p", type=float)
	p.add_argument("--c1", type=float, default=1.0)
	p.add_argument("--c2", type=float, default=1.0)
	p.add_argument("--sigma", type=float)
	p.add_argument("--regime", choices=regimes, default=Regime.LIPSCHITZ.value)
	p.add_argument("--t", type=float, action="append", help="tail threshold (repeatable)")
	p.set_defaults(handler=cmd_bound)

	p = sub.add_parser("bench", help="cube-count benchmark over a degree range")
	p.add_argument("--model", choices=models, default=Model.KSS.value)
	p.add_argument("--p", type=float)
	p.add_argument("--n", type=int, default=2)
	p.add_argument("--d-range", required=True, help="LO:HI, inclusive")
	p.add_argument("--trials", type=int, default=50)
	p.add_argument("--seed", type=int, default=0)
	p.add_argument("--a", type=float, default=1.0)
	p.add_argument("--mode", choices=modes, default=PredicateMode.C_PRIME.value)
	p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
	p.add_argument("--csv", required=True)
	p.add_argument("--timing", action="store_true", help="fill runtime_ms (makes reruns differ)")
	p.add_argument("--n-jobs", type=int, default=1)
	p.set_defaults(handler=cmd_bench)
	return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
	args = build_parser().parse_args(argv)
	setup_logging(args.verbose, args.quiet)
	try:
		return args.handler(args)
	except MaxDepthExceeded as e:
		logger.error(f"❌ {e}")
		return EXIT_MAX_DEPTH
	except ValidationError as e:
		logger.error(f"❌ invalid input: {e}")
		return EXIT_INPUT
	except (PVError, ValueError, OSError) as e:
		logger.error(f"❌ {e}")
		return EXIT_INPUT
