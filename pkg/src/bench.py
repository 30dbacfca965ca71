"""
Cube-count benchmark: subdivide fresh random polynomials over a range of
degrees and tabulate leaf counts. Trials are independent (one derived seed
each) and may run in parallel; rows are sorted before they are written, so a
rerun with the same flags gives the same CSV byte for byte.
"""

import logging
import time
from typing import Any, Dict, List

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from .errors import MaxDepthExceeded
from .models import DobroSpec
from .randpoly import sample_dobro_affine
from .schemas import BenchConfig
from .subdivide import pv_subdivide

logger = logging.getLogger(__name__)

STAT_COLUMNS = ["leaf_count", "depth_max", "value_branch", "gradient_branch", "runtime_ms"]


def trial_seed(seed: int, d: int, trial: int) -> int:
	return int(np.random.SeedSequence([seed, d, trial]).generate_state(1)[0])


def run_trial(cfg: BenchConfig, d: int, trial: int) -> Dict[str, Any]:
	s = trial_seed(cfg.seed, d, trial)
	f = sample_dobro_affine(DobroSpec(cfg.model, cfg.p), cfg.n, d, s)
	row: Dict[str, Any] = {"model": cfg.model.value, "n": cfg.n, "d": d, "a": cfg.a, "trial": trial, "seed": s}
	start = time.perf_counter()
	try:
		S = pv_subdivide(f, cfg.a, cfg.mode, cfg.max_depth)
	except MaxDepthExceeded as e:
		logger.warning(f"⚠️ d={d} trial={trial}: {e}")
		row.update({"leaf_count": None, "depth_max": e.depth, "value_branch": None, "gradient_branch": None})
	else:
		row.update({
			"leaf_count": S.stats.leaf_count,
			"depth_max": S.stats.max_depth,
			"value_branch": S.stats.value_branch,
			"gradient_branch": S.stats.gradient_branch,
		})
	elapsed_ms = (time.perf_counter() - start) * 1000
	row["runtime_ms"] = round(elapsed_ms, 3) if cfg.timing else None
	return row


def _summary_row(cfg: BenchConfig, d: int, trials: pd.DataFrame, how: str) -> Dict[str, Any]:
	row: Dict[str, Any] = {"model": cfg.model.value, "n": cfg.n, "d": d, "a": cfg.a, "trial": how, "seed": None}
	for col in STAT_COLUMNS:
		values = pd.to_numeric(trials[col], errors="coerce").dropna()
		if values.empty:
			row[col] = None
			continue
		value = values.mean() if how == "mean" else values.median()
		row[col] = f"{value:.6g}"
	return row


def run_bench(cfg: BenchConfig) -> pd.DataFrame:
	"""One row per (degree, trial), each degree followed by its mean and median rows"""
	jobs = [(d, t) for d in cfg.degrees for t in range(cfg.trials)]
	logger.info(f"🔄 {len(jobs)} trials: model={cfg.model.value} n={cfg.n} d={cfg.d_lo}..{cfg.d_hi}")
	rows: List[Dict[str, Any]] = Parallel(n_jobs=cfg.n_jobs)(delayed(run_trial)(cfg, d, t) for d, t in jobs)
	rows.sort(key=lambda r: (r["d"], r["trial"]))

	out: List[Dict[str, Any]] = []
	for d in cfg.degrees:
		trial_rows = [r for r in rows if r["d"] == d]
		frame = pd.DataFrame(trial_rows)
		out.extend(trial_rows)
		out.append(_summary_row(cfg, d, frame, "mean"))
		out.append(_summary_row(cfg, d, frame, "median"))
		failed = int(frame["leaf_count"].isna().sum())
		logger.info(f"✅ d={d}: mean leaf count {out[-2]['leaf_count']}" + (f", {failed} trial(s) hit max depth" if failed else ""))
	return pd.DataFrame(out, dtype=object)


def degree_means(df: pd.DataFrame, column: str = "leaf_count") -> pd.Series:
	"""Per-degree mean rows of a bench table, indexed by d"""
	means = df[df["trial"].astype(str) == "mean"]
	return pd.Series(pd.to_numeric(means[column]).to_numpy(), index=pd.to_numeric(means["d"]).to_numpy(), name=column)


def failures(df: pd.DataFrame) -> int:
	"""Trials that raised MaxDepthExceeded"""
	trials = df[~df["trial"].astype(str).isin(["mean", "median"])]
	return int(pd.to_numeric(trials["leaf_count"], errors="coerce").isna().sum())
