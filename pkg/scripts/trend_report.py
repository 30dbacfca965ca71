#!/usr/bin/env python3
"""
Degree trend of a bench CSV

Reads the per-degree mean rows written by `python main.py bench`, fits the
log-log slope of mean leaf count against d and compares it with the exponent
(n^2 + 3n)/2 of the average-case cube bound.

Usage:
    python scripts/trend_report.py --csv runs/kss_n2.csv
    python scripts/trend_report.py --csv runs/kss_n2.csv --column depth_max
"""

import sys
sys.path.insert(0, '.')

import argparse

from src.amortize import fit_loglog_slope
from src.bench import degree_means, failures
from src.io import read_bench_csv


def main():
	parser = argparse.ArgumentParser(description="Log-log degree trend of a bench CSV")
	parser.add_argument("--csv", required=True)
	parser.add_argument("--column", default="leaf_count")
	args = parser.parse_args()

	df = read_bench_csv(args.csv)
	means = degree_means(df, args.column)
	n = int(df["n"].iloc[0])
	print(f"📦 {args.csv}: model={df['model'].iloc[0]} n={n}, degrees {int(means.index.min())}..{int(means.index.max())}")
	for d, v in means.items():
		print(f"   d={int(d):>2}  mean {args.column} = {v:.6g}")

	lost = failures(df)
	if lost:
		print(f"⚠️ {lost} trial(s) hit the max depth and are missing from the means")
	if len(means) < 2:
		print("❌ need at least two degrees for a slope")
		return 1
	slope = fit_loglog_slope(means.index.to_numpy(), means.to_numpy())
	exponent = (n * n + 3 * n) / 2
	mark = "✅" if slope <= exponent else "⚠️"
	print(f"{mark} fitted slope {slope:.3f} (average-case exponent {exponent:g})")
	return 0


if __name__ == '__main__':
	sys.exit(main())
