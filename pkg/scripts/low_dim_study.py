"""Low-dimensional comparison of COMBSS, forward stepwise and exhaustive search.

Thin wrapper over the bench harness; writes replications.csv, summary.csv and
summary.json to --out-dir and prints the MCC / accuracy / PE means.

    python3 scripts/low_dim_study.py --reps 50 --out-dir results/low_dim
"""

import argparse
import os

from combss.bench import BenchScenario, run_bench, summarize, write_outputs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--snr", type=float, nargs="+", default=[0.5, 1, 2, 3, 4, 5, 6, 7, 8])
    ap.add_argument("--beta-type", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--exhaustive", action="store_true", help="include exhaustive search (slow at p = 20)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", default="results/low_dim")
    args = ap.parse_args()

    methods = ["combss", "forward_stepwise"] + (["exhaustive"] if args.exhaustive else [])
    sc = BenchScenario(n=100, p=20, rho=0.8, snr=args.snr, beta_type=args.beta_type, k0=10,
                       replications=args.reps, seed=args.seed, methods=methods)
    workers = int(os.environ.get("COMBSS_THREADS", "1")) or os.cpu_count() or 1
    rows = run_bench(sc, workers=workers)
    summary = summarize(rows)
    write_outputs(args.out_dir, sc, rows, summary)
    for row in summary:
        if row["metric"] in ("mcc", "accuracy", "pe"):
            print(f"{row['cell']:>16} {row['method']:>17} {row['metric']:>8} {row['mean']:.3f} ({row['se']:.3f})")


if __name__ == "__main__":
    main()
