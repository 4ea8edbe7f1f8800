"""Wall time of one fit under the four solver variants, as p grows.

Variants: plain CG on L_t; CG with truncation; CG with Woodbury; both.

    python3 scripts/runtime_comparison.py --p 200 500 1000 --reps 3
"""

import argparse
import statistics
import time

from combss.model import CombssConfig
from combss.optim import run_fit
from combss.simulate import SimSpec, simulate

VARIANTS = {
    "cg": dict(eta=0.0, route="direct"),
    "cg+trunc": dict(eta=0.001, route="direct"),
    "cg+wb": dict(eta=0.0, route="auto"),
    "cg+wb+trunc": dict(eta=0.001, route="auto"),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--p", type=int, nargs="+", default=[200, 500, 1000])
    ap.add_argument("--lam", type=float, default=0.1)
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'p':>6} " + " ".join(f"{v:>12}" for v in VARIANTS))
    for p in args.p:
        spec = SimSpec(args.n, p, 0.8, 5.0, 1, 10, args.seed)
        med = {}
        for name, kw in VARIANTS.items():
            cfg = CombssConfig(delta=float(args.n), **kw)
            times = []
            for rep in range(args.reps):
                data = simulate(spec, rep).train
                t0 = time.perf_counter()
                run_fit(data, args.lam, cfg)
                times.append(time.perf_counter() - t0)
            med[name] = statistics.median(times)
        print(f"{p:>6} " + " ".join(f"{med[v]:>11.3f}s" for v in VARIANTS))


if __name__ == "__main__":
    main()
