"""Trace t_j over iterations for Adam and basic gradient descent on one dataset.

Writes a long-format CSV (optimizer, iter, j, t) suitable for plotting.

    python3 scripts/convergence_trace.py --lam 0.2 --out trace.csv
"""

import argparse
import csv

import numpy as np

from combss.grad import GradientWorkspace, grad_g
from combss.linop import ActiveDesign
from combss.model import CombssConfig
from combss.optim import adam_step, basic_gd_step, init_state, truncate
from combss.simulate import SimSpec, simulate


def trajectory(data, lam, cfg, iters):
    step = adam_step if cfg.optimizer.value == "adam" else basic_gd_step
    state = init_state(data.p)
    ws = GradientWorkspace()
    rows = [state.t.copy()]
    for _ in range(iters):
        design = ActiveDesign(data, np.flatnonzero(~state.frozen))
        if design.p_plus == 0:
            break
        step(state, grad_g(design, state.w, state.frozen, lam, cfg, ws), cfg)
        truncate(state, cfg)
        rows.append(state.t.copy())
    return rows


def main():
    ap = argparse.ArgumentParser(description="t-trajectories for Adam and basic GD")
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--p", type=int, default=20)
    ap.add_argument("--rho", type=float, default=0.8)
    ap.add_argument("--snr", type=float, default=5.0)
    ap.add_argument("--lam", type=float, default=0.2)
    ap.add_argument("--iters", type=int, default=400)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="trace.csv")
    args = ap.parse_args()

    data = simulate(SimSpec(args.n, args.p, args.rho, args.snr, 1, min(10, args.p), args.seed)).train
    runs = {
        "adam": CombssConfig(delta=float(args.n)),
        "gd": CombssConfig(delta=float(args.n), optimizer="gd", gd_alpha=0.1),
    }
    with open(args.out, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["optimizer", "iter", "j", "t"])
        for name, cfg in runs.items():
            rows = trajectory(data, args.lam, cfg, args.iters)
            for it, t in enumerate(rows):
                for j, v in enumerate(t):
                    out.writerow([name, it, j, f"{v:.6g}"])
            final = rows[-1]
            print(f"{name}: {len(rows) - 1} iterations, selected {np.flatnonzero(final > 0.5).tolist()}")


if __name__ == "__main__":
    main()
