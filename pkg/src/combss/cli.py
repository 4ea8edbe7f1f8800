"""Command-line front end: ``combss fit | path | simulate | bench``.

Exit codes: 0 ok, 2 usage or input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from .bench import BenchScenario, run_bench, summarize, write_outputs
from .errors import InputError, InvalidConfig, NumericalError
from .model import CombssConfig, Dataset, validate_dataset
from .path import fit_record, lambda_grid, run_path
from .simulate import SimSpec, simulate

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3


def read_csv_matrix(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)


def read_csv_vector(path) -> np.ndarray:
    y = np.loadtxt(path, delimiter=",", ndmin=1, dtype=float)
    if y.ndim == 2 and y.shape[1] == 1:
        y = y[:, 0]
    return y


def write_csv(path, arr) -> None:
    arr = np.asarray(arr, dtype=float)
    np.savetxt(path, arr.reshape(arr.shape[0], -1), delimiter=",", fmt="%.17g")


def worker_count() -> int:
    raw = os.environ.get("COMBSS_THREADS", "1")
    try:
        k = int(raw)
    except ValueError:
        raise InvalidConfig(f"COMBSS_THREADS must be an integer, got {raw!r}")
    if k < 0:
        raise InvalidConfig("COMBSS_THREADS must be >= 0")
    return (os.cpu_count() or 1) if k == 0 else k


class Preprocessor:
    """Optional centering / column scaling fitted on the training data."""

    def __init__(self, x: np.ndarray, y: np.ndarray, center: bool, standardize: bool):
        p = x.shape[1]
        self.center = center
        self.x_mean = x.mean(axis=0) if center else np.zeros(p)
        self.y_mean = float(y.mean()) if center else 0.0
        if standardize:
            sd = x.std(axis=0, ddof=1) if x.shape[0] > 1 else np.ones(p)
            self.scale = np.where(sd > 0, sd, 1.0)
        else:
            self.scale = np.ones(p)

    def apply(self, x: np.ndarray, y: np.ndarray) -> Dataset:
        return validate_dataset((x - self.x_mean) / self.scale, y - self.y_mean)

    def original_scale(self, selected, coeffs) -> tuple:
        """Coefficients on the unscaled columns, plus the intercept implied by centering."""
        beta = np.asarray(coeffs, dtype=float) / self.scale[list(selected)] if len(selected) else np.zeros(0)
        intercept = self.y_mean - float(self.x_mean[list(selected)] @ beta) if self.center else 0.0
        return beta, intercept


def _add_tunables(ap: argparse.ArgumentParser) -> None:
    g = ap.add_argument_group("tunables")
    g.add_argument("--delta", default="auto", help="positive real, or 'auto' for n (default)")
    g.add_argument("--tau", type=float, default=0.5)
    g.add_argument("--eta", type=float, default=0.001, help="truncation threshold; 0 disables")
    g.add_argument("--optimizer", choices=["adam", "gd"], default="adam")
    g.add_argument("--alpha", type=float, default=0.1, help="Adam learning rate")
    g.add_argument("--gd-alpha", type=float, default=0.1, help="basic GD learning rate")
    g.add_argument("--xi1", type=float, default=0.9)
    g.add_argument("--xi2", type=float, default=0.999)
    g.add_argument("--adam-c", type=float, default=1e-8)
    g.add_argument("--term-epsilon", type=float, default=0.001)
    g.add_argument("--term-window", type=int, default=10)
    g.add_argument("--max-iters", type=int, default=1000)
    g.add_argument("--cg-tol", type=float, default=1e-5)
    g.add_argument("--cg-max-iters", type=int, default=None)
    g.add_argument("--route", choices=["auto", "direct", "woodbury"], default="auto")
    g.add_argument("--no-cg-warm-start", action="store_true")
    g.add_argument("--seed", type=int, default=0, help="accepted for uniformity; fits are deterministic")
    g.add_argument("--center", action="store_true", help="subtract column means of X and the mean of y")
    g.add_argument("--standardize", action="store_true", help="divide X columns by their sample sd")


def _config(args, n: int) -> CombssConfig:
    if str(args.delta).lower() == "auto":
        delta = float(n)
    else:
        try:
            delta = float(args.delta)
        except ValueError:
            raise InvalidConfig(f"--delta must be a number or 'auto', got {args.delta!r}")
    return CombssConfig(
        delta=delta,
        tau=args.tau,
        eta=args.eta,
        optimizer=args.optimizer,
        adam_alpha=args.alpha,
        gd_alpha=args.gd_alpha,
        adam_xi1=args.xi1,
        adam_xi2=args.xi2,
        adam_c=args.adam_c,
        term_epsilon=args.term_epsilon,
        term_window=args.term_window,
        max_iters=args.max_iters,
        cg_tol=args.cg_tol,
        cg_max_iters=args.cg_max_iters,
        route=args.route,
        cg_warm_start=not args.no_cg_warm_start,
    )


def _load(x_path, y_path) -> tuple:
    try:
        x = read_csv_matrix(x_path)
        y = read_csv_vector(y_path)
    except (OSError, ValueError) as exc:
        raise InvalidConfig(f"cannot read CSV input: {exc}") from exc
    validate_dataset(x, y)
    return x, y


def _record_doc(rec, prep: Preprocessor) -> dict:
    doc = rec.to_dict()
    beta, intercept = prep.original_scale(rec.subset.indices, rec.coeffs)
    doc["coeffs"] = [float(b) for b in beta]
    if prep.center:
        doc["intercept"] = intercept
    return doc


def cmd_fit(args) -> int:
    x, y = _load(args.x, args.y)
    prep = Preprocessor(x, y, args.center, args.standardize)
    data = prep.apply(x, y)
    cfg = _config(args, data.n).with_(lam=args.lam)
    trace = open(args.trace, "w") if args.trace else None
    try:
        rec, _ = fit_record(data, args.lam, cfg, trace=trace)
    finally:
        if trace is not None:
            trace.close()
    print(json.dumps(_record_doc(rec, prep), allow_nan=False))
    return EXIT_NUMERICAL if rec.failed else EXIT_OK


def cmd_path(args) -> int:
    if (args.val_x is None) != (args.val_y is None):
        raise InvalidConfig("--val-x and --val-y must be given together")
    x, y = _load(args.x, args.y)
    prep = Preprocessor(x, y, args.center, args.standardize)
    train = prep.apply(x, y)
    validation = None
    if args.val_x is not None:
        vx, vy = _load(args.val_x, args.val_y)
        validation = prep.apply(vx, vy)
    cfg = _config(args, train.n)
    grid = lambda_grid(train.y, train.n, args.grid_count, args.grid_factor)
    sp = run_path(train, validation, cfg, grid, workers=worker_count(), warm_start=args.warm_start)
    best = sp.best
    doc = sp.to_dict()
    doc["records"] = [_record_doc(r, prep) for r in sp.records]
    text = json.dumps(doc, indent=1, allow_nan=False) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if best is not None:
        summary = {
            "best_index": sp.best_index,
            "lambda": best.lam,
            "selected": list(best.subset.indices),
            "val_mse": best.val_mse,
        }
        print(json.dumps(summary), file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = SimSpec(args.n, args.p, args.rho, args.snr, args.beta_type, args.k0, args.seed)
    data = simulate(spec, replication=args.replication, n_val=args.n_val)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {"x": "x.csv", "y": "y.csv"}
    write_csv(out / "x.csv", data.train.x)
    write_csv(out / "y.csv", data.train.y)
    if data.validation is not None:
        files.update(val_x="val_x.csv", val_y="val_y.csv")
        write_csv(out / "val_x.csv", data.validation.x)
        write_csv(out / "val_y.csv", data.validation.y)
    manifest = {
        "spec": {
            "n": spec.n,
            "p": spec.p,
            "rho": spec.rho,
            "snr": spec.snr,
            "beta_type": int(spec.beta_type),
            "k0": spec.k0,
        },
        "seed": spec.seed,
        "replication": args.replication,
        "n_val": args.n_val,
        "true_support": list(data.support.indices),
        "sigma2": data.sigma2,
        "beta": [float(b) for b in data.beta],
        "files": files,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        scenario = BenchScenario.from_file(args.scenario)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidConfig(f"cannot read scenario: {exc}") from exc
    rows = run_bench(scenario, workers=worker_count())
    summary = summarize(rows)
    write_outputs(args.out_dir, scenario, rows, summary)
    for row in summary:
        if row["metric"] in ("mcc", "pe"):
            print(f"{row['cell']:>18} {row['method']:>18} {row['metric']:>4} {row['mean']:.4f} +/- {row['se']:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="combss", description="Continuous optimization for best subset selection.")
    sub = ap.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="fit at a single lambda")
    f.add_argument("--x", required=True)
    f.add_argument("--y", required=True)
    f.add_argument("--lambda", dest="lam", type=float, required=True)
    f.add_argument("--trace", help="write one JSON line per iteration here")
    _add_tunables(f)
    f.set_defaults(func=cmd_fit)

    p = sub.add_parser("path", help="fit over a lambda grid and pick by validation MSE")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--val-x")
    p.add_argument("--val-y")
    p.add_argument("--grid-count", type=int, default=50)
    p.add_argument("--grid-factor", type=float, default=0.8)
    p.add_argument("--warm-start", action="store_true", help="start each lambda from the previous solution")
    p.add_argument("--out")
    _add_tunables(p)
    p.set_defaults(func=cmd_path)

    s = sub.add_parser("simulate", help="write a synthetic dataset as CSV plus manifest")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--rho", type=float, required=True)
    s.add_argument("--snr", type=float, required=True)
    s.add_argument("--beta-type", type=int, choices=[1, 2], required=True)
    s.add_argument("--k0", type=int, default=10)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--replication", type=int, default=0)
    s.add_argument("--n-val", type=int, default=0)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bench", help="replicated comparison over a scenario file")
    b.add_argument("--scenario", required=True)
    b.add_argument("--out-dir", required=True)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"combss {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"combss {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
