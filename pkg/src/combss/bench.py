"""Replicated simulation benchmark: COMBSS vs forward stepwise, exhaustive search
and externally computed subsets, scored by selection metrics and prediction error."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .baselines import EXHAUSTIVE_MAX_P, BestSubsetTable, exhaustive_best_subset, forward_stepwise
from .errors import DimensionTooLarge, InvalidConfig
from .metrics import confusion, prediction_error, scores
from .model import CombssConfig, Dataset, Subset
from .path import embed, lambda_grid, refit_ols, run_path, subset_mse
from .simulate import SimSpec, simulate

METRICS = ("mcc", "f1", "sensitivity", "specificity", "accuracy", "pe", "n_selected")
BUILTIN_METHODS = ("combss", "forward_stepwise", "exhaustive")


@dataclass
class BenchScenario:
    n: int
    p: int
    rho: float
    snr: List[float]
    beta_type: List[int] = field(default_factory=lambda: [1])
    k0: int = 10
    replications: int = 100
    seed: int = 0
    n_val: int = 5000
    methods: List[str] = field(default_factory=lambda: ["combss", "forward_stepwise"])
    grid_count: int = 50
    grid_factor: float = 0.8
    fs_k_max: Optional[int] = None
    config: Dict[str, object] = field(default_factory=dict)
    base_dir: str = "."

    def __post_init__(self):
        if isinstance(self.snr, (int, float)):
            self.snr = [self.snr]
        if isinstance(self.beta_type, int):
            self.beta_type = [self.beta_type]
        if self.replications < 1:
            raise InvalidConfig("replications must be at least 1")
        if self.n_val < 1:
            raise InvalidConfig("n_val must be at least 1 (tuning uses a validation set)")
        for m in self.methods:
            if m not in BUILTIN_METHODS and not m.startswith("external:"):
                raise InvalidConfig(f"unknown method {m!r}")
        if "exhaustive" in self.methods and self.p > EXHAUSTIVE_MAX_P:
            raise DimensionTooLarge(f"exhaustive search needs p <= {EXHAUSTIVE_MAX_P}, got p = {self.p}")
        # fail fast on bad specs and configs
        for cell in self.cells():
            self.sim_spec(cell)
        self.combss_config()
        for m in self.methods:
            if m.startswith("external:"):
                for cell in self.cells():
                    read_subset_file(self.external_path(m, cell), self.p, self.replications)

    @classmethod
    def from_file(cls, path) -> "BenchScenario":
        path = Path(path)
        with open(path) as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise InvalidConfig("scenario must be a JSON object")
        doc.setdefault("base_dir", str(path.parent))
        try:
            return cls(**doc)
        except TypeError as exc:
            raise InvalidConfig(f"bad scenario: {exc}") from exc

    def cells(self) -> List[tuple]:
        return [(int(bt), float(snr)) for bt, snr in itertools.product(self.beta_type, self.snr)]

    @staticmethod
    def cell_id(cell) -> str:
        bt, snr = cell
        return f"beta{bt}_snr{snr:g}"

    def sim_spec(self, cell) -> SimSpec:
        bt, snr = cell
        return SimSpec(self.n, self.p, self.rho, snr, bt, self.k0, self.seed)

    def combss_config(self) -> CombssConfig:
        cfg = dict(self.config)
        cfg.setdefault("delta", float(self.n))
        try:
            return CombssConfig(**cfg)
        except TypeError as exc:
            raise InvalidConfig(f"bad config override: {exc}") from exc

    def external_path(self, method: str, cell) -> Path:
        raw = method.split(":", 1)[1].replace("{cell}", self.cell_id(cell))
        path = Path(raw)
        return path if path.is_absolute() else Path(self.base_dir) / path


def read_subset_file(path, p: int, replications: int) -> List[Subset]:
    """One line per replication, comma-separated 0-based indices (blank line = empty subset)."""
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InvalidConfig(f"cannot read subset file {path}: {exc}") from exc
    if len(lines) < replications:
        raise InvalidConfig(f"{path}: expected {replications} lines, found {len(lines)}")
    out = []
    for lineno, line in enumerate(lines[:replications], 1):
        try:
            idx = [int(tok) for tok in line.replace(" ", "").split(",") if tok]
            out.append(Subset.from_indices(idx, p))
        except ValueError as exc:
            raise InvalidConfig(f"{path}:{lineno}: {exc}") from exc
    return out


def _pick_by_validation(table: BestSubsetTable, validation: Dataset) -> tuple:
    """Size with lowest validation MSE; ties go to the smaller model."""
    best = None
    for sub, coef in zip(table.subsets, table.coeffs):
        mse = subset_mse(validation, sub, coef)
        if best is None or mse < best[2]:
            best = (sub, coef, mse)
    return best[0], best[1]


def run_replication(scenario: BenchScenario, cell, replication: int) -> List[dict]:
    spec = scenario.sim_spec(cell)
    data = simulate(spec, replication, n_val=scenario.n_val)
    train, val = data.train, data.validation
    rows = []
    for method in scenario.methods:
        if method == "combss":
            grid = lambda_grid(train.y, train.n, scenario.grid_count, scenario.grid_factor)
            path = run_path(train, val, scenario.combss_config(), grid)
            best = path.best
            if best is None:
                sub, coef = Subset((), train.p), np.zeros(0)
            else:
                sub, coef = best.subset, best.coeffs
        elif method == "forward_stepwise":
            sub, coef = _pick_by_validation(forward_stepwise(train, scenario.fs_k_max), val)
        elif method == "exhaustive":
            sub, coef = _pick_by_validation(exhaustive_best_subset(train), val)
        else:
            sub = read_subset_file(scenario.external_path(method, cell), train.p, scenario.replications)[replication]
            coef = refit_ols(train, sub).coeffs
        sc = scores(confusion(sub, data.support, train.p)).as_dict()
        sc["pe"] = prediction_error(train.x, embed(sub, coef), data.beta)
        sc["n_selected"] = float(len(sub))
        for metric in METRICS:
            rows.append(
                {
                    "cell": scenario.cell_id(cell),
                    "beta_type": cell[0],
                    "snr": cell[1],
                    "replication": replication,
                    "method": method,
                    "metric": metric,
                    "value": sc[metric],
                }
            )
    return rows


def _job(args):
    return run_replication(*args)


def run_bench(scenario: BenchScenario, workers: int = 1) -> List[dict]:
    """All (cell, replication) rows, ordered by cell then replication regardless of ``workers``."""
    jobs = [(scenario, cell, r) for cell in scenario.cells() for r in range(scenario.replications)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_job, jobs))
    else:
        chunks = [_job(j) for j in jobs]
    return [row for chunk in chunks for row in chunk]


def summarize(rows: Sequence[dict]) -> List[dict]:
    """Mean and standard error per (cell, method, metric), in first-seen order."""
    groups: Dict[tuple, list] = {}
    meta: Dict[tuple, dict] = {}
    for row in rows:
        key = (row["cell"], row["method"], row["metric"])
        groups.setdefault(key, []).append(row["value"])
        meta.setdefault(key, {"beta_type": row["beta_type"], "snr": row["snr"]})
    out = []
    for key, vals in groups.items():
        v = np.asarray(vals, dtype=float)
        se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
        out.append(
            {
                "cell": key[0],
                **meta[key],
                "method": key[1],
                "metric": key[2],
                "mean": float(v.mean()),
                "se": se,
                "count": int(v.size),
            }
        )
    return out


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _csv_text(rows: Sequence[dict], fields: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def write_outputs(out_dir, scenario: BenchScenario, rows: Sequence[dict], summary: Sequence[dict]) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _atomic_write(
        out_dir / "replications.csv",
        _csv_text(rows, ["cell", "beta_type", "snr", "replication", "method", "metric", "value"]),
    )
    _atomic_write(
        out_dir / "summary.csv",
        _csv_text(summary, ["cell", "beta_type", "snr", "method", "metric", "mean", "se", "count"]),
    )
    doc = {"scenario": {k: v for k, v in asdict(scenario).items() if k != "base_dir"}, "summary": list(summary)}
    _atomic_write(out_dir / "summary.json", json.dumps(doc, indent=1) + "\n")
