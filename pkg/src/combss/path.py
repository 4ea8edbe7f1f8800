"""Lambda grids, per-lambda fits, thresholding, OLS refits and model choice."""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyResponse, InvalidConfig, NumericalError
from .model import CombssConfig, Dataset, Subset, default_config
from .optim import run_fit


def lambda_grid(y: np.ndarray, n: Optional[int] = None, count: int = 50, factor: float = 0.8) -> np.ndarray:
    """Geometric grid lambda_max * factor**l, l = 0..count-1, with lambda_max = ||y||^2 / n."""
    y = np.asarray(y, dtype=float)
    n = y.shape[0] if n is None else n
    if count < 1:
        raise InvalidConfig("grid count must be at least 1")
    if not 0.0 < factor < 1.0:
        raise InvalidConfig("grid factor must lie in (0, 1)")
    lam_max = float(y @ y) / n
    if lam_max == 0.0:
        raise EmptyResponse("y is identically zero; the lambda grid would be all zeros")
    return lam_max * factor ** np.arange(count)


def threshold(t: np.ndarray, tau: float) -> Subset:
    """s_j = 1 iff t_j > tau (strict)."""
    return Subset.from_mask(np.asarray(t) > tau)


class Refit(NamedTuple):
    coeffs: np.ndarray
    train_mse: float
    singular: bool


def refit_ols(dataset: Dataset, subset: Subset) -> Refit:
    """Least squares on the selected columns; minimum-norm solution when rank deficient."""
    idx = list(subset.indices)
    y = dataset.y
    if not idx:
        return Refit(np.zeros(0), float(y @ y) / dataset.n, False)
    xs = dataset.x[:, idx]
    coeffs, _, rank, _ = np.linalg.lstsq(xs, y, rcond=None)
    r = y - xs @ coeffs
    return Refit(coeffs, float(r @ r) / dataset.n, bool(rank < len(idx)))


def subset_mse(dataset: Dataset, subset: Subset, coeffs: np.ndarray) -> float:
    """Mean squared error of the refit model on ``dataset``."""
    idx = list(subset.indices)
    r = dataset.y - dataset.x[:, idx] @ coeffs if idx else dataset.y
    return float(r @ r) / dataset.n


def embed(subset: Subset, coeffs: np.ndarray) -> np.ndarray:
    """Refit coefficients scattered into a length-p vector (zeros off the subset)."""
    beta = np.zeros(subset.p)
    beta[list(subset.indices)] = coeffs
    return beta


def _finite_or_none(v: Optional[float]) -> Optional[float]:
    return v if v is not None and np.isfinite(v) else None


@dataclass
class PathRecord:
    lam: float
    subset: Subset
    coeffs: np.ndarray
    t_final: np.ndarray
    train_mse: float
    val_mse: Optional[float] = None
    iters: int = 0
    runtime: float = 0.0  # seconds
    terminated_by: Optional[str] = None
    flags: List[str] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(f.startswith("failed") for f in self.flags)

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "selected": list(self.subset.indices),
            "coeffs": [float(c) for c in self.coeffs],
            "val_mse": _finite_or_none(self.val_mse),
            "train_mse": _finite_or_none(self.train_mse),
            "iters": self.iters,
            "runtime_ms": round(self.runtime * 1000.0, 3),
            "terminated_by": self.terminated_by,
            "flags": list(self.flags),
            "t_final": [float(v) for v in self.t_final],
        }


@dataclass
class SolutionPath:
    records: List[PathRecord]
    best_index: Optional[int]
    config: CombssConfig

    @property
    def best(self) -> Optional[PathRecord]:
        return None if self.best_index is None else self.records[self.best_index]

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "grid": [r.lam for r in self.records],
            "best_index": self.best_index,
            "records": [r.to_dict() for r in self.records],
        }

    def to_json(self, indent: Optional[int] = 1) -> str:
        return json.dumps(self.to_dict(), indent=indent, allow_nan=False)


def fit_record(
    train: Dataset,
    lam: float,
    cfg: CombssConfig,
    validation: Optional[Dataset] = None,
    w0: Optional[np.ndarray] = None,
    trace=None,
) -> tuple:
    """Fit at one lambda, threshold, refit. Returns ``(record, final_w)``."""
    start = time.perf_counter()
    try:
        state, ws = run_fit(train, lam, cfg, trace=trace, w0=w0)
    except NumericalError as exc:
        rec = PathRecord(
            lam=float(lam),
            subset=Subset((), train.p),
            coeffs=np.zeros(0),
            t_final=np.zeros(train.p),
            train_mse=float("nan"),
            runtime=time.perf_counter() - start,
            terminated_by="failed",
            flags=[f"failed: {exc}"],
        )
        return rec, None
    subset = threshold(state.t, cfg.tau)
    refit = refit_ols(train, subset)
    flags = []
    if refit.singular:
        flags.append("singular_refit")
    if not ws.cg_converged:
        flags.append("cg_not_converged")
    rec = PathRecord(
        lam=float(lam),
        subset=subset,
        coeffs=refit.coeffs,
        t_final=state.t.copy(),
        train_mse=refit.train_mse,
        val_mse=None if validation is None else subset_mse(validation, subset, refit.coeffs),
        iters=state.iter,
        runtime=time.perf_counter() - start,
        terminated_by=state.terminated_by.value,
        flags=flags,
    )
    return rec, state.w


def _fit_job(args):
    rec, _ = fit_record(*args)
    return rec


def select_best(records: Sequence[PathRecord]) -> Optional[int]:
    """Index of minimal validation MSE; ties go to the earlier (larger-lambda) record."""
    best = None
    for i, rec in enumerate(records):
        if rec.failed or rec.val_mse is None:
            continue
        if best is None or rec.val_mse < records[best].val_mse:
            best = i
    return best


def run_path(
    train: Dataset,
    validation: Optional[Dataset] = None,
    cfg: Optional[CombssConfig] = None,
    grid: Optional[Sequence[float]] = None,
    workers: int = 1,
    warm_start: bool = False,
) -> SolutionPath:
    """One fit per lambda (cold start from the midpoint unless ``warm_start``).

    Records keep grid order regardless of ``workers``.
    """
    cfg = default_config(train) if cfg is None else cfg
    if cfg.delta is None:
        cfg = cfg.with_(delta=float(train.n))
    if validation is not None and validation.p != train.p:
        raise DimensionMismatch(f"validation has p={validation.p}, training has p={train.p}")
    grid = lambda_grid(train.y) if grid is None else np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidConfig("grid must be a non-empty vector")
    if np.any(np.diff(grid) >= 0):
        raise InvalidConfig("grid must be strictly decreasing")

    if warm_start:
        records, w = [], None
        for lam in grid:
            rec, w_out = fit_record(train, lam, cfg, validation, w0=w)
            records.append(rec)
            w = w_out if w_out is not None else w
    elif workers > 1:
        jobs = [(train, lam, cfg, validation) for lam in grid]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_fit_job, jobs))
    else:
        records = [fit_record(train, lam, cfg, validation)[0] for lam in grid]
    return SolutionPath(records, select_best(records), cfg)
