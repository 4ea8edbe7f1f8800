"""Exhaustive best subset (small p) and greedy forward stepwise selection."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import DimensionTooLarge, InvalidConfig
from .model import Dataset, Subset
from .path import refit_ols

EXHAUSTIVE_MAX_P = 20


@dataclass
class BestSubsetTable:
    """Entry k holds the chosen subset of size k, its refit coefficients and RSS / n."""

    subsets: List[Subset]
    coeffs: List[np.ndarray]
    rss: List[float]

    @property
    def k_max(self) -> int:
        return len(self.subsets) - 1


def exhaustive_best_subset(dataset: Dataset, k_max: Optional[int] = None, reverse: bool = False) -> BestSubsetTable:
    """Enumerate every subset of size <= k_max and keep the lowest RSS per size.

    Ties go to the lexicographically smallest index list, whatever the
    enumeration order (``reverse`` walks each size backwards).
    """
    p = dataset.p
    if p > EXHAUSTIVE_MAX_P:
        raise DimensionTooLarge(f"exhaustive search needs p <= {EXHAUSTIVE_MAX_P}, got p = {p}")
    k_max = p if k_max is None else k_max
    if not 0 <= k_max <= p:
        raise InvalidConfig(f"k_max must lie in [0, {p}]")

    subsets, coeffs, rss = [], [], []
    for k in range(k_max + 1):
        combos = itertools.combinations(range(p), k)
        if reverse:
            combos = reversed(list(combos))
        best = None
        for idx in combos:
            fit = refit_ols(dataset, Subset(idx, p))
            if best is None or fit.train_mse < best[1] or (fit.train_mse == best[1] and idx < best[0]):
                best = (idx, fit.train_mse, fit.coeffs)
        subsets.append(Subset(best[0], p))
        rss.append(best[1])
        coeffs.append(best[2])
    return BestSubsetTable(subsets, coeffs, rss)


def forward_stepwise(dataset: Dataset, k_max: Optional[int] = None) -> BestSubsetTable:
    """Greedy nested subsets: each step adds the column that most reduces the refit RSS.

    Candidates are scored by projecting out the already selected columns
    (Gram-Schmidt), so a step costs O(n p). Columns numerically inside the
    current span are never added. Ties go to the smallest index.
    """
    n, p = dataset.n, dataset.p
    k_max = min(n, p, 50) if k_max is None else k_max
    if not 0 <= k_max <= min(n, p):
        raise InvalidConfig(f"k_max must lie in [0, min(n, p) = {min(n, p)}]")

    x_res = np.array(dataset.x, dtype=float)
    col_norm0 = np.einsum("ij,ij->j", x_res, x_res)
    r = np.array(dataset.y, dtype=float)
    chosen: List[int] = []
    available = np.ones(p, dtype=bool)

    empty = refit_ols(dataset, Subset((), p))
    subsets, coeffs, rss = [Subset((), p)], [empty.coeffs], [empty.train_mse]
    for _ in range(k_max):
        norms = np.einsum("ij,ij->j", x_res, x_res)
        usable = available & (norms > 1e-10 * np.maximum(col_norm0, 1e-300))
        if not usable.any():
            break
        gain = np.full(p, -np.inf)
        gain[usable] = (x_res[:, usable].T @ r) ** 2 / norms[usable]
        j = int(np.argmax(gain))
        q = x_res[:, j] / np.sqrt(norms[j])
        r = r - q * (q @ r)
        x_res -= np.outer(q, q @ x_res)
        available[j] = False
        chosen.append(j)
        sub = Subset.from_indices(chosen, p)
        fit = refit_ols(dataset, sub)
        subsets.append(sub)
        coeffs.append(fit.coeffs)
        rss.append(fit.train_mse)
    return BestSubsetTable(subsets, coeffs, rss)
