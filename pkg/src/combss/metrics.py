"""Prediction error and variable-selection scores."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InvalidDimension, NullSignal


def prediction_error(x: np.ndarray, beta_hat: np.ndarray, beta_true: np.ndarray) -> float:
    """||X beta_hat - X beta||^2 / ||X beta||^2."""
    signal = x @ beta_true
    denom = float(signal @ signal)
    if denom == 0.0:
        raise NullSignal("X beta_true is identically zero")
    diff = x @ beta_hat - signal
    return float(diff @ diff) / denom


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def p(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(selected: Iterable[int], true_support: Iterable[int], p: int) -> ConfusionCounts:
    sel = set(int(i) for i in selected)
    tru = set(int(i) for i in true_support)
    if any(not 0 <= i < p for i in sel | tru):
        raise InvalidDimension(f"indices must lie in [0, {p})")
    tp = len(sel & tru)
    fp = len(sel - tru)
    fn = len(tru - sel)
    return ConfusionCounts(tp=tp, fp=fp, tn=p - tp - fp - fn, fn=fn)


@dataclass(frozen=True)
class Scores:
    mcc: float
    f1: float
    sensitivity: float
    specificity: float
    accuracy: float
    degenerate: frozenset = frozenset()  # names of scores whose ratio was 0/0 or had a zero factor

    def as_dict(self) -> dict:
        return {
            "mcc": self.mcc,
            "f1": self.f1,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "accuracy": self.accuracy,
        }


def _ratio(num, den, name, flags):
    if den == 0:
        flags.add(name)
        return 0.0
    return num / den


def scores(c: ConfusionCounts) -> Scores:
    """MCC, F1, sensitivity, specificity and accuracy; undefined ratios become 0 and are flagged."""
    flags: set = set()
    tp, fp, tn, fn = c.tp, c.fp, c.tn, c.fn
    den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    mcc = _ratio(tp * tn - fp * fn, math.sqrt(den), "mcc", flags) if den else _ratio(0, 0, "mcc", flags)
    return Scores(
        mcc=float(mcc),
        f1=_ratio(2 * tp, 2 * tp + fp + fn, "f1", flags),
        sensitivity=_ratio(tp, tp + fn, "sensitivity", flags),
        specificity=_ratio(tn, tn + fp, "specificity", flags),
        accuracy=_ratio(tp + tn, c.p, "accuracy", flags),
        degenerate=frozenset(flags),
    )
