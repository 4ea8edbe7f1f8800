"""Core data types: the fit input, the tunables, and binary subsets."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Optional

import numpy as np

from .errors import DimensionMismatch, InvalidConfig, InvalidDimension, NonFiniteEntry


class Optimizer(str, enum.Enum):
    ADAM = "adam"
    BASIC_GD = "gd"


class Route(str, enum.Enum):
    """How L_t^{-1} u is computed; AUTO picks Woodbury iff p_plus > n."""

    AUTO = "auto"
    DIRECT = "direct"
    WOODBURY = "woodbury"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Design matrix ``x`` (n x p) and response ``y`` (n,), both read-only."""

    x: np.ndarray
    y: np.ndarray

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


def validate_dataset(x, y) -> Dataset:
    """Check shapes and finiteness, then freeze copies of ``x`` and ``y``.

    Raises
    ------
    DimensionMismatch
        If ``x`` is not 2-D with at least one row and column, or ``y`` does
        not have one entry per row of ``x``.
    NonFiniteEntry
        On the first NaN/Inf, reporting its (row, col) in ``x`` or row in ``y``.
    """
    x = np.array(x, dtype=float, copy=True)
    y = np.array(y, dtype=float, copy=True)
    if y.ndim == 2 and y.shape[1] == 1:
        y = y[:, 0]
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise DimensionMismatch(f"x must be a non-empty 2-D matrix, got shape {x.shape}")
    if y.ndim != 1:
        raise DimensionMismatch(f"y must be a vector, got shape {y.shape}")
    if y.shape[0] != x.shape[0]:
        raise DimensionMismatch(f"x has {x.shape[0]} rows but y has {y.shape[0]} entries")
    bad = np.argwhere(~np.isfinite(x))
    if bad.size:
        raise NonFiniteEntry(int(bad[0, 0]), int(bad[0, 1]))
    bad_y = np.flatnonzero(~np.isfinite(y))
    if bad_y.size:
        raise NonFiniteEntry(int(bad_y[0]))
    x.setflags(write=False)
    y.setflags(write=False)
    return Dataset(x=x, y=y)


@dataclass(frozen=True)
class CombssConfig:
    """All tunables of a fit.

    ``delta=None`` means "use n" and is resolved by :meth:`delta_for`.
    ``cg_max_iters=None`` means "dimension of the system being solved".
    ``eta=0`` disables truncation.
    """

    delta: Optional[float] = None
    lam: float = 0.0
    tau: float = 0.5
    eta: float = 0.001
    adam_alpha: float = 0.1
    adam_xi1: float = 0.9
    adam_xi2: float = 0.999
    adam_c: float = 1e-8
    term_epsilon: float = 0.001
    term_window: int = 10
    max_iters: int = 1000
    cg_tol: float = 1e-5
    cg_max_iters: Optional[int] = None
    optimizer: Optimizer = Optimizer.ADAM
    gd_alpha: float = 0.1
    route: Route = Route.AUTO
    cg_warm_start: bool = True

    def __post_init__(self):
        object.__setattr__(self, "optimizer", Optimizer(self.optimizer))
        object.__setattr__(self, "route", Route(self.route))
        _check(self.delta is None or (math.isfinite(self.delta) and self.delta > 0), "delta must be positive")
        _check(math.isfinite(self.lam) and self.lam >= 0, "lam must be nonnegative")
        _check(0 < self.tau < 1, "tau must lie in (0, 1)")
        _check(0 <= self.eta < 1, "eta must lie in [0, 1)")
        _check(self.eta < self.tau, "eta must be smaller than tau")
        _check(self.adam_alpha > 0, "adam_alpha must be positive")
        _check(0 <= self.adam_xi1 < 1, "adam_xi1 must lie in [0, 1)")
        _check(0 <= self.adam_xi2 < 1, "adam_xi2 must lie in [0, 1)")
        _check(self.adam_c > 0, "adam_c must be positive")
        _check(self.term_epsilon > 0, "term_epsilon must be positive")
        _check(int(self.term_window) == self.term_window and self.term_window >= 1, "term_window must be a positive integer")
        _check(int(self.max_iters) == self.max_iters and self.max_iters >= 1, "max_iters must be a positive integer")
        _check(self.cg_tol > 0, "cg_tol must be positive")
        _check(self.cg_max_iters is None or self.cg_max_iters >= 1, "cg_max_iters must be positive")
        _check(self.gd_alpha > 0, "gd_alpha must be positive")

    def delta_for(self, n: int) -> float:
        return float(n) if self.delta is None else float(self.delta)

    def with_(self, **changes) -> "CombssConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["optimizer"] = self.optimizer.value
        d["route"] = self.route.value
        return d


def _check(ok: bool, message: str) -> None:
    if not ok:
        raise InvalidConfig(message)


def default_config(dataset: Dataset, **overrides) -> CombssConfig:
    """Defaults used throughout the simulations, with ``delta = n``."""
    return CombssConfig(delta=float(dataset.n), **overrides)


@dataclass(frozen=True)
class Subset:
    """Selected feature indices, strictly increasing, each below ``p``."""

    indices: tuple = field(default_factory=tuple)
    p: int = 0

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise InvalidDimension(f"subset indices must be strictly increasing: {idx}")
        if idx and (idx[0] < 0 or idx[-1] >= self.p):
            raise InvalidDimension(f"subset indices must lie in [0, {self.p})")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_mask(cls, mask) -> "Subset":
        mask = np.asarray(mask)
        return cls(tuple(np.flatnonzero(mask).tolist()), mask.shape[0])

    @classmethod
    def from_indices(cls, indices: Iterable[int], p: int) -> "Subset":
        return cls(tuple(sorted(set(int(i) for i in indices))), p)

    @property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.p, dtype=bool)
        m[list(self.indices)] = True
        return m

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)
