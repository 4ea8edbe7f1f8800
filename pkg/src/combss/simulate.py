"""Seeded synthetic regression data with AR(1)-correlated Gaussian features.

Rows of X are iid N(0, Sigma) with Sigma_ij = rho^|i-j|. Noise variance is
calibrated from the analytic Sigma: sigma^2 = beta^T Sigma beta / snr.

Random streams: ``SeedSequence(seed, spawn_key=(replication,))`` is split into
two PCG64 children, the first for the training draw and the second for the
validation draw. A replication's data therefore depends only on
``(seed, replication)``, never on which worker generated it or in what order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .errors import InvalidConfig
from .model import Dataset, Subset, validate_dataset


class BetaType(enum.IntEnum):
    TYPE1 = 1  # k0 ones at equally spaced indices, first to last
    TYPE2 = 2  # ones at the first k0 indices


@dataclass(frozen=True)
class SimSpec:
    n: int
    p: int
    rho: float
    snr: float
    beta_type: BetaType = BetaType.TYPE1
    k0: int = 10
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "beta_type", BetaType(int(self.beta_type)))
        if self.n < 1 or self.p < 1:
            raise InvalidConfig("n and p must be positive")
        if not -1.0 < self.rho < 1.0:
            raise InvalidConfig("rho must lie in (-1, 1)")
        if not (self.snr > 0 and math.isfinite(self.snr)):
            raise InvalidConfig("snr must be positive and finite")
        if not 1 <= self.k0 <= self.p:
            raise InvalidConfig("k0 must lie in [1, p]")
        if self.seed < 0:
            raise InvalidConfig("seed must be nonnegative")


def true_support(spec: SimSpec) -> np.ndarray:
    if spec.beta_type is BetaType.TYPE2:
        return np.arange(spec.k0)
    if spec.k0 == 1:
        return np.array([0])
    j = np.arange(spec.k0)
    # round half up, endpoints inclusive
    return np.floor(j * (spec.p - 1) / (spec.k0 - 1) + 0.5).astype(np.intp)


def gen_beta(spec: SimSpec) -> np.ndarray:
    beta = np.zeros(spec.p)
    beta[true_support(spec)] = 1.0
    return beta


def gen_design(spec: SimSpec, rng: np.random.Generator, n: Optional[int] = None) -> np.ndarray:
    """Rows via x_1 = z_1, x_j = rho x_{j-1} + sqrt(1 - rho^2) z_j; exact for AR(1) Sigma."""
    n = spec.n if n is None else n
    z = rng.standard_normal((n, spec.p))
    scale = math.sqrt(1.0 - spec.rho * spec.rho)
    x = np.empty_like(z)
    x[:, 0] = z[:, 0]
    for j in range(1, spec.p):
        x[:, j] = spec.rho * x[:, j - 1] + scale * z[:, j]
    return x


def signal_variance(beta: np.ndarray, rho: float) -> float:
    """beta^T Sigma beta with Sigma_ij = rho^|i-j|, summed over the support only."""
    idx = np.flatnonzero(beta)
    if idx.size == 0:
        return 0.0
    b = beta[idx]
    sigma = rho ** np.abs(idx[:, None] - idx[None, :]).astype(float)
    return float(b @ sigma @ b)


def gen_response(x: np.ndarray, beta: np.ndarray, spec: SimSpec, rng: np.random.Generator) -> Tuple[np.ndarray, float]:
    sigma2 = signal_variance(beta, spec.rho) / spec.snr
    y = x @ beta + math.sqrt(sigma2) * rng.standard_normal(x.shape[0])
    return y, sigma2


def replication_rngs(seed: int, replication: int = 0) -> Tuple[np.random.Generator, np.random.Generator]:
    ss = np.random.SeedSequence(seed, spawn_key=(replication,))
    train_ss, val_ss = ss.spawn(2)
    return np.random.Generator(np.random.PCG64(train_ss)), np.random.Generator(np.random.PCG64(val_ss))


class SimData(NamedTuple):
    train: Dataset
    validation: Optional[Dataset]
    beta: np.ndarray
    sigma2: float
    support: Subset


def simulate(spec: SimSpec, replication: int = 0, n_val: int = 0) -> SimData:
    """Training set of ``spec.n`` rows plus an optional independent validation set."""
    train_rng, val_rng = replication_rngs(spec.seed, replication)
    beta = gen_beta(spec)
    x = gen_design(spec, train_rng)
    y, sigma2 = gen_response(x, beta, spec, train_rng)
    validation = None
    if n_val > 0:
        xv = gen_design(spec, val_rng, n=n_val)
        yv, _ = gen_response(xv, beta, spec, val_rng)
        validation = validate_dataset(xv, yv)
    return SimData(validate_dataset(x, y), validation, beta, sigma2, Subset.from_mask(beta != 0))
