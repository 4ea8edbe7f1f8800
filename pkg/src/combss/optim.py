"""Gradient-descent drivers (basic GD and Adam) with truncation and freezing."""

from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import dataclass, field
from typing import IO, List, NamedTuple, Optional

import numpy as np

from .errors import InvalidDimension, NonFiniteUpdate, NumericalBreakdown
from .grad import GradientWorkspace, grad_g, map_w_to_t
from .linop import ActiveDesign
from .model import CombssConfig, Dataset, Optimizer

log = logging.getLogger(__name__)

W_MIDPOINT = math.sqrt(math.log(2.0))  # t(w) = 1/2


class TerminatedBy(str, enum.Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    ALL_FROZEN = "all_frozen"


@dataclass
class IterRecord:
    iter: int
    max_dt: float
    p_plus: int
    cg_iters: int
    f: float  # f_lambda at the point where this iteration's gradient was taken


@dataclass
class FitState:
    w: np.ndarray
    t: np.ndarray
    frozen: np.ndarray
    adam_u: np.ndarray
    adam_v: np.ndarray
    iter: int = 0
    consecutive_small: int = 0
    terminated_by: Optional[TerminatedBy] = None
    objective_increases: int = 0
    diagnostics: List[IterRecord] = field(default_factory=list)

    @property
    def p(self) -> int:
        return self.w.shape[0]

    @property
    def p_plus(self) -> int:
        return int(self.p - np.count_nonzero(self.frozen))


def init_state(p: int, w0: Optional[np.ndarray] = None) -> FitState:
    """Start at the midpoint of the hypercube (every t_j = 1/2) unless ``w0`` is given."""
    if p < 1:
        raise InvalidDimension(f"p must be at least 1, got {p}")
    w = np.full(p, W_MIDPOINT) if w0 is None else np.array(w0, dtype=float)
    if w.shape != (p,):
        raise InvalidDimension(f"w0 must have shape ({p},), got {w.shape}")
    return FitState(
        w=w,
        t=map_w_to_t(w),
        frozen=np.zeros(p, dtype=bool),
        adam_u=np.zeros(p),
        adam_v=np.zeros(p),
    )


def _commit(state: FitState, w_new: np.ndarray, iteration: int) -> FitState:
    if not np.all(np.isfinite(w_new)):
        raise NonFiniteUpdate("non-finite w after update", iteration)
    w_new[state.frozen] = 0.0
    state.w = w_new
    state.t = map_w_to_t(w_new)
    state.iter = iteration
    return state


def adam_step(state: FitState, grad: np.ndarray, cfg: CombssConfig) -> FitState:
    """One Adam update in place (descent sign folded into the first moment)."""
    l = state.iter + 1
    xi1, xi2 = cfg.adam_xi1, cfg.adam_xi2
    live = ~state.frozen
    g = np.where(live, grad, 0.0)
    state.adam_u = xi1 * state.adam_u - (1.0 - xi1) * g
    state.adam_v = xi2 * state.adam_v + (1.0 - xi2) * (g * g)
    u_hat = state.adam_u / (1.0 - xi1**l)
    v_hat = state.adam_v / (1.0 - xi2**l)
    w_new = state.w + cfg.adam_alpha * u_hat / np.sqrt(v_hat + cfg.adam_c)
    return _commit(state, w_new, l)


def basic_gd_step(state: FitState, grad: np.ndarray, cfg: CombssConfig) -> FitState:
    w_new = state.w - cfg.gd_alpha * np.where(state.frozen, 0.0, grad)
    return _commit(state, w_new, state.iter + 1)


def truncate(state: FitState, cfg: CombssConfig) -> FitState:
    """Freeze every live coordinate with t_j < eta: w_j = t_j = 0, moments reset."""
    hit = ~state.frozen & (state.t < cfg.eta)
    if hit.any():
        state.w[hit] = 0.0
        state.t[hit] = 0.0
        state.adam_u[hit] = 0.0
        state.adam_v[hit] = 0.0
        state.frozen = state.frozen | hit
    return state


class FitResult(NamedTuple):
    state: FitState
    workspace: GradientWorkspace


def run_fit(
    dataset: Dataset,
    lam: float,
    cfg: CombssConfig,
    trace: Optional[IO[str]] = None,
    w0: Optional[np.ndarray] = None,
) -> FitResult:
    """Minimize g_lambda from the midpoint until the t-iterates settle.

    Terminates once ``max|t(l) - t(l-1)| <= term_epsilon`` holds for
    ``term_window`` consecutive iterations, when every coordinate is frozen,
    or after ``max_iters`` iterations. ``trace`` receives one JSON line per
    iteration.
    """
    state = init_state(dataset.p, w0)
    # coordinates that start at w = 0 stay there forever
    state.frozen = state.w == 0.0
    step = adam_step if cfg.optimizer is Optimizer.ADAM else basic_gd_step
    design = ActiveDesign(dataset, np.flatnonzero(~state.frozen))
    ws = GradientWorkspace()
    prev_f = math.inf

    while True:
        if design.p_plus == 0:
            state.terminated_by = TerminatedBy.ALL_FROZEN
            break
        if state.iter >= cfg.max_iters:
            state.terminated_by = TerminatedBy.MAX_ITERS
            break
        l = state.iter + 1
        try:
            grad = grad_g(design, state.w, state.frozen, lam, cfg, ws)
        except NumericalBreakdown as exc:
            raise NumericalBreakdown(str(exc), l) from exc
        f_val = ws.residual_term + lam * float(np.sum(state.t))
        if cfg.optimizer is Optimizer.BASIC_GD and f_val > prev_f + 1e-8:
            state.objective_increases += 1
            log.debug("objective increased at iteration %d: %.12g -> %.12g", l, prev_f, f_val)
        prev_f = f_val

        t_prev = state.t
        step(state, grad, cfg)
        frozen_before = int(np.count_nonzero(state.frozen))
        truncate(state, cfg)
        if np.count_nonzero(state.frozen) > frozen_before:
            keep = ~state.frozen[design.active]
            design = design.restrict(keep)
            ws.restrict(keep)

        max_dt = float(np.max(np.abs(state.t - t_prev)))
        rec = IterRecord(l, max_dt, design.p_plus, ws.cg_iters, f_val)
        state.diagnostics.append(rec)
        if trace is not None:
            trace.write(json.dumps({"iter": rec.iter, "max_dt": rec.max_dt, "p_plus": rec.p_plus, "f": rec.f}) + "\n")

        state.consecutive_small = state.consecutive_small + 1 if max_dt <= cfg.term_epsilon else 0
        if state.consecutive_small >= cfg.term_window:
            state.terminated_by = TerminatedBy.CONVERGED
            break
    return FitResult(state, ws)
