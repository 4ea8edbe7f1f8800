"""Matrix-free operators for L_t and its Woodbury companion, plus plain CG.

Nothing here forms a p x p (or n x n) matrix. Every operator application is
two passes over the active design: one ``X @ v`` and one ``X.T @ u``.
"""

from __future__ import annotations

import math
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import _kernels
from .errors import NumericalBreakdown
from .model import CombssConfig, Dataset, Route

T_CLAMP = 1.0 - 1e-12


class ActiveDesign:
    """Columns of ``dataset.x`` whose t-coordinate is not frozen at zero.

    ``active`` holds original column indices in increasing order; ``x`` is the
    contiguous copy of those columns. ``xty_n`` caches ``X_active^T y / n``.
    """

    def __init__(self, dataset: Dataset, active=None, _xty_n=None):
        self.dataset = dataset
        if active is None:
            active = np.arange(dataset.p)
        self.active = np.asarray(active, dtype=np.intp)
        self.x = np.ascontiguousarray(dataset.x[:, self.active])
        if _xty_n is None:
            _xty_n = self.x.T @ dataset.y / dataset.n
        self.xty_n = _xty_n
        self.yty_n = float(dataset.y @ dataset.y) / dataset.n
        self.n = dataset.n
        self.xt = self.x.T

    @property
    def p_plus(self) -> int:
        return self.active.shape[0]

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return self.x @ v

    def rmatvec(self, u: np.ndarray) -> np.ndarray:
        return self.xt @ u

    def restrict(self, keep: np.ndarray) -> "ActiveDesign":
        """Drop active columns where ``keep`` (indexed like ``active``) is False."""
        keep = np.asarray(keep, dtype=bool)
        return ActiveDesign(self.dataset, self.active[keep], _xty_n=self.xty_n[keep])


class LtOperator:
    """v -> (1/n) [T X^T X T v + delta (I - T^2) v] on the active coordinates."""

    def __init__(self, design: ActiveDesign, t: np.ndarray, delta: float):
        self.design = design
        self.t = np.minimum(np.asarray(t, dtype=float), T_CLAMP)
        self.delta = float(delta)
        n = design.n
        self._ridge = self.delta * (1.0 - self.t * self.t) / n
        self._t_n = self.t / n
        self._x = design.x
        self._xt = design.xt

    @property
    def dim(self) -> int:
        return self.t.shape[0]

    def matvec(self, v: np.ndarray) -> np.ndarray:
        # inlined design.matvec / design.rmatvec: this is the CG hot path
        return self._t_n * (self._xt @ (self._x @ (self.t * v))) + self._ridge * v

    __call__ = matvec


class WoodburyOperator:
    """The n x n companion I + (1/n) X_t S_t X_t^T, S_t = diag(n / (delta (1 - t^2)))."""

    def __init__(self, design: ActiveDesign, t: np.ndarray, delta: float):
        self.design = design
        self.t = np.minimum(np.asarray(t, dtype=float), T_CLAMP)
        self.delta = float(delta)
        n = design.n
        self.s_diag = n / (self.delta * (1.0 - self.t * self.t))
        self._inner_weight = self.t * self.t * self.s_diag / n
        self._x = design.x
        self._xt = design.xt

    @property
    def dim(self) -> int:
        return self.design.n

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return v + self._x @ (self._inner_weight * (self._xt @ v))

    __call__ = matvec


def apply_Lt(op: LtOperator, v: np.ndarray) -> np.ndarray:
    return op.matvec(v)


class CGResult(NamedTuple):
    z: np.ndarray
    iters: int
    residual: float  # relative: ||A z - u|| / ||u||
    converged: bool


def cg_solve(
    apply: Callable[[np.ndarray], np.ndarray],
    u: np.ndarray,
    tol: float = 1e-5,
    max_iters: Optional[int] = None,
    warm_start: Optional[np.ndarray] = None,
) -> CGResult:
    """Conjugate gradient for a symmetric positive-definite ``apply``.

    Stops when the recursive residual satisfies ``||r|| <= tol * ||u||``.
    On hitting ``max_iters`` (default: ``len(u)``) the lowest-residual iterate
    is returned with ``converged=False``; that is a diagnostic, not an error.
    """
    u = np.asarray(u, dtype=float)
    dim = u.shape[0]
    if max_iters is None:
        max_iters = max(dim, 1)
    u_norm = float(np.sqrt(u @ u))
    if not np.isfinite(u_norm):
        raise NumericalBreakdown("non-finite right-hand side in CG")
    if u_norm == 0.0:
        return CGResult(np.zeros(dim), 0, 0.0, True)
    target = tol * u_norm

    if warm_start is not None and warm_start.shape == u.shape:
        z = np.array(warm_start, dtype=float)
        r = u - apply(z)
    else:
        z = np.zeros(dim)
        r = u.copy()
    rr = float(r @ r)
    if not np.isfinite(rr):
        raise NumericalBreakdown("non-finite residual in CG")
    best_z, best_rr = z, rr
    if rr <= target * target:
        return CGResult(z, 0, np.sqrt(rr) / u_norm, True)

    target2 = target * target
    d = r.copy()
    it = 0
    dot = np.dot
    while it < max_iters:
        ad = apply(d)
        dad = float(dot(d, ad))
        if not dad > 0.0:
            if dad != dad:
                raise NumericalBreakdown("non-finite curvature in CG")
            # loss of positive-definiteness in floating point
            break
        step = rr / dad
        z = z + step * d
        r = r - step * ad
        rr_new = float(dot(r, r))
        it += 1
        if rr_new != rr_new or rr_new == math.inf:
            raise NumericalBreakdown("non-finite residual in CG")
        if rr_new <= target2:
            return CGResult(z, it, math.sqrt(rr_new) / u_norm, True)
        if rr_new < best_rr:
            best_z, best_rr = z, rr_new
        d *= rr_new / rr
        d += r
        rr = rr_new
    return CGResult(best_z, it, np.sqrt(best_rr) / u_norm, False)


class LtSolve(NamedTuple):
    z: np.ndarray
    iters: int
    residual: float
    converged: bool
    route: Route
    inner: np.ndarray  # vector CG actually solved for; reuse as the next warm start


def choose_route(p_plus: int, n: int, route: Route = Route.AUTO) -> Route:
    route = Route(route)
    if route is Route.AUTO:
        return Route.WOODBURY if p_plus > n else Route.DIRECT
    return route


def solve_Lt(
    design: ActiveDesign,
    t: np.ndarray,
    delta: float,
    u: np.ndarray,
    cfg: CombssConfig,
    warm: Optional[LtSolve] = None,
    route: Optional[Route] = None,
    compiled: Optional[bool] = None,
) -> LtSolve:
    """Approximate L_t^{-1} u on the active coordinates.

    Direct route: CG on the p_plus-dimensional system. Woodbury route: CG on
    the n-dimensional companion, then
    ``z = S u - (1/n) S X_t^T Ltilde^{-1} (X_t S u)``.
    ``route`` overrides ``cfg.route``; AUTO uses Woodbury iff p_plus > n.
    ``compiled`` selects the numba CG loop (default: whenever available)
    over the pure-numpy :func:`cg_solve`; both run the same iteration.
    """
    route = choose_route(design.p_plus, design.n, cfg.route if route is None else route)
    u = np.asarray(u, dtype=float)
    if design.p_plus == 0:
        empty = np.zeros(0)
        return LtSolve(empty, 0, 0.0, True, route, empty)

    x0 = None
    if warm is not None and cfg.cg_warm_start and warm.route is route:
        x0 = warm.inner
    if compiled is None:
        compiled = _kernels.AVAILABLE

    if route is Route.DIRECT:
        op = LtOperator(design, t, delta)
        if compiled:
            res = _compiled_cg(0, design.x, op._t_n, op.t, op._ridge, u, cfg, x0)
        else:
            res = cg_solve(op, u, cfg.cg_tol, cfg.cg_max_iters, x0)
        return LtSolve(res.z, res.iters, res.residual, res.converged, route, res.z)

    op = WoodburyOperator(design, t, delta)
    su = op.s_diag * u
    rhs = design.matvec(op.t * su)
    if compiled:
        res = _compiled_cg(1, design.x, op._inner_weight, op._inner_weight, op._inner_weight, rhs, cfg, x0)
    else:
        res = cg_solve(op, rhs, cfg.cg_tol, cfg.cg_max_iters, x0)
    z = su - op.s_diag * op.t * design.rmatvec(res.z) / design.n
    if not np.all(np.isfinite(z)):
        raise NumericalBreakdown("non-finite Woodbury reconstruction")
    return LtSolve(z, res.iters, res.residual, res.converged, route, res.z)


def _compiled_cg(kind, x, a, b, c, u, cfg, x0) -> CGResult:
    dim = u.shape[0]
    u_norm = math.sqrt(float(u @ u))
    if not math.isfinite(u_norm):
        raise NumericalBreakdown("non-finite right-hand side in CG")
    if u_norm == 0.0:
        return CGResult(np.zeros(dim), 0, 0.0, True)
    if x0 is None or x0.shape != u.shape:
        x0 = np.zeros(dim)
    max_iters = max(dim, 1) if cfg.cg_max_iters is None else cfg.cg_max_iters
    z, iters, rr, status = _kernels.cg_structured(kind, x, a, b, c, u, x0, cfg.cg_tol, max_iters)
    if status == 2:
        raise NumericalBreakdown("non-finite value in CG")
    return CGResult(z, int(iters), math.sqrt(rr) / u_norm, status == 0)
