"""Relaxed coefficients, the objective f_lambda / g_lambda and its exact gradient.

All buffers live on the active coordinates only. Frozen coordinates (t_j = 0)
have beta_tilde_j = c_j = 0 and a zero gradient, so they are never computed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .linop import T_CLAMP, ActiveDesign, LtSolve, solve_Lt
from .model import CombssConfig, Route


def map_w_to_t(w: np.ndarray) -> np.ndarray:
    """t_j = 1 - exp(-w_j^2), evaluated via expm1 to keep small t accurate."""
    w = np.asarray(w, dtype=float)
    return -np.expm1(-w * w)


@dataclass
class GradientWorkspace:
    """Per-fit buffers refreshed at each gradient evaluation.

    After :func:`refresh` at ``t`` (active coordinates), with gamma = t * beta_tilde
    and Z = X^T X / n - (delta / n) I::

        a    = (X^T X / n) gamma - X^T y / n
        b    = a - (delta / n) gamma
        c    = L_t^{-1} (t * a)
        d    = Z (t * c)
        zeta = 2 beta_tilde * (a - d) - 2 b * c

    ``residual_term`` is (1/n) ||y - X_t beta_tilde||^2 at the same ``t``.
    """

    t: Optional[np.ndarray] = None
    beta_tilde: Optional[np.ndarray] = None
    a: Optional[np.ndarray] = None
    b: Optional[np.ndarray] = None
    c: Optional[np.ndarray] = None
    d: Optional[np.ndarray] = None
    zeta: Optional[np.ndarray] = None
    residual_term: float = float("nan")
    warm_beta: Optional[LtSolve] = None
    warm_c: Optional[LtSolve] = None
    cg_iters: int = 0
    cg_residual: float = 0.0
    cg_converged: bool = True
    route: Optional[Route] = None

    def restrict(self, keep: np.ndarray) -> None:
        """Shrink buffers after the active design lost the columns where ``keep`` is False."""
        for name in ("t", "beta_tilde", "a", "b", "c", "d", "zeta"):
            buf = getattr(self, name)
            if buf is not None:
                setattr(self, name, buf[keep])
        self.warm_beta = _restrict_warm(self.warm_beta, keep)
        self.warm_c = _restrict_warm(self.warm_c, keep)


def _restrict_warm(warm: Optional[LtSolve], keep: np.ndarray) -> Optional[LtSolve]:
    if warm is None:
        return None
    if warm.route is Route.DIRECT:
        return warm._replace(z=warm.z[keep], inner=warm.inner[keep])
    # Woodbury warm starts live in R^n and stay valid
    return warm._replace(z=warm.z[keep])


def _solve(design, t, delta, u, cfg, warm):
    return solve_Lt(design, t, delta, u, cfg, warm=warm)


def beta_tilde(design: ActiveDesign, t: np.ndarray, cfg: CombssConfig, ws: GradientWorkspace) -> np.ndarray:
    """L_t^{-1} (t * X^T y / n) on the active coordinates."""
    t = np.minimum(np.asarray(t, dtype=float), T_CLAMP)
    delta = cfg.delta_for(design.n)
    sol = _solve(design, t, delta, t * design.xty_n, cfg, ws.warm_beta)
    ws.warm_beta = sol
    ws.beta_tilde = sol.z
    ws.t = t
    return sol.z


def _residual_term(design: ActiveDesign, gamma: np.ndarray, x_gamma: np.ndarray) -> float:
    # y^T y / n - 2 gamma^T X^T y / n + gamma^T (X^T X / n) gamma
    return design.yty_n - 2.0 * float(gamma @ design.xty_n) + float(x_gamma @ x_gamma) / design.n


def objective_f(
    design: ActiveDesign, t: np.ndarray, lam: float, cfg: CombssConfig, ws: GradientWorkspace
) -> float:
    """f_lambda(t); frozen coordinates are outside ``design`` and contribute 0."""
    bt = beta_tilde(design, t, cfg, ws)
    gamma = ws.t * bt
    res = _residual_term(design, gamma, design.matvec(gamma))
    ws.residual_term = res
    return res + lam * float(np.sum(ws.t))


def refresh(design: ActiveDesign, t: np.ndarray, cfg: CombssConfig, ws: GradientWorkspace) -> GradientWorkspace:
    """Recompute every workspace buffer at ``t``. Independent of lambda."""
    n = design.n
    dn = cfg.delta_for(n) / n
    delta = cfg.delta_for(n)
    t = np.minimum(np.asarray(t, dtype=float), T_CLAMP)

    sol_b = _solve(design, t, delta, t * design.xty_n, cfg, ws.warm_beta)
    bt = sol_b.z
    gamma = t * bt
    x_gamma = design.matvec(gamma)
    a = design.rmatvec(x_gamma) / n - design.xty_n
    b = a - dn * gamma

    sol_c = _solve(design, t, delta, t * a, cfg, ws.warm_c)
    c = sol_c.z
    tc = t * c
    d = design.rmatvec(design.matvec(tc)) / n - dn * tc
    zeta = 2.0 * (bt * (a - d)) - 2.0 * (b * c)

    ws.t, ws.beta_tilde, ws.a, ws.b, ws.c, ws.d, ws.zeta = t, bt, a, b, c, d, zeta
    ws.residual_term = _residual_term(design, gamma, x_gamma)
    ws.warm_beta, ws.warm_c = sol_b, sol_c
    ws.cg_iters = sol_b.iters + sol_c.iters
    ws.cg_residual = max(sol_b.residual, sol_c.residual)
    ws.cg_converged = sol_b.converged and sol_c.converged
    ws.route = sol_b.route
    return ws


def grad_f(design: ActiveDesign, t: np.ndarray, lam: float, cfg: CombssConfig, ws: GradientWorkspace) -> np.ndarray:
    """Gradient of f_lambda with respect to the active t-coordinates."""
    refresh(design, t, cfg, ws)
    return ws.zeta + lam


def grad_g(
    design: ActiveDesign,
    w: np.ndarray,
    frozen: np.ndarray,
    lam: float,
    cfg: CombssConfig,
    ws: GradientWorkspace,
) -> np.ndarray:
    """Gradient of g_lambda(w) = f_lambda(t(w)) over all p coordinates.

    ``design.active`` must be exactly the unfrozen coordinates. Frozen entries
    of the result are exactly 0.
    """
    w = np.asarray(w, dtype=float)
    out = np.zeros_like(w)
    if design.p_plus == 0:
        ws.residual_term = design.yty_n
        return out
    wa = w[design.active]
    ta = map_w_to_t(wa)
    refresh(design, ta, cfg, ws)
    out[design.active] = (ws.zeta + lam) * (2.0 * wa * np.exp(-wa * wa))
    return out


def g_value(design: ActiveDesign, w: np.ndarray, lam: float, cfg: CombssConfig, ws: GradientWorkspace) -> float:
    """g_lambda(w); coordinates outside ``design.active`` are treated as t_j = 0."""
    w = np.asarray(w, dtype=float)
    if design.p_plus == 0:
        return design.yty_n
    return objective_f(design, map_w_to_t(w[design.active]), lam, cfg, ws)
