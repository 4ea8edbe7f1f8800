import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from combss.grad import GradientWorkspace, g_value, grad_f, grad_g, map_w_to_t, objective_f, refresh
from combss.linop import ActiveDesign
from combss.model import CombssConfig
from combss.path import refit_ols
from combss.model import Subset

from conftest import dense_Lt, dense_objective, two_feature_data, random_instance

TIGHT = CombssConfig(cg_tol=1e-12)


def test_map_values():
    assert np.array_equal(map_w_to_t(np.zeros(3)), np.zeros(3))
    assert map_w_to_t(np.array([math.sqrt(math.log(2))]))[0] == pytest.approx(0.5, abs=1e-15)
    t = map_w_to_t(np.array([1.0, -1.0]))
    assert t[0] == t[1] == pytest.approx(1 - math.exp(-1))


def test_empty_active_set():
    d = random_instance(20, 4, seed=1)
    ws = GradientWorkspace()
    design = ActiveDesign(d, [])
    assert g_value(design, np.zeros(4), 0.7, TIGHT, ws) == pytest.approx(float(d.y @ d.y) / 20)
    g = grad_g(design, np.zeros(4), np.ones(4, bool), 0.7, TIGHT, ws)
    assert not g.any()


def test_null_objective():
    d = random_instance(20, 4, seed=2)
    f = objective_f(ActiveDesign(d), np.zeros(4), 0.0, TIGHT, GradientWorkspace())
    assert f == pytest.approx(float(d.y @ d.y) / 20, rel=1e-12)


def test_interior_objective_matches_dense_pipeline(small_data):
    d = small_data
    t = np.random.default_rng(0).uniform(0.05, 0.95, d.p)
    f = objective_f(ActiveDesign(d), t, 0.3, TIGHT, GradientWorkspace())
    assert f == pytest.approx(dense_objective(d.x, d.y, t, 0.3, float(d.n)), rel=1e-9)


def test_workspace_buffers_match_definitions(small_data):
    d = small_data
    n, delta = d.n, float(d.n)
    t = np.random.default_rng(1).uniform(0.05, 0.95, d.p)
    ws = refresh(ActiveDesign(d), t, TIGHT, GradientWorkspace())
    L = dense_Lt(d.x, t, delta)
    gram = d.x.T @ d.x / n
    xty = d.x.T @ d.y / n
    bt = np.linalg.solve(L, t * xty)
    a = gram @ (t * bt) - xty
    b = a - delta / n * (t * bt)
    c = np.linalg.solve(L, t * a)
    dd = (gram - delta / n * np.eye(d.p)) @ (t * c)
    for got, want in [(ws.beta_tilde, bt), (ws.a, a), (ws.b, b), (ws.c, c), (ws.d, dd)]:
        assert np.allclose(got, want, rtol=1e-8, atol=1e-10)
    assert np.allclose(ws.zeta, 2 * bt * (a - dd) - 2 * b * c, rtol=1e-8, atol=1e-10)


def test_corner_fit_reproduces_ols():
    d = random_instance(40, 5, rho=0.5, seed=3)
    s = np.array([1, 0, 1, 1, 0], bool)
    t = np.where(s, 1 - 1e-12, 0.0)
    ws = GradientWorkspace()
    objective_f(ActiveDesign(d), t, 0.0, TIGHT, ws)
    fitted = d.x @ (ws.t * ws.beta_tilde)
    ref = refit_ols(d, Subset.from_mask(s))
    assert np.allclose(fitted, d.x[:, s] @ ref.coeffs, atol=1e-8)


def test_two_feature_data_saturated_fit_approaches_ols():
    d = two_feature_data(0)
    full = d.x @ np.linalg.lstsq(d.x, d.y, rcond=None)[0]
    gaps = []
    for eps in (1e-2, 1e-4, 1e-6):
        ws = GradientWorkspace()
        objective_f(ActiveDesign(d), np.full(2, 1 - eps), 0.0, TIGHT, ws)
        gaps.append(np.max(np.abs(d.x @ (ws.t * ws.beta_tilde) - full)))
    assert gaps[0] > gaps[1] > gaps[2] and gaps[2] < 1e-4


def test_zero_w_has_zero_gradient(small_data):
    d = small_data
    w = np.full(d.p, 0.7)
    w[[2, 5]] = 0.0
    frozen = w == 0
    g = grad_g(ActiveDesign(d, np.flatnonzero(~frozen)), w, frozen, 0.4, TIGHT, GradientWorkspace())
    assert g[2] == 0.0 and g[5] == 0.0 and np.all(g[~frozen] != 0)


def test_partial_tends_to_lambda_at_zero(small_data):
    d = small_data
    lam = 0.25
    t = np.full(d.p, 0.6)
    vals = []
    for tj in (1e-2, 1e-4, 1e-6):
        t[0] = tj
        vals.append(grad_f(ActiveDesign(d), t, lam, TIGHT, GradientWorkspace())[0])
    errs = [abs(v - lam) for v in vals]
    assert errs[0] > errs[1] > errs[2] and errs[2] < 1e-4


def test_zeta_independent_of_lambda(small_data):
    d = small_data
    t = np.random.default_rng(2).uniform(0.1, 0.9, d.p)
    zs = []
    for lam in (0.0, 1.0, 10.0):
        ws = GradientWorkspace()
        grad_f(ActiveDesign(d), t, lam, TIGHT, ws)
        zs.append(ws.zeta.copy())
    assert np.array_equal(zs[0], zs[1]) and np.array_equal(zs[0], zs[2])


def _central_difference(fun, w, h=1e-6):
    out = np.empty_like(w)
    for j in range(w.shape[0]):
        e = np.zeros_like(w)
        e[j] = h
        out[j] = (fun(w + e) - fun(w - e)) / (2 * h)
    return out


def fd_mismatch(d, w, lam, cfg):
    """Worst relative gap between grad_g (under ``cfg``) and a dense-solve finite difference."""
    g = grad_g(ActiveDesign(d), w, np.zeros(d.p, bool), lam, cfg, GradientWorkspace())
    fd = _central_difference(lambda v: dense_objective(d.x, d.y, map_w_to_t(v), lam, float(d.n)), w)
    err = np.abs(g - fd)
    rel = np.where(err <= 1e-8, 0.0, err / np.maximum(np.abs(fd), 1e-300))
    return float(rel.max())


def random_w(rng, p):
    return rng.uniform(0.3, 1.8, p) * rng.choice([-1.0, 1.0], p)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6), rho=st.sampled_from([0.0, 0.8]), lam=st.floats(0.0, 2.0))
def test_gradient_matches_finite_differences(seed, rho, lam):
    d = random_instance(30, 10, rho=rho, seed=seed)
    cfg = CombssConfig(cg_tol=1e-10, cg_max_iters=200)
    assert fd_mismatch(d, random_w(np.random.default_rng(seed), 10), lam, cfg) <= 1e-4


def test_library_objective_consistent_with_gradient(small_data):
    # finite differences through the library's own solves need a tighter CG
    d = small_data
    cfg = CombssConfig(cg_tol=1e-13, cg_max_iters=200)
    w = random_w(np.random.default_rng(4), d.p)
    design = ActiveDesign(d)
    g = grad_g(design, w, np.zeros(d.p, bool), 0.3, cfg, GradientWorkspace())
    fd = _central_difference(lambda v: g_value(design, v, 0.3, cfg, GradientWorkspace()), w)
    assert np.allclose(g, fd, rtol=1e-5, atol=1e-8)


def test_active_set_reduction_matches_full(small_data):
    d = small_data
    rng = np.random.default_rng(3)
    t = rng.uniform(0.1, 0.9, d.p)
    dead = np.array([1, 4, 7])
    t[dead] = 0.0
    live = np.setdiff1d(np.arange(d.p), dead)
    cfg = CombssConfig(cg_tol=1e-13)
    full_ws, red_ws = GradientWorkspace(), GradientWorkspace()
    gf = grad_f(ActiveDesign(d), t, 0.5, cfg, full_ws)
    gr = grad_f(ActiveDesign(d, live), t[live], 0.5, cfg, red_ws)
    assert np.max(np.abs(gf[live] - gr)) <= 1e-10
    ff = objective_f(ActiveDesign(d), t, 0.5, cfg, GradientWorkspace())
    fr = objective_f(ActiveDesign(d, live), t[live], 0.5, cfg, GradientWorkspace())
    assert abs(ff - fr) <= 1e-10


def test_corner_equivalence_all_corners():
    d = random_instance(50, 8, rho=0.3, seed=4)
    design = ActiveDesign(d)
    for lam in (0.0, 0.5):
        for bits in itertools.product([0, 1], repeat=8):
            s = np.array(bits, bool)
            t = np.where(s, 1 - 1e-12, 0.0)
            f = objective_f(design, t, lam, TIGHT, GradientWorkspace())
            want = refit_ols(d, Subset.from_mask(s)).train_mse + lam * s.sum()
            assert abs(f - want) <= 1e-8


def test_continuity_toward_corner():
    # the gap is O(2^-l) but need not shrink monotonically for small l (see ledger)
    d = random_instance(40, 4, rho=0.5, seed=5)
    s = np.array([1, 0, 1, 0], float)
    corner = refit_ols(d, Subset.from_mask(s > 0)).train_mse + 0.2 * s.sum()
    gaps = []
    for l in range(5, 21):
        t = s * (1 - 2.0**-l) + (1 - s) * 2.0**-l * 0.5
        f = objective_f(ActiveDesign(d), t, 0.2, TIGHT, GradientWorkspace())
        assert f == pytest.approx(dense_objective(d.x, d.y, t, 0.2, 40.0), abs=1e-12)
        gaps.append(abs(f - corner))
    tail = gaps[5:]
    assert all(b < a for a, b in zip(tail, tail[1:]))
    assert gaps[-1] <= 1e-6


def test_large_w_saturates_without_nan(small_data):
    d = small_data
    w = np.full(d.p, 40.0)
    g = grad_g(ActiveDesign(d), w, np.zeros(d.p, bool), 0.1, TIGHT, GradientWorkspace())
    assert np.all(np.isfinite(g))
