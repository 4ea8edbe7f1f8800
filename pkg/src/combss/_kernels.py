"""Compiled CG loops for the two structured operators.

Same iteration as :func:`combss.linop.cg_solve`, specialized so the whole
loop runs without Python overhead. Used only when numba is importable.
Operator (``kind`` 0), on R^p:  v -> tn * (X^T (X (t * v))) + ridge * v
Operator (``kind`` 1), on R^n:  v -> v + X (wgt * (X^T v))

Returns ``(z, iters, rr, status)`` with status 0 = converged, 1 = hit
max_iters or lost positive-definiteness, 2 = non-finite value.
"""

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    njit = None

AVAILABLE = njit is not None


def _apply(kind, x, a, b, c, v, tmp, out):
    n, p = x.shape
    if kind == 0:
        for i in range(n):
            s = 0.0
            for j in range(p):
                s += x[i, j] * (b[j] * v[j])
            tmp[i] = s
        for j in range(p):
            out[j] = 0.0
        for i in range(n):
            ti = tmp[i]
            for j in range(p):
                out[j] += x[i, j] * ti
        for j in range(p):
            out[j] = a[j] * out[j] + c[j] * v[j]
    else:
        for j in range(p):
            tmp[j] = 0.0
        for i in range(n):
            vi = v[i]
            for j in range(p):
                tmp[j] += x[i, j] * vi
        for j in range(p):
            tmp[j] *= a[j]
        for i in range(n):
            s = 0.0
            for j in range(p):
                s += x[i, j] * tmp[j]
            out[i] = v[i] + s


def _cg(kind, x, a, b, c, u, z0, tol, max_iters):
    n, p = x.shape
    dim = u.shape[0]
    tmp = np.empty(n if kind == 0 else p)
    ad = np.empty(dim)
    z = z0.copy()
    uu = 0.0
    for k in range(dim):
        uu += u[k] * u[k]
    target2 = tol * tol * uu
    r = np.empty(dim)
    _apply(kind, x, a, b, c, z, tmp, ad)
    rr = 0.0
    for k in range(dim):
        r[k] = u[k] - ad[k]
        rr += r[k] * r[k]
    if not np.isfinite(rr):
        return z, 0, rr, 2
    if rr <= target2:
        return z, 0, rr, 0
    best_z = z.copy()
    best_rr = rr
    d = r.copy()
    it = 0
    while it < max_iters:
        _apply(kind, x, a, b, c, d, tmp, ad)
        dad = 0.0
        for k in range(dim):
            dad += d[k] * ad[k]
        if not dad > 0.0:
            if dad != dad:
                return best_z, it, best_rr, 2
            break
        step = rr / dad
        rr_new = 0.0
        for k in range(dim):
            z[k] += step * d[k]
            r[k] -= step * ad[k]
            rr_new += r[k] * r[k]
        it += 1
        if not np.isfinite(rr_new):
            return best_z, it, best_rr, 2
        if rr_new <= target2:
            return z, it, rr_new, 0
        if rr_new < best_rr:
            best_rr = rr_new
            best_z[:] = z
        beta = rr_new / rr
        for k in range(dim):
            d[k] = r[k] + beta * d[k]
        rr = rr_new
    return best_z, it, best_rr, 1


if AVAILABLE:
    _apply = njit(cache=True, nogil=True)(_apply)
    cg_structured = njit(cache=True, nogil=True)(_cg)
else:  # pragma: no cover
    cg_structured = None
