"""NumPy / pure-Python twins of the compiled kernels in ``_kernels.pyx``."""
import math

import numpy as np

GOLD = 0.6180339887498949
GOLD_STEPS = 64


def k_diag_l1(w0, w1, ax, ts):
    """Closed-form K for diagonal weighted l1 pairs at every scale in ``ts``."""
    ts = np.asarray(ts, dtype=np.float64)
    return (np.minimum(w0[None, :], ts[:, None] * w1[None, :]) * ax[None, :]).sum(axis=1)


def _wnorm(w, v, p):
    if math.isinf(p):
        return max((abs(a * b) for a, b in zip(w, v)), default=0.0)
    if p == 1.0:
        acc = 0.0
        for a, b in zip(w, v):
            acc += abs(a * b)
        return acc
    acc = 0.0
    for a, b in zip(w, v):
        c = abs(a * b)
        if c > 0.0:
            acc += c ** p
    return acc ** (1.0 / p)


def _objective(w0, p0, w1, p1, x, y, t):
    return _wnorm(w0, y, p0) + t * _wnorm(w1, [a - b for a, b in zip(x, y)], p1)


def _line_search(phi_at, y, dirn, lo_box, hi_box, fcur):
    lo, hi = -math.inf, math.inf
    for yi, di, a_i, b_i in zip(y, dirn, lo_box, hi_box):
        if di == 0.0:
            continue
        ai = (a_i - yi) / di
        bi = (b_i - yi) / di
        if ai > bi:
            ai, bi = bi, ai
        lo = max(lo, ai)
        hi = min(hi, bi)
    if not hi > lo or math.isinf(lo) or math.isinf(hi):
        return fcur, 0.0

    def phi(alpha):
        return phi_at([yi + alpha * di for yi, di in zip(y, dirn)])

    c = hi - GOLD * (hi - lo)
    e = lo + GOLD * (hi - lo)
    fc, fe = phi(c), phi(e)
    a, b = lo, hi
    for _ in range(GOLD_STEPS):
        if fc <= fe:
            b, e, fe = e, c, fc
            c = b - GOLD * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, e, fe
            e = a + GOLD * (b - a)
            fe = phi(e)
    alpha, fbest = 0.0, fcur
    for cand in (lo, hi, 0.5 * (a + b)):
        fm = phi(cand)
        if fm < fbest:
            fbest, alpha = fm, cand
    return fbest, alpha


def box_descent(objective, x, lo_box, hi_box, tol, maxit, tie_directions=None):
    """Coordinate descent for a convex ``objective`` on a box.

    Starts from the better of ``0`` and ``x``; each sweep ends with a pattern
    move along its net displacement. When a sweep stalls, coupled directions
    are tried: towards ``x``, towards ``0``, whatever ``tie_directions(y, j)``
    proposes for j = -4..-1, and every signed pair of coordinates.
    Returns ``(y, value, iterations, converged)``.
    """
    x = [float(v) for v in x]
    lo_box = [float(v) for v in lo_box]
    hi_box = [float(v) for v in hi_box]
    d = len(x)
    y = [0.0] * d
    f = objective(y)
    fx = objective(x)
    if fx < f:
        y, f = list(x), fx
    it = 0
    converged = False
    floor = 1e-300

    def accept(dirn):
        nonlocal f, y, it
        fnew, alpha = _line_search(objective, y, dirn, lo_box, hi_box, f)
        it += 1
        if f - fnew > tol * max(f, floor):
            y = [yi + alpha * di for yi, di in zip(y, dirn)]
            f = fnew
            return True
        return False

    while it < maxit:
        fstart = f
        ystart = list(y)
        for i in range(d):
            if lo_box[i] == hi_box[i]:
                continue
            dirn = [0.0] * d
            dirn[i] = 1.0
            fnew, alpha = _line_search(objective, y, dirn, lo_box, hi_box, f)
            if fnew < f:
                y[i] += alpha
                f = fnew
            it += 1
        dirn = [a - b for a, b in zip(y, ystart)]
        if any(dirn):
            fnew, alpha = _line_search(objective, y, dirn, lo_box, hi_box, f)
            it += 1
            if fnew < f:
                y = [yi + alpha * di for yi, di in zip(y, dirn)]
                f = fnew
        if fstart - f > tol * max(f, floor):
            continue
        improved = False
        for j in range(-6, d * d):
            if j == -6:
                dirn = [xi - yi for xi, yi in zip(x, y)]
            elif j == -5:
                dirn = [-yi for yi in y]
            elif j < 0:
                dirn = tie_directions(y, j) if tie_directions is not None else None
                if dirn is None:
                    continue
            else:
                i, k = divmod(j, d)
                if i >= k or x[i] == 0.0 or x[k] == 0.0:
                    continue
                dirn = [0.0] * d
                dirn[i] = 1.0 if x[i] > 0 else -1.0
                dirn[k] = 1.0 if x[k] > 0 else -1.0
                improved |= accept(list(dirn))
                dirn[k] = -dirn[k]
            improved |= accept(dirn)
        if not improved:
            converged = True
            break
    return np.array(y), f, it, converged


def _tie_direction(w, x, y, residual, skip_blocked):
    vals = [abs(wk * (xk - yk)) if residual else abs(wk * yk) for wk, xk, yk in zip(w, x, y)]
    top = max(vals, default=0.0)
    # ties are judged on the scale of x, since x - y carries its rounding
    cut = top - 1e-12 * max((abs(wk * xk) for wk, xk in zip(w, x)), default=0.0)
    out = [0.0] * len(x)
    found = False
    for k, (wk, xk, yk, v) in enumerate(zip(w, x, y, vals)):
        if wk <= 0.0 or xk == 0.0 or v < cut:
            continue
        if skip_blocked and abs(yk if residual else xk - yk) <= 1e-12 * abs(xk):
            continue
        out[k] = (1.0 if xk > 0 else -1.0) / wk
        found = True
    return out if found else None


def _tie_directions(w0, w1, x):
    def directions(y, j):
        if j < -2:
            return _tie_direction(w1, x, y, True, j == -3)
        return _tie_direction(w0, x, y, False, j == -1)
    return directions


def lattice_pair_descent(w0, p0, w1, p1, x, t, tol, maxit):
    """Minimise ||w0*y||_p0 + t||w1*(x-y)||_p1 over y by coordinate descent.

    Returns ``(y, value, iterations, converged)``.
    """
    w0 = [float(v) for v in w0]
    w1 = [float(v) for v in w1]
    x = [float(v) for v in x]
    return box_descent(
        lambda y: _objective(w0, p0, w1, p1, x, y, t),
        x,
        [min(0.0, v) for v in x],
        [max(0.0, v) for v in x],
        tol,
        maxit,
        _tie_directions(w0, w1, x),
    )


def shift_diff_norms(f, shifts, p):
    """Sum over the grid of |f(x+h) - f(x)|**p for each lattice shift h.

    For ``p = inf`` the maximum is returned instead of the sum.
    """
    out = np.empty(len(shifts))
    for s, h in enumerate(shifts):
        v = np.abs(np.roll(f, shift=tuple(-int(c) for c in h), axis=(0, 1, 2)) - f)
        if math.isinf(p):
            out[s] = v.max()
        elif p == 1.0:
            out[s] = v.sum()
        elif p == 2.0:
            out[s] = np.dot(v.ravel(), v.ravel())
        else:
            out[s] = (v ** p).sum()
    return out
