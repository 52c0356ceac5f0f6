# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.

Every function here has a NumPy twin in ``_kernels_py`` with the same
signature and the same arithmetic; ``_backend`` picks one at import time.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, fmin, fmax, exp, log, sqrt, INFINITY, isinf

cnp.import_array()

cdef double GOLD = 0.6180339887498949
cdef int GOLD_STEPS = 64


def k_diag_l1(double[::1] w0, double[::1] w1, double[::1] ax, double[::1] ts):
    """Closed-form K for diagonal weighted l1 pairs at every scale in ``ts``."""
    cdef Py_ssize_t d = ax.shape[0], m = ts.shape[0], i, j
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    cdef double acc, t
    for j in range(m):
        t = ts[j]
        acc = 0.0
        for i in range(d):
            acc += fmin(w0[i], t * w1[i]) * ax[i]
        o[j] = acc
    return out


cdef inline double wnorm(double[::1] w, double[::1] v, double p, Py_ssize_t d) nogil:
    cdef double acc = 0.0, a
    cdef Py_ssize_t i
    if isinf(p):
        for i in range(d):
            a = fabs(w[i] * v[i])
            if a > acc:
                acc = a
        return acc
    if p == 1.0:
        for i in range(d):
            acc += fabs(w[i] * v[i])
        return acc
    for i in range(d):
        a = fabs(w[i] * v[i])
        if a > 0.0:
            acc += pow(a, p)
    return pow(acc, 1.0 / p)


cdef inline double objective(double[::1] w0, double p0, double[::1] w1, double p1,
                             double[::1] x, double[::1] y, double[::1] r,
                             double t, Py_ssize_t d) nogil:
    cdef Py_ssize_t i
    for i in range(d):
        r[i] = x[i] - y[i]
    return wnorm(w0, y, p0, d) + t * wnorm(w1, r, p1, d)


cdef double line_search(double[::1] w0, double p0, double[::1] w1, double p1,
                        double[::1] x, double[::1] y, double[::1] dirn,
                        double[::1] trial, double[::1] r, double t, Py_ssize_t d,
                        double fcur, double* best_alpha) nogil:
    """Golden-section search along ``dirn`` inside the box spanned by 0 and x."""
    cdef double lo = -INFINITY, hi = INFINITY, a, b, ai, bi, c, e, fc, fe, fm, fa, fb
    cdef double alpha, fbest
    cdef Py_ssize_t i, k
    for i in range(d):
        if dirn[i] == 0.0:
            continue
        a = fmin(0.0, x[i]) - y[i]
        b = fmax(0.0, x[i]) - y[i]
        ai = a / dirn[i]
        bi = b / dirn[i]
        if ai > bi:
            ai, bi = bi, ai
        lo = fmax(lo, ai)
        hi = fmin(hi, bi)
    best_alpha[0] = 0.0
    if not (hi > lo) or isinf(lo) or isinf(hi):
        return fcur
    c = hi - GOLD * (hi - lo)
    e = lo + GOLD * (hi - lo)
    for i in range(d):
        trial[i] = y[i] + c * dirn[i]
    fc = objective(w0, p0, w1, p1, x, trial, r, t, d)
    for i in range(d):
        trial[i] = y[i] + e * dirn[i]
    fe = objective(w0, p0, w1, p1, x, trial, r, t, d)
    a = lo
    b = hi
    for k in range(GOLD_STEPS):
        if fc <= fe:
            b = e
            e = c
            fe = fc
            c = b - GOLD * (b - a)
            for i in range(d):
                trial[i] = y[i] + c * dirn[i]
            fc = objective(w0, p0, w1, p1, x, trial, r, t, d)
        else:
            a = c
            c = e
            fc = fe
            e = a + GOLD * (b - a)
            for i in range(d):
                trial[i] = y[i] + e * dirn[i]
            fe = objective(w0, p0, w1, p1, x, trial, r, t, d)
    alpha = 0.0
    fbest = fcur
    # the interval ends are where some coordinate lands on 0 or on x_i;
    # polyhedral objectives attain their minimum there
    for k in range(3):
        if k == 0:
            c = lo
        elif k == 1:
            c = hi
        else:
            c = 0.5 * (a + b)
        for i in range(d):
            trial[i] = y[i] + c * dirn[i]
        fm = objective(w0, p0, w1, p1, x, trial, r, t, d)
        if fm < fbest:
            fbest = fm
            alpha = c
    best_alpha[0] = alpha
    return fbest


cdef bint tie_direction(double[::1] w, double[::1] x, double[::1] y, double[::1] dirn,
                        bint residual, bint skip_blocked, Py_ssize_t d) nogil:
    """Move every coordinate tied at the max of a weighted sup-norm together.

    With ``residual`` the norm is taken of x - y, otherwise of y. A zero norm
    ties every coordinate. ``skip_blocked`` drops coordinates already sitting
    on the face of the box that the move would push them through.
    """
    cdef double top = 0.0, scale = 0.0, v
    cdef Py_ssize_t k
    cdef bint any_dir = False
    for k in range(d):
        v = fabs(w[k] * (x[k] - y[k])) if residual else fabs(w[k] * y[k])
        top = fmax(top, v)
        scale = fmax(scale, fabs(w[k] * x[k]))
    # ties are judged on the scale of x, since x - y carries its rounding
    top -= 1e-12 * scale
    for k in range(d):
        dirn[k] = 0.0
        if w[k] <= 0.0 or x[k] == 0.0:
            continue
        v = fabs(w[k] * (x[k] - y[k])) if residual else fabs(w[k] * y[k])
        if v < top:
            continue
        if skip_blocked and fabs(y[k] if residual else x[k] - y[k]) <= 1e-12 * fabs(x[k]):
            continue
        dirn[k] = (1.0 if x[k] > 0 else -1.0) / w[k]
        any_dir = True
    return any_dir


def lattice_pair_descent(double[::1] w0, double p0, double[::1] w1, double p1,
                         double[::1] x, double t, double tol, long maxit):
    """Minimise ||w0*y||_p0 + t||w1*(x-y)||_p1 over y by coordinate descent.

    Returns ``(y, value, iterations, converged)``.
    """
    cdef Py_ssize_t d = x.shape[0], i, j, k
    y_arr = np.zeros(d)
    cdef double[::1] y = y_arr
    cdef double[::1] r = np.empty(d)
    cdef double[::1] trial = np.empty(d)
    cdef double[::1] dirn = np.zeros(d)
    cdef double[::1] ystart = np.empty(d)
    cdef double f, fx, fstart, fnew, alpha
    cdef long it = 0
    cdef bint converged = False, improved, moved
    f = objective(w0, p0, w1, p1, x, y, r, t, d)
    fx = objective(w0, p0, w1, p1, x, x, r, t, d)
    if fx < f:
        for i in range(d):
            y[i] = x[i]
        f = fx
    while it < maxit:
        fstart = f
        for i in range(d):
            ystart[i] = y[i]
        for i in range(d):
            if x[i] == 0.0:
                continue
            for k in range(d):
                dirn[k] = 0.0
            dirn[i] = 1.0
            fnew = line_search(w0, p0, w1, p1, x, y, dirn, trial, r, t, d, f, &alpha)
            if fnew < f:
                y[i] += alpha
                f = fnew
            it += 1
        # pattern move along the net displacement of the sweep
        moved = False
        for k in range(d):
            dirn[k] = y[k] - ystart[k]
            if dirn[k] != 0.0:
                moved = True
        if moved:
            fnew = line_search(w0, p0, w1, p1, x, y, dirn, trial, r, t, d, f, &alpha)
            it += 1
            if fnew < f:
                for k in range(d):
                    y[k] += alpha * dirn[k]
                f = fnew
        if fstart - f > tol * fmax(f, 1e-300):
            continue
        # coordinate moves stalled: try coupled directions before giving up
        improved = False
        for j in range(-6, d * d):
            for k in range(d):
                dirn[k] = 0.0
            if j == -6:
                for k in range(d):
                    dirn[k] = x[k] - y[k]
            elif j == -5:
                for k in range(d):
                    dirn[k] = -y[k]
            elif j < -2:
                if not tie_direction(w1, x, y, dirn, True, j == -3, d):
                    continue
            elif j < 0:
                if not tie_direction(w0, x, y, dirn, False, j == -1, d):
                    continue
            else:
                i = j // d
                k = j % d
                if i >= k or x[i] == 0.0 or x[k] == 0.0:
                    continue
                dirn[i] = 1.0 if x[i] > 0 else -1.0
                dirn[k] = 1.0 if x[k] > 0 else -1.0
                fnew = line_search(w0, p0, w1, p1, x, y, dirn, trial, r, t, d, f, &alpha)
                it += 1
                if f - fnew > tol * fmax(f, 1e-300):
                    for i in range(d):
                        y[i] += alpha * dirn[i]
                    f = fnew
                    improved = True
                dirn[k] = -dirn[k]
            fnew = line_search(w0, p0, w1, p1, x, y, dirn, trial, r, t, d, f, &alpha)
            it += 1
            if f - fnew > tol * fmax(f, 1e-300):
                for i in range(d):
                    y[i] += alpha * dirn[i]
                f = fnew
                improved = True
        if not improved:
            converged = True
            break
    return y_arr, f, it, converged


cdef inline double _power(double v, int mode, int ip, double p) nogil:
    cdef double r
    cdef int k
    if mode == 1:
        return v
    if mode == 2:
        return v * v
    if mode == 3:
        r = v
        for k in range(1, ip):
            r *= v
        return r
    if mode == 5:
        # p = ip + 1/2
        r = sqrt(v)
        for k in range(ip):
            r *= v
        return r
    if v == 0.0:
        return 0.0
    return exp(p * log(v))


cdef inline double _fold(double acc, double v, int mode, int ip, double p) nogil:
    if mode == 0:
        return v if v > acc else acc
    return acc + _power(v, mode, ip, p)


def shift_diff_norms(double[:, :, ::1] f, long[:, ::1] shifts, double p):
    """Sum over the grid of |f(x+h) - f(x)|**p for each lattice shift h.

    For ``p = inf`` the maximum is returned instead of the sum.
    """
    cdef Py_ssize_t n0 = f.shape[0], n1 = f.shape[1], n2 = f.shape[2]
    cdef Py_ssize_t m = shifts.shape[0], s, a, b, c, a2, b2, c2, j, row = n1 * n2, off
    cdef long h0, h1, h2
    out = np.empty(m)
    cdef double[::1] o = out
    cdef double acc
    cdef const double* base
    cdef const double* src
    cdef int mode, ip = 0
    if isinf(p):
        mode = 0
    elif p == 1.0:
        mode = 1
    elif p == 2.0:
        mode = 2
    elif p == <int>p and p <= 8.0:
        mode, ip = 3, <int>p
    elif 2.0 * p == <int>(2.0 * p) and p <= 8.0:
        mode, ip = 5, <int>(p - 0.5)
    else:
        mode = 4
    with nogil:
        for s in range(m):
            h0 = ((shifts[s, 0] % n0) + n0) % n0
            h1 = ((shifts[s, 1] % n1) + n1) % n1
            h2 = ((shifts[s, 2] % n2) + n2) % n2
            acc = 0.0
            for a in range(n0):
                a2 = a + h0
                if a2 >= n0:
                    a2 -= n0
                base = &f[a, 0, 0]
                src = &f[a2, 0, 0]
                if h2 == 0:
                    # the (b, c) plane shifted by h1 rows is two contiguous runs
                    off = h1 * n2
                    for j in range(row - off):
                        acc = _fold(acc, fabs(src[j + off] - base[j]), mode, ip, p)
                    for j in range(row - off, row):
                        acc = _fold(acc, fabs(src[j + off - row] - base[j]), mode, ip, p)
                    continue
                for b in range(n1):
                    b2 = b + h1
                    if b2 >= n1:
                        b2 -= n1
                    for c in range(n2):
                        c2 = c + h2
                        if c2 >= n2:
                            c2 -= n2
                        acc = _fold(acc, fabs(src[b2 * n2 + c2] - base[b * n2 + c]), mode, ip, p)
            o[s] = acc
    return out
