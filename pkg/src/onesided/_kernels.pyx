# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: envelope scan, cell quadrature, weighted-form reduce.

Contracts match ``_fallback`` exactly; ``_backend`` picks one lane at import.
The algorithms are kept in lockstep with the pure versions so both lanes
agree to rounding error.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, pow as cpow

cnp.import_array()

_GLX, _GLW = np.polynomial.legendre.leggauss(8)
cdef double[8] GL8_X
cdef double[8] GL8_W
for _i in range(8):
    GL8_X[_i] = _GLX[_i]
    GL8_W[_i] = _GLW[_i]


cdef struct PieceBuf:
    double *lo
    double *hi
    double *beta
    double *c1
    double *pole
    Py_ssize_t size
    Py_ssize_t cap


cdef int _buf_push(PieceBuf *buf, list backing, double lo, double hi,
                   double beta, double c1, double pole) except -1:
    cdef Py_ssize_t newcap
    cdef cnp.ndarray arr
    if buf.size == buf.cap:
        newcap = buf.cap * 2
        arrs = [np.empty(newcap, dtype=np.float64) for _ in range(5)]
        for j in range(5):
            old = backing[j]
            arrs[j][: buf.size] = old[: buf.size]
            backing[j] = arrs[j]
        buf.lo = <double *> cnp.PyArray_DATA(<cnp.ndarray> backing[0])
        buf.hi = <double *> cnp.PyArray_DATA(<cnp.ndarray> backing[1])
        buf.beta = <double *> cnp.PyArray_DATA(<cnp.ndarray> backing[2])
        buf.c1 = <double *> cnp.PyArray_DATA(<cnp.ndarray> backing[3])
        buf.pole = <double *> cnp.PyArray_DATA(<cnp.ndarray> backing[4])
        buf.cap = newcap
    buf.lo[buf.size] = lo
    buf.hi[buf.size] = hi
    buf.beta[buf.size] = beta
    buf.c1[buf.size] = c1
    buf.pole[buf.size] = pole
    buf.size += 1
    return 0


def compile_plus(const double[::1] t, const double[::1] F, const double[::1] v):
    """Upper envelope of forward-window averages; see _fallback.compile_plus."""
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t cap = 4 * n + 16
    backing = [np.empty(cap, dtype=np.float64) for _ in range(5)]
    cdef PieceBuf buf
    buf.lo = <double *> cnp.PyArray_DATA(<cnp.ndarray> backing[0])
    buf.hi = <double *> cnp.PyArray_DATA(<cnp.ndarray> backing[1])
    buf.beta = <double *> cnp.PyArray_DATA(<cnp.ndarray> backing[2])
    buf.c1 = <double *> cnp.PyArray_DATA(<cnp.ndarray> backing[3])
    buf.pole = <double *> cnp.PyArray_DATA(<cnp.ndarray> backing[4])
    buf.size = 0
    buf.cap = cap

    hull = np.empty((2, n + 2), dtype=np.float64)
    cdef double[:, ::1] H = hull
    cdef Py_ssize_t h_top = 0
    H[0, 0] = t[n]
    H[1, 0] = F[n]
    cdef long ops = 1

    _buf_push(&buf, backing, t[n], INFINITY, 0.0, 0.0, 0.0)

    cdef Py_ssize_t i, m, cur, k, best_k
    cdef double A, B, xl, xr, x_hi, c1_cur, cU, tU, cV, tV, d0, d1, root
    cdef double best_root, gb, gk, s_new, tt, ff

    for i in range(n, 0, -1):
        B = v[i - 1]
        A = F[i - 1] - B * t[i - 1]
        xl = t[i - 1]
        xr = t[i]
        # ---- emit pieces on (xl, xr); anchors = hull below the top
        m = h_top  # anchors: hull indices h_top-1 .. 0, nearest first
        if m == 0:
            _buf_push(&buf, backing, xl, xr, B, 0.0, 0.0)
        else:
            c1_cur = H[1, h_top - 1] - A - B * H[0, h_top - 1]
            if c1_cur <= 0.0:
                _buf_push(&buf, backing, xl, xr, B, 0.0, 0.0)
            else:
                cur = 0
                x_hi = xr
                while True:
                    cU = H[1, h_top - 1 - cur] - A
                    tU = H[0, h_top - 1 - cur]
                    best_root = -INFINITY
                    best_k = -1
                    for k in range(m):
                        if k == cur:
                            continue
                        cV = H[1, h_top - 1 - k] - A
                        tV = H[0, h_top - 1 - k]
                        d0 = cU * tV - cV * tU
                        d1 = (cV - cU) + B * (tU - tV)
                        if d1 <= 0.0:
                            continue
                        root = -d0 / d1
                        if root >= x_hi or root <= xl:
                            continue
                        if root > best_root:
                            best_root = root
                            best_k = k
                        elif root == best_root:
                            gb = (H[1, h_top - 1 - best_k] - A - B * H[0, h_top - 1 - best_k]) / \
                                 ((H[0, h_top - 1 - best_k] - root) * (H[0, h_top - 1 - best_k] - root))
                            gk = (cV - B * tV) / ((tV - root) * (tV - root))
                            if gk < gb:
                                best_k = k
                    if best_k < 0:
                        _buf_push(&buf, backing, xl, x_hi, B, cU - B * tU, tU)
                        break
                    _buf_push(&buf, backing, best_root, x_hi, B, cU - B * tU, tU)
                    x_hi = best_root
                    cur = best_k
        # ---- push P_{i-1}, popping non-concave tops
        tt = t[i - 1]
        ff = F[i - 1]
        while h_top >= 1:
            s_new = (H[1, h_top] - ff) * (H[0, h_top - 1] - H[0, h_top]) - \
                    (H[1, h_top - 1] - H[1, h_top]) * (H[0, h_top] - tt)
            if s_new > 0.0:
                break
            h_top -= 1
            ops += 1
        h_top += 1
        H[0, h_top] = tt
        H[1, h_top] = ff
        ops += 1

    # ---- left tail (-inf, t[0]) with F = 0
    A = 0.0
    B = 0.0
    xl = -INFINITY
    xr = t[0]
    m = h_top
    if m == 0:
        _buf_push(&buf, backing, xl, xr, 0.0, 0.0, 0.0)
    else:
        c1_cur = H[1, h_top - 1]
        if c1_cur <= 0.0:
            _buf_push(&buf, backing, xl, xr, 0.0, 0.0, 0.0)
        else:
            cur = 0
            x_hi = xr
            while True:
                cU = H[1, h_top - 1 - cur]
                tU = H[0, h_top - 1 - cur]
                best_root = -INFINITY
                best_k = -1
                for k in range(m):
                    if k == cur:
                        continue
                    cV = H[1, h_top - 1 - k]
                    tV = H[0, h_top - 1 - k]
                    d0 = cU * tV - cV * tU
                    d1 = cV - cU
                    if d1 <= 0.0:
                        continue
                    root = -d0 / d1
                    if root >= x_hi or root <= xl:
                        continue
                    if root > best_root:
                        best_root = root
                        best_k = k
                    elif root == best_root:
                        gb = H[1, h_top - 1 - best_k] / \
                             ((H[0, h_top - 1 - best_k] - root) * (H[0, h_top - 1 - best_k] - root))
                        gk = cV / ((tV - root) * (tV - root))
                        if gk < gb:
                            best_k = k
                if best_k < 0:
                    _buf_push(&buf, backing, xl, x_hi, 0.0, cU, tU)
                    break
                _buf_push(&buf, backing, best_root, x_hi, 0.0, cU, tU)
                x_hi = best_root
                cur = best_k

    cdef Py_ssize_t sz = buf.size
    lo = backing[0][:sz][::-1].copy()
    hi = backing[1][:sz][::-1].copy()
    beta = backing[2][:sz][::-1].copy()
    c1 = backing[3][:sz][::-1].copy()
    pole = backing[4][:sz][::-1].copy()
    return lo, hi, beta, c1, pole, int(ops)


cdef inline double _gl8(double a, double b, double beta, double c1,
                        double pole, double p, bint plus) noexcept nogil:
    cdef double mid = 0.5 * (a + b)
    cdef double half = 0.5 * (b - a)
    cdef double acc = 0.0
    cdef double x, y
    cdef int j
    for j in range(8):
        x = mid + half * GL8_X[j]
        if plus:
            y = beta + c1 / (pole - x)
        else:
            y = beta + c1 / (x - pole)
        acc += GL8_W[j] * cpow(y, p)
    return half * acc


cdef void _adapt(double a, double b, double beta, double c1, double pole,
                 double p, bint plus, double tol, double rel, int depth, int max_depth,
                 double *val, double *err) noexcept nogil:
    cdef double whole = _gl8(a, b, beta, c1, pole, p, plus)
    cdef double mid = 0.5 * (a + b)
    cdef double left = _gl8(a, mid, beta, c1, pole, p, plus)
    cdef double right = _gl8(mid, b, beta, c1, pole, p, plus)
    cdef double fine = left + right
    cdef double e = fabs(fine - whole)
    if e <= tol or e <= rel * fabs(fine) or depth >= max_depth:
        val[0] += fine
        err[0] += e
        return
    _adapt(a, mid, beta, c1, pole, p, plus, 0.5 * tol, rel, depth + 1, max_depth, val, err)
    _adapt(mid, b, beta, c1, pole, p, plus, 0.5 * tol, rel, depth + 1, max_depth, val, err)


def integrate_power_cells(const double[::1] a, const double[::1] b, const double[::1] beta,
                          const double[::1] c1, const double[::1] pole, double p,
                          bint plus, const double[::1] tol_abs, double tol_rel=0.0,
                          int max_depth=40):
    """Adaptive GL8 per cell; see _fallback.integrate_power_cells."""
    cdef Py_ssize_t m = a.shape[0]
    vals = np.zeros(m, dtype=np.float64)
    errs = np.zeros(m, dtype=np.float64)
    cdef double[::1] V = vals
    cdef double[::1] E = errs
    cdef Py_ssize_t i
    with nogil:
        for i in range(m):
            _adapt(a[i], b[i], beta[i], c1[i], pole[i], p, plus, tol_abs[i],
                   tol_rel, 0, max_depth, &V[i], &E[i])
    return vals, errs


def form_max(const double[::1] U, const double[::1] V, const double[::1] D,
             double e1, double e2, double e3):
    """argmax / max of U^e1 * V^e2 / D^e3; earliest index wins ties."""
    cdef Py_ssize_t n = U.shape[0]
    cdef Py_ssize_t i, idx = -1
    cdef double best = -INFINITY
    cdef double val
    for i in range(n):
        val = cpow(U[i], e1) * cpow(V[i], e2) / cpow(D[i], e3)
        if val > best:
            best = val
            idx = i
    return idx, best
