# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops; mirrors the _pyloops API exactly.

Shared status codes: 0 = loss tolerance reached, 1 = budget exhausted,
2 = divergence / non-finite state.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, isfinite, sqrt

cnp.import_array()

BACKEND = "cython"

DIVERGENCE_NORM = 1e12

STATUS_CONVERGED = 0
STATUS_BUDGET = 1
STATUS_DIVERGED = 2

cdef double _DIV = 1e12


cdef inline double _act(double z, double slope) noexcept nogil:
    return z if z >= 0.0 else slope * z


cdef inline double _dact(double z, double slope, double d0) noexcept nogil:
    if z > 0.0:
        return 1.0
    if z < 0.0:
        return slope
    return d0


cdef inline double _loss_and_grad(double[:, ::1] X, double[::1] y, double[::1] w,
                                  double slope, double d0, double[::1] g) noexcept nogil:
    """Fill g with grad L(w) and return L(w)."""
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], i, j
    cdef double s, r, c, lval = 0.0
    for j in range(d):
        g[j] = 0.0
    for i in range(n):
        s = 0.0
        for j in range(d):
            s += X[i, j] * w[j]
        r = _act(s, slope) - y[i]
        lval += 0.5 * r * r
        c = r * _dact(s, slope, d0)
        for j in range(d):
            g[j] += c * X[i, j]
    return lval


cdef inline double _norm(double[::1] v) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t j
    for j in range(v.shape[0]):
        acc += v[j] * v[j]
    return sqrt(acc)


cdef inline bint _bad(double[::1] w) noexcept nogil:
    cdef Py_ssize_t j
    for j in range(w.shape[0]):
        if not isfinite(w[j]):
            return True
    return _norm(w) > _DIV


def gd_single(X, y, w0, double slope, double d0, double lr,
              long long max_iters, double loss_tol, long long stride):
    cdef double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef cnp.ndarray wn = np.array(w0, dtype=np.float64)
    cdef double[::1] w = wn
    cdef Py_ssize_t d = w.shape[0], j
    cdef double[::1] g = np.empty(d)
    cdef double lval
    cdef long long k = 0
    cdef int status = STATUS_BUDGET
    trace_i, trace_w, trace_l = [], [], []
    while True:
        lval = _loss_and_grad(Xv, yv, w, slope, d0, g)
        if k % stride == 0:
            trace_i.append(k)
            trace_w.append(np.asarray(w).copy())
            trace_l.append(lval)
        if lval < loss_tol:
            status = STATUS_CONVERGED
            break
        if k >= max_iters:
            break
        for j in range(d):
            w[j] -= lr * g[j]
        k += 1
        if _bad(w):
            status = STATUS_DIVERGED
            break
    if not trace_i or trace_i[len(trace_i) - 1] != k:
        lval = _loss_and_grad(Xv, yv, w, slope, d0, g)
        trace_i.append(k)
        trace_w.append(np.asarray(w).copy())
        trace_l.append(lval)
    return (np.array(trace_i, dtype=np.int64), np.array(trace_w),
            np.array(trace_l), wn, trace_l[len(trace_l) - 1], k, status)


cdef inline double _hidden_loss_grad(double[:, ::1] X, double[::1] y,
                                     double[::1] w, double v,
                                     double[::1] gw, double* gv) noexcept nogil:
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], i, j
    cdef double s, a, p, c, lval = 0.0
    for j in range(d):
        gw[j] = 0.0
    gv[0] = 0.0
    for i in range(n):
        s = 0.0
        for j in range(d):
            s += X[i, j] * w[j]
        a = s if s > 0.0 else 0.0
        p = v * a - y[i]
        lval += 0.5 * p * p
        c = v * p * _dact(s, 0.0, 1.0)
        for j in range(d):
            gw[j] += c * X[i, j]
        gv[0] += p * a
    return lval


cdef double _hidden_loss_only(double[:, ::1] X, double[::1] y,
                              double[::1] w, double v) noexcept nogil:
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], i, j
    cdef double s, p, lval = 0.0
    for i in range(n):
        s = 0.0
        for j in range(d):
            s += X[i, j] * w[j]
        p = v * (s if s > 0.0 else 0.0) - y[i]
        lval += 0.5 * p * p
    return lval


def gd_hidden(X, y, w0, double v0, double lr,
              long long max_iters, double loss_tol, long long stride):
    cdef double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef cnp.ndarray wn = np.array(w0, dtype=np.float64)
    cdef double[::1] w = wn
    cdef double v = v0
    cdef Py_ssize_t d = w.shape[0], j
    cdef double[::1] gw = np.empty(d)
    cdef double gv = 0.0, lval
    cdef long long k = 0
    cdef int status = STATUS_BUDGET
    trace_i, trace_w, trace_v, trace_l = [], [], [], []
    while True:
        lval = _hidden_loss_grad(Xv, yv, w, v, gw, &gv)
        if k % stride == 0:
            trace_i.append(k)
            trace_w.append(np.asarray(w).copy())
            trace_v.append(v)
            trace_l.append(lval)
        if lval < loss_tol:
            status = STATUS_CONVERGED
            break
        if k >= max_iters:
            break
        for j in range(d):
            w[j] -= lr * gw[j]
        v -= lr * gv
        k += 1
        if _bad(w) or not isfinite(v) or fabs(v) > _DIV:
            status = STATUS_DIVERGED
            break
    if not trace_i or trace_i[len(trace_i) - 1] != k:
        lval = _hidden_loss_grad(Xv, yv, w, v, gw, &gv)
        trace_i.append(k)
        trace_w.append(np.asarray(w).copy())
        trace_v.append(v)
        trace_l.append(lval)
    return (np.array(trace_i, dtype=np.int64), np.array(trace_w),
            np.array(trace_v), np.array(trace_l), wn, v, trace_l[len(trace_l) - 1], k, status)


cdef inline void _rk4_step(double[:, ::1] X, double[::1] y, double[::1] w,
                           double h, double slope, double d0,
                           double[::1] out, double[::1] tmp,
                           double[::1] k1, double[::1] k2,
                           double[::1] k3, double[::1] k4) noexcept nogil:
    cdef Py_ssize_t d = w.shape[0], j
    _loss_and_grad(X, y, w, slope, d0, k1)
    for j in range(d):
        tmp[j] = w[j] - 0.5 * h * k1[j]
    _loss_and_grad(X, y, tmp, slope, d0, k2)
    for j in range(d):
        tmp[j] = w[j] - 0.5 * h * k2[j]
    _loss_and_grad(X, y, tmp, slope, d0, k3)
    for j in range(d):
        tmp[j] = w[j] - h * k3[j]
    _loss_and_grad(X, y, tmp, slope, d0, k4)
    for j in range(d):
        out[j] = w[j] - (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])


cdef inline int _count_crossings(double[:, ::1] X, double[::1] s_old,
                                 double[::1] w, double[::1] s_new) noexcept nogil:
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1], i, j
    cdef double s
    cdef int count = 0
    for i in range(n):
        s = 0.0
        for j in range(d):
            s += X[i, j] * w[j]
        s_new[i] = s
        if s_old[i] * s < 0.0:
            count += 1
    return count


def rk4_single(X, y, w0, double slope, double d0, double step, double t_max,
               double grad_tol, double loss_tol, double event_tol, long long stride):
    cdef double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef cnp.ndarray wn = np.array(w0, dtype=np.float64)
    cdef double[::1] w = wn
    cdef Py_ssize_t n = Xv.shape[0], d = w.shape[0], i, j
    cdef double[::1] g = np.empty(d), w_new = np.empty(d), w_mid = np.empty(d)
    cdef double[::1] tmp = np.empty(d), k1 = np.empty(d), k2 = np.empty(d)
    cdef double[::1] k3 = np.empty(d), k4 = np.empty(d)
    cdef double[::1] s_old = np.empty(n), s_new = np.empty(n), s_mid = np.empty(n)
    cdef double t = 0.0, h, lval, lo, hi, mid
    cdef long long n_steps = 0
    cdef int status = STATUS_BUDGET
    ts, ws, ls, events = [], [], [], []

    def record(tcur):
        ts.append(tcur)
        ws.append(np.asarray(w).copy())
        ls.append(_loss_and_grad(Xv, yv, w, slope, d0, g))

    record(t)
    while t < t_max:
        lval = _loss_and_grad(Xv, yv, w, slope, d0, g)
        for i in range(n):
            s_old[i] = 0.0
            for j in range(d):
                s_old[i] += Xv[i, j] * w[j]
        if lval < loss_tol or _norm(g) < grad_tol:
            status = STATUS_CONVERGED
            break
        h = step if step < t_max - t else t_max - t
        _rk4_step(Xv, yv, w, h, slope, d0, w_new, tmp, k1, k2, k3, k4)
        if _count_crossings(Xv, s_old, w_new, s_new) > 0:
            lo = 0.0
            hi = h
            while hi - lo > event_tol:
                mid = 0.5 * (lo + hi)
                _rk4_step(Xv, yv, w, mid, slope, d0, w_mid, tmp, k1, k2, k3, k4)
                if _count_crossings(Xv, s_old, w_mid, s_mid) > 0:
                    hi = mid
                else:
                    lo = mid
            _rk4_step(Xv, yv, w, hi, slope, d0, w_mid, tmp, k1, k2, k3, k4)
            _count_crossings(Xv, s_old, w_mid, s_mid)
            for i in range(n):
                if s_old[i] * s_mid[i] < 0.0:
                    events.append((t + hi, int(i), 1 if s_mid[i] > 0 else -1))
            t += hi
            for j in range(d):
                w[j] = w_mid[j]
            record(t)
        else:
            t += h
            for j in range(d):
                w[j] = w_new[j]
            n_steps += 1
            if n_steps % stride == 0:
                record(t)
        if _bad(w):
            status = STATUS_DIVERGED
            break
    if ts[len(ts) - 1] != t:
        record(t)
    return np.array(ts), np.array(ws), np.array(ls), events, wn, t, status


def rk4_hidden(X, y, w0, double v0, double step, double t_max,
               double grad_tol, double loss_tol, long long stride):
    cdef double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef cnp.ndarray wn = np.array(w0, dtype=np.float64)
    cdef double[::1] w = wn
    cdef double v = v0
    cdef Py_ssize_t d = w.shape[0], j
    cdef double[::1] gw = np.empty(d), tmp = np.empty(d)
    cdef double[::1] k1w = np.empty(d), k2w = np.empty(d)
    cdef double[::1] k3w = np.empty(d), k4w = np.empty(d)
    cdef double k1v = 0.0, k2v = 0.0, k3v = 0.0, k4v = 0.0
    cdef double t = 0.0, h, lval, gv = 0.0, tv
    cdef long long n_steps = 0
    cdef int status = STATUS_BUDGET
    ts, ws, vs, ls = [], [], [], []

    def record(tcur):
        ts.append(tcur)
        ws.append(np.asarray(w).copy())
        vs.append(v)
        ls.append(_hidden_loss_only(Xv, yv, w, v))

    record(t)
    while t < t_max:
        lval = _hidden_loss_grad(Xv, yv, w, v, k1w, &k1v)
        if lval < loss_tol or sqrt(_norm(k1w) ** 2 + k1v * k1v) < grad_tol:
            status = STATUS_CONVERGED
            break
        h = step if step < t_max - t else t_max - t
        for j in range(d):
            tmp[j] = w[j] - 0.5 * h * k1w[j]
        tv = v - 0.5 * h * k1v
        _hidden_loss_grad(Xv, yv, tmp, tv, k2w, &k2v)
        for j in range(d):
            tmp[j] = w[j] - 0.5 * h * k2w[j]
        tv = v - 0.5 * h * k2v
        _hidden_loss_grad(Xv, yv, tmp, tv, k3w, &k3v)
        for j in range(d):
            tmp[j] = w[j] - h * k3w[j]
        tv = v - h * k3v
        _hidden_loss_grad(Xv, yv, tmp, tv, k4w, &k4v)
        for j in range(d):
            w[j] -= (h / 6.0) * (k1w[j] + 2.0 * k2w[j] + 2.0 * k3w[j] + k4w[j])
        v -= (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        t += h
        n_steps += 1
        if n_steps % stride == 0:
            record(t)
        if _bad(w) or not isfinite(v) or fabs(v) > _DIV:
            status = STATUS_DIVERGED
            break
    if ts[len(ts) - 1] != t:
        record(t)
    return np.array(ts), np.array(ws), np.array(vs), np.array(ls), wn, v, t, status
