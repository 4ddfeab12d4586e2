"""Pure-numpy reference implementations of the hot loops.

Mirrors the API of the compiled extension (_fastloops); selected as a
fallback when the extension has not been built.  Status codes shared by
both backends: 0 = loss tolerance reached, 1 = budget exhausted
(max_iters / t_max / grad_tol stop for the integrator), 2 = divergence or
non-finite state.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

DIVERGENCE_NORM = 1e12

STATUS_CONVERGED = 0
STATUS_BUDGET = 1
STATUS_DIVERGED = 2


def _act_value(z, slope):
    return np.where(z >= 0.0, z, slope * z)


def _act_deriv(z, slope, d0):
    return np.where(z > 0.0, 1.0, np.where(z < 0.0, slope, d0))


def gd_single(X, y, w0, slope, d0, lr, max_iters, loss_tol, stride):
    """Full-batch gradient descent on the single-neuron loss.

    Returns (iters, W, losses, w_final, loss_final, n_iters, status); the
    trace holds iteration 0, every stride-th iterate, and the final one.
    """
    w = np.array(w0, dtype=float)
    trace_i, trace_w, trace_l = [], [], []
    status = STATUS_BUDGET
    k = 0
    while True:
        s = X @ w
        r = _act_value(s, slope) - y
        lval = 0.5 * float(r @ r)
        if k % stride == 0:
            trace_i.append(k)
            trace_w.append(w.copy())
            trace_l.append(lval)
        if lval < loss_tol:
            status = STATUS_CONVERGED
            break
        if k >= max_iters:
            break
        g = X.T @ (r * _act_deriv(s, slope, d0))
        w = w - lr * g
        k += 1
        if not np.all(np.isfinite(w)) or np.linalg.norm(w) > DIVERGENCE_NORM:
            status = STATUS_DIVERGED
            break
    if not trace_i or trace_i[-1] != k:
        s = X @ w
        r = _act_value(s, slope) - y
        trace_i.append(k)
        trace_w.append(w.copy())
        trace_l.append(0.5 * float(r @ r))
    return (
        np.array(trace_i, dtype=np.int64),
        np.array(trace_w),
        np.array(trace_l),
        w,
        trace_l[-1],
        k,
        status,
    )


def gd_hidden(X, y, w0, v0, lr, max_iters, loss_tol, stride):
    """Full-batch gradient descent on the single-hidden-neuron (relu) loss."""
    w = np.array(w0, dtype=float)
    v = float(v0)
    trace_i, trace_w, trace_v, trace_l = [], [], [], []
    status = STATUS_BUDGET
    k = 0
    while True:
        s = X @ w
        a = np.maximum(s, 0.0)
        p = v * a - y
        lval = 0.5 * float(p @ p)
        if k % stride == 0:
            trace_i.append(k)
            trace_w.append(w.copy())
            trace_v.append(v)
            trace_l.append(lval)
        if lval < loss_tol:
            status = STATUS_CONVERGED
            break
        if k >= max_iters:
            break
        gw = v * (X.T @ (p * _act_deriv(s, 0.0, 1.0)))
        gv = float(p @ a)
        w = w - lr * gw
        v = v - lr * gv
        k += 1
        if not (np.all(np.isfinite(w)) and np.isfinite(v)) or (
            np.linalg.norm(w) > DIVERGENCE_NORM or abs(v) > DIVERGENCE_NORM
        ):
            status = STATUS_DIVERGED
            break
    if not trace_i or trace_i[-1] != k:
        s = X @ w
        p = v * np.maximum(s, 0.0) - y
        trace_i.append(k)
        trace_w.append(w.copy())
        trace_v.append(v)
        trace_l.append(0.5 * float(p @ p))
    return (
        np.array(trace_i, dtype=np.int64),
        np.array(trace_w),
        np.array(trace_v),
        np.array(trace_l),
        w,
        v,
        trace_l[-1],
        k,
        status,
    )


def _single_rhs(X, y, w, slope, d0):
    s = X @ w
    r = _act_value(s, slope) - y
    return -(X.T @ (r * _act_deriv(s, slope, d0)))


def _rk4_step_single(X, y, w, h, slope, d0):
    k1 = _single_rhs(X, y, w, slope, d0)
    k2 = _single_rhs(X, y, w + 0.5 * h * k1, slope, d0)
    k3 = _single_rhs(X, y, w + 0.5 * h * k2, slope, d0)
    k4 = _single_rhs(X, y, w + h * k3, slope, d0)
    return w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _crossed(s_old, s_new):
    return np.flatnonzero(s_old * s_new < 0.0)


def rk4_single(X, y, w0, slope, d0, step, t_max, grad_tol, loss_tol, event_tol, stride):
    """Fixed-step RK4 integration of w' = -grad L with sign-change events.

    Any step across which some x_i.w changes sign is bisected in step
    length until the crossing is localized within event_tol; the state just
    past the crossing becomes a trace sample and an event record
    (t, example index, +1/-1 for the sign of the new side).

    Returns (ts, W, losses, events, w_final, t_end, status) where events is
    a list of (t, i, direction).
    """
    w = np.array(w0, dtype=float)
    t = 0.0
    ts, ws, ls = [], [], []
    events = []
    status = STATUS_BUDGET
    n_steps = 0

    def record(tcur, wcur):
        s = X @ wcur
        r = _act_value(s, slope) - y
        ts.append(tcur)
        ws.append(wcur.copy())
        ls.append(0.5 * float(r @ r))

    record(t, w)
    while t < t_max:
        s_old = X @ w
        r = _act_value(s_old, slope) - y
        lval = 0.5 * float(r @ r)
        g = X.T @ (r * _act_deriv(s_old, slope, d0))
        if lval < loss_tol or float(np.linalg.norm(g)) < grad_tol:
            status = STATUS_CONVERGED
            break
        h = min(step, t_max - t)
        w_new = _rk4_step_single(X, y, w, h, slope, d0)
        s_new = X @ w_new
        crossings = _crossed(s_old, s_new)
        if crossings.size:
            lo, hi = 0.0, h
            while hi - lo > event_tol:
                mid = 0.5 * (lo + hi)
                w_mid = _rk4_step_single(X, y, w, mid, slope, d0)
                if _crossed(s_old, X @ w_mid).size:
                    hi = mid
                else:
                    lo = mid
            w_event = _rk4_step_single(X, y, w, hi, slope, d0)
            s_event = X @ w_event
            for i in _crossed(s_old, s_event):
                events.append((t + hi, int(i), 1 if s_event[i] > 0 else -1))
            t += hi
            w = w_event
            record(t, w)
        else:
            t += h
            w = w_new
            n_steps += 1
            if n_steps % stride == 0:
                record(t, w)
        if not np.all(np.isfinite(w)) or np.linalg.norm(w) > DIVERGENCE_NORM:
            status = STATUS_DIVERGED
            break
    if ts[-1] != t:
        record(t, w)
    return np.array(ts), np.array(ws), np.array(ls), events, w, t, status


def _hidden_rhs(X, y, w, v):
    s = X @ w
    a = np.maximum(s, 0.0)
    p = v * a - y
    gw = v * (X.T @ (p * _act_deriv(s, 0.0, 1.0)))
    gv = float(p @ a)
    return -gw, -gv


def rk4_hidden(X, y, w0, v0, step, t_max, grad_tol, loss_tol, stride):
    """Fixed-step RK4 for the hidden-neuron flow (no event refinement).

    Exists to verify the balancedness conservation law at high accuracy.
    Returns (ts, W, V, losses, w_final, v_final, t_end, status).
    """
    w = np.array(w0, dtype=float)
    v = float(v0)
    t = 0.0
    ts, ws, vs, ls = [], [], [], []
    status = STATUS_BUDGET
    n_steps = 0

    def record(tcur, wcur, vcur):
        p = vcur * np.maximum(X @ wcur, 0.0) - y
        ts.append(tcur)
        ws.append(wcur.copy())
        vs.append(vcur)
        ls.append(0.5 * float(p @ p))

    record(t, w, v)
    while t < t_max:
        gw, gv = _hidden_rhs(X, y, w, v)
        lcur = 0.5 * float(
            np.sum((v * np.maximum(X @ w, 0.0) - y) ** 2)
        )
        if lcur < loss_tol or np.hypot(np.linalg.norm(gw), gv) < grad_tol:
            status = STATUS_CONVERGED
            break
        h = min(step, t_max - t)
        k1w, k1v = gw, gv
        k2w, k2v = _hidden_rhs(X, y, w + 0.5 * h * k1w, v + 0.5 * h * k1v)
        k3w, k3v = _hidden_rhs(X, y, w + 0.5 * h * k2w, v + 0.5 * h * k2v)
        k4w, k4v = _hidden_rhs(X, y, w + h * k3w, v + h * k3v)
        w = w + (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        t += h
        n_steps += 1
        if n_steps % stride == 0:
            record(t, w, v)
        if not (np.all(np.isfinite(w)) and np.isfinite(v)) or (
            np.linalg.norm(w) > DIVERGENCE_NORM or abs(v) > DIVERGENCE_NORM
        ):
            status = STATUS_DIVERGED
            break
    if ts[-1] != t:
        record(t, w, v)
    return np.array(ts), np.array(ws), np.array(vs), np.array(ls), w, v, t, status
