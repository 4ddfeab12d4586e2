"""Minimum-norm interpolants and the distance-factor diagnostic.

For an invertible activation the zero-loss set is the affine set
{w : X w = sigma_inverse(y)}, and the point of it closest to w0 comes
from the normal equations of the KKT system.  For the ReLU benchmark
family the zero-loss set is instead a ray, whose closest point to the
origin is known in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg_small import solve_linear
from .model_core import Activation, Dataset


@dataclass(frozen=True)
class MinNormSolution:
    w_star: np.ndarray
    multipliers: np.ndarray
    distance: float  # ||w_star - w0||


def min_norm_interpolant(ds: Dataset, act: Activation, w0) -> MinNormSolution:
    """Closest point to w0 on {w : sigma(X w) = y}, for invertible sigma.

    Solves X X' lam = sigma_inverse(y) - X w0 and returns w0 + X' lam.
    """
    if not act.invertible:
        raise ValueError("activation must be invertible; use the family "
                         "helper for the ReLU benchmark instances")
    w0 = np.asarray(w0, dtype=float)
    if w0.shape != (ds.d,):
        raise ValueError(f"w0 shape {w0.shape} does not match d={ds.d}")
    z = act.inverse(ds.y)
    lam = solve_linear(ds.X @ ds.X.T, z - ds.X @ w0)
    w_star = w0 + ds.X.T @ lam
    return MinNormSolution(
        w_star=w_star,
        multipliers=lam,
        distance=float(np.linalg.norm(w_star - w0)),
    )


def relu_family_min_norm(alpha: float = 1.0) -> MinNormSolution:
    """Closest point to the origin on the ReLU zero-loss ray
    {(5a, -a, s) : s <= 0} of the benchmark family: a * (5, -1, 0)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    w_star = alpha * np.array([5.0, -1.0, 0.0])
    return MinNormSolution(
        w_star=w_star,
        multipliers=np.zeros(3),
        distance=float(np.linalg.norm(w_star)),
    )


def penalized_min_norm(
    ds: Dataset, act: Activation, w0, rho: float = 1e8
) -> np.ndarray:
    """Independent cross-check of min_norm_interpolant: the minimizer of
    ||w - w0||^2 + rho ||X w - sigma_inverse(y)||^2, which approaches the
    constrained solution as rho grows."""
    if not act.invertible:
        raise ValueError("activation must be invertible")
    w0 = np.asarray(w0, dtype=float)
    z = act.inverse(ds.y)
    A = np.eye(ds.d) + rho * ds.X.T @ ds.X
    return np.linalg.solve(A, w0 + rho * ds.X.T @ z)


def relu_min_norm(ds: Dataset, w0, feas_tol: float = 1e-10) -> np.ndarray:
    """Closest point to w0 on the ReLU zero-loss set {w : relu(X w) = y}.

    Rows with y_i > 0 pin x_i' w = y_i; rows with y_i = 0 only require
    x_i' w <= 0.  The projection onto that polyhedral set is found by
    enumerating active subsets of the inequality rows (n is tiny here) and
    keeping the feasible equality-constrained projection of least distance.
    """
    w0 = np.asarray(w0, dtype=float)
    if np.any(ds.y < 0):
        raise ValueError("targets must be nonnegative for a ReLU zero-loss set")
    pos = np.flatnonzero(ds.y > 0)
    zero = np.flatnonzero(ds.y == 0)
    best, best_dist = None, np.inf
    for mask in range(1 << len(zero)):
        active = [zero[j] for j in range(len(zero)) if mask >> j & 1]
        rows = list(pos) + active
        if rows:
            A = ds.X[rows]
            b = np.concatenate([ds.y[pos], np.zeros(len(active))])
            lam, *_ = np.linalg.lstsq(A @ A.T, b - A @ w0, rcond=None)
            w = w0 + A.T @ lam
            if np.max(np.abs(A @ w - b)) > feas_tol:
                continue  # inconsistent active set
        else:
            w = w0.copy()
        if np.any(ds.X[zero] @ w > feas_tol):
            continue
        dist = float(np.linalg.norm(w - w0))
        if dist < best_dist:
            best, best_dist = w, dist
    if best is None:
        raise ValueError("instance is not realizable by a ReLU neuron")
    return best


def factor2_ratio(w_inf, w_star, w0) -> float:
    """||w_inf - w0|| / ||w_star - w0||; the flow keeps this at most 2."""
    w_inf = np.asarray(w_inf, dtype=float)
    w_star = np.asarray(w_star, dtype=float)
    w0 = np.asarray(w0, dtype=float)
    denom = float(np.linalg.norm(w_star - w0))
    if denom == 0.0:
        raise ValueError("w_star coincides with w0; ratio undefined")
    return float(np.linalg.norm(w_inf - w0)) / denom
