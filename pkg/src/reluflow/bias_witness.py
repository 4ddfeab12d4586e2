"""Witness records: distinct flow limits sharing one zero-loss set.

Each record collects, for several values of gamma, the limit point the
flow selects.  All of those limits lie on the common zero-loss ray
{(5a, -a, s) : s <= 0}, yet at least two of them differ — which is the
empirical content behind the no-single-regularizer arguments: any norm-like
functional that explains the selection would have to take equal, minimal
values at genuinely different points of the ray.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .closed_form import BenchmarkInstance
from .flow_engine import FlowConfig, integrate_flow
from .hidden_neuron_lab import epsilon_sweep
from .model_core import Activation, benchmark_dataset

RAY_TOL = 1e-3
DISTINCT_TOL = 1e-2


def _ray_deviation(w, alpha: float) -> float:
    """Distance from w to the ray {(5a, -a, s): s <= 0}."""
    w = np.asarray(w, dtype=float)
    proj = np.array([5.0 * alpha, -alpha, min(w[2], 0.0)])
    return float(np.linalg.norm(w - proj))


@dataclass(frozen=True)
class WitnessRecord:
    gammas: tuple
    limits: np.ndarray  # row k: limit vector for gammas[k]
    alpha: float
    pairwise_distances: np.ndarray
    on_ray: bool
    distinct: bool
    failures: tuple = field(default_factory=tuple)
    extra: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return self.on_ray and self.distinct and not self.failures

    def to_json(self) -> str:
        return json.dumps(
            {
                "gammas": list(self.gammas),
                "alpha": self.alpha,
                "limits": self.limits.tolist(),
                "pairwise_distances": self.pairwise_distances.tolist(),
                "on_ray": self.on_ray,
                "distinct": self.distinct,
                "failures": list(self.failures),
                "extra": self.extra,
            },
            sort_keys=True,
        )


def _build_record(gammas, limits, alpha, failures=(), extra=None) -> WitnessRecord:
    L = np.stack(limits)
    dist = np.linalg.norm(L[:, None, :] - L[None, :, :], axis=2)
    on_ray = all(_ray_deviation(w, alpha) <= RAY_TOL * max(1.0, alpha) for w in L)
    off_diag = dist[~np.eye(len(limits), dtype=bool)]
    distinct = bool(off_diag.size and np.max(off_diag) > DISTINCT_TOL)
    return WitnessRecord(
        gammas=tuple(gammas),
        limits=L,
        alpha=alpha,
        pairwise_distances=dist,
        on_ray=on_ray,
        distinct=distinct,
        failures=tuple(failures),
        extra=extra or {},
    )


def single_neuron_witness(
    alpha: float = 1.0,
    gammas=(0.0, 1.0, 2.0, 5.0),
    use_closed_form: bool = True,
    cfg: FlowConfig = FlowConfig(),
) -> WitnessRecord:
    """Per-gamma limit points of the single-neuron flow from the origin."""
    gammas = tuple(float(g) for g in gammas)
    if len(gammas) < 2:
        raise ValueError("need at least two gamma values for distinctness")
    if 0.0 not in gammas or 5.0 not in gammas:
        raise ValueError("gammas must include 0 and 5")
    limits, failures = [], []
    act = Activation.relu()
    for g in gammas:
        if use_closed_form:
            limits.append(BenchmarkInstance(g, alpha).limit)
        else:
            ds = benchmark_dataset(g, alpha)
            _, res = integrate_flow(ds, act, np.zeros(3), cfg)
            limits.append(res.w_inf)
            if not res.converged:
                failures.append(f"gamma={g:g} did not converge")
    return _build_record(gammas, limits, alpha, failures)


def hidden_neuron_witness(
    epsilons=(1e-2, 1e-3, 1e-4),
    lr: float = 1e-5,
    max_iters: int = 20_000_000,
    loss_tol: float = 1e-15,
) -> WitnessRecord:
    """Hidden-neuron limits for gamma in {0, 5}, mapped to u-space.

    Checks that the difference u' between the two limits is orthogonal to
    the gamma=0 limit u* (so u* stays the closest ray point to both) and
    that the limits are genuinely far apart.
    """
    if min(epsilons) > 1e-4:
        raise ValueError("epsilon grid must reach 1e-4 or below")
    sweeps = {
        g: epsilon_sweep(benchmark_dataset(g), epsilons, lr, max_iters, loss_tol)
        for g in (0.0, 5.0)
    }
    failures = []
    for g, sw in sweeps.items():
        if np.any(sw.final_losses >= loss_tol):
            failures.append(f"gamma={g:g} sweep did not reach loss_tol")
        last = sw.U[-1] - sw.U[-2]
        if np.linalg.norm(last) >= 0.01:
            failures.append(f"gamma={g:g} limit not stabilized in epsilon")
    u_star = sweeps[0.0].U[-1]
    u_tilde = sweeps[5.0].U[-1]
    u_prime = u_tilde - u_star
    inner = float(np.dot(u_star, u_prime))
    extra = {
        "u_star": u_star.tolist(),
        "u_tilde": u_tilde.tolist(),
        "inner_product": inner,
        "orthogonal": bool(
            abs(inner)
            <= 1e-3 * np.linalg.norm(u_star) * np.linalg.norm(u_prime)
        ),
        "separation": float(np.linalg.norm(u_prime)),
    }
    return _build_record((0.0, 5.0), [u_star, u_tilde], 1.0, failures, extra)


def rotated_witness(
    base: WitnessRecord,
    M: np.ndarray,
    cfg: FlowConfig = FlowConfig(),
    tol: float = 1e-3,
) -> WitnessRecord:
    """Rerun the single-neuron witness on rotated inputs (X M', y) and check
    each limit equals M times the corresponding base limit."""
    M = np.asarray(M, dtype=float)
    if M.shape != (3, 3) or np.linalg.norm(M.T @ M - np.eye(3)) > 1e-10:
        raise ValueError("M must be a 3x3 rotation")
    act = Activation.relu()
    limits, failures = [], []
    for k, g in enumerate(base.gammas):
        ds0 = benchmark_dataset(g, base.alpha)
        from .model_core import Dataset

        ds = Dataset(X=ds0.X @ M.T, y=ds0.y)
        _, res = integrate_flow(ds, act, np.zeros(3), cfg)
        limits.append(res.w_inf)
        gap = float(np.linalg.norm(res.w_inf - M @ base.limits[k]))
        if not res.converged:
            failures.append(f"gamma={g:g} did not converge")
        if gap > tol:
            failures.append(f"gamma={g:g} rotated limit off by {gap:.3g}")
    L = np.stack(limits)
    dist = np.linalg.norm(L[:, None, :] - L[None, :, :], axis=2)
    off_diag = dist[~np.eye(len(limits), dtype=bool)]
    return WitnessRecord(
        gammas=base.gammas,
        limits=L,
        alpha=base.alpha,
        pairwise_distances=dist,
        on_ray=all(
            _ray_deviation(M.T @ w, base.alpha) <= RAY_TOL * max(1.0, base.alpha)
            for w in L
        ),
        distinct=bool(off_diag.size and np.max(off_diag) > DISTINCT_TOL),
        failures=tuple(failures),
        extra={"rotation": M.tolist()},
    )
