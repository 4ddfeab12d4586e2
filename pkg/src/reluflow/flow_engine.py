"""Gradient-flow integration and the finite-step gradient-descent driver.

integrate_flow runs classical RK4 on w' = -grad L with bisection-refined
localization of activation-regime switches; run_gd / run_gd_hidden are the
plain full-batch descent loops used for the depth-2 experiments.  The
inner loops live in reluflow.kernels (compiled when available).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .model_core import Activation, Dataset, HiddenParams, regime_pattern


class DivergenceError(RuntimeError):
    """The iteration left the trust region (norm above 1e12 or non-finite)."""


@dataclass(frozen=True)
class FlowConfig:
    step: float = 1e-4
    t_max: float = 50.0
    grad_tol: float = 1e-10
    loss_tol: float = 1e-14
    event_refine_tol: float = 1e-10
    stride: int = 100

    def __post_init__(self):
        for name in ("step", "t_max", "grad_tol", "loss_tol", "event_refine_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.event_refine_tol >= self.step:
            raise ValueError("event_refine_tol must be smaller than step")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")


@dataclass(frozen=True)
class Trajectory:
    """Sampled flow path: times, states, losses, regime patterns, events."""

    t: np.ndarray
    W: np.ndarray
    loss: np.ndarray
    patterns: list[str]
    events: list[tuple[float, int, int]] = field(default_factory=list)

    def __len__(self) -> int:
        return self.t.shape[0]

    def write_csv(self, path) -> None:
        d = self.W.shape[1]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"w{i + 1}" for i in range(d)] + ["loss", "pattern"])
            for k in range(len(self)):
                writer.writerow(
                    [f"{self.t[k]:.17g}"]
                    + [f"{x:.17g}" for x in self.W[k]]
                    + [f"{self.loss[k]:.17g}", self.patterns[k]]
                )


@dataclass(frozen=True)
class FlowResult:
    w_inf: np.ndarray
    converged: bool
    final_loss: float
    final_grad_norm: float
    t_end: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "w_inf": self.w_inf.tolist(),
                "converged": self.converged,
                "final_loss": self.final_loss,
                "final_grad_norm": self.final_grad_norm,
                "t_end": self.t_end,
            }
        )


def integrate_flow(
    ds: Dataset, act: Activation, w0, cfg: FlowConfig = FlowConfig()
) -> tuple[Trajectory, FlowResult]:
    """Integrate the single-neuron gradient flow from w0."""
    w0 = np.asarray(w0, dtype=float)
    if w0.shape != (ds.d,):
        raise ValueError(f"w0 shape {w0.shape} does not match d={ds.d}")
    ts, W, losses, events, w_final, t_end, status = kernels.rk4_single(
        ds.X,
        ds.y,
        w0,
        act.slope,
        act.derivative_at_zero,
        cfg.step,
        cfg.t_max,
        cfg.grad_tol,
        cfg.loss_tol,
        cfg.event_refine_tol,
        cfg.stride,
    )
    if status == kernels.STATUS_DIVERGED:
        raise DivergenceError(f"flow diverged near t={t_end:.6g}")
    traj = Trajectory(
        t=ts,
        W=W,
        loss=losses,
        patterns=[regime_pattern(ds, W[k]) for k in range(ts.shape[0])],
        events=[(float(t), int(i), int(s)) for t, i, s in events],
    )
    from .model_core import grad as _grad

    g = _grad(ds, act, w_final)
    result = FlowResult(
        w_inf=w_final,
        converged=status == kernels.STATUS_CONVERGED,
        final_loss=float(losses[-1]),
        final_grad_norm=float(np.linalg.norm(g)),
        t_end=float(t_end),
    )
    return traj, result


@dataclass(frozen=True)
class GDTrace:
    """Thinned iterate trace of a gradient-descent run."""

    iters: np.ndarray
    W: np.ndarray
    losses: np.ndarray
    V: np.ndarray | None = None  # hidden mode only

    def __len__(self) -> int:
        return self.iters.shape[0]


@dataclass(frozen=True)
class GDResult:
    w_final: np.ndarray
    v_final: float | None
    final_loss: float
    n_iters: int
    converged: bool

    @property
    def u_final(self) -> np.ndarray:
        if self.v_final is None:
            raise ValueError("u_final is defined for hidden mode only")
        return self.v_final * self.w_final


def run_gd(
    ds: Dataset,
    act: Activation,
    w0,
    lr: float,
    max_iters: int = 10_000_000,
    loss_tol: float = 1e-15,
    stride: int = 1000,
) -> tuple[GDTrace, GDResult]:
    """Plain full-batch gradient descent on the single-neuron loss."""
    if lr < 0:
        raise ValueError("learning rate must be >= 0")
    w0 = np.asarray(w0, dtype=float)
    if w0.shape != (ds.d,):
        raise ValueError(f"w0 shape {w0.shape} does not match d={ds.d}")
    iters, W, losses, w_final, loss_final, n_iters, status = kernels.gd_single(
        ds.X, ds.y, w0, act.slope, act.derivative_at_zero, lr, max_iters, loss_tol, stride
    )
    if status == kernels.STATUS_DIVERGED:
        raise DivergenceError(f"gradient descent diverged at iteration {n_iters}")
    trace = GDTrace(iters=iters, W=W, losses=losses)
    return trace, GDResult(
        w_final=w_final,
        v_final=None,
        final_loss=float(loss_final),
        n_iters=int(n_iters),
        converged=status == kernels.STATUS_CONVERGED,
    )


def run_gd_hidden(
    ds: Dataset,
    theta0: HiddenParams,
    lr: float,
    max_iters: int = 20_000_000,
    loss_tol: float = 1e-15,
    stride: int = 1000,
) -> tuple[GDTrace, GDResult]:
    """Gradient descent on the single-hidden-neuron loss from theta0."""
    if lr < 0:
        raise ValueError("learning rate must be >= 0")
    if theta0.w.shape != (ds.d,):
        raise ValueError(f"w0 shape {theta0.w.shape} does not match d={ds.d}")
    iters, W, V, losses, w_final, v_final, loss_final, n_iters, status = (
        kernels.gd_hidden(
            ds.X, ds.y, theta0.w, theta0.v, lr, max_iters, loss_tol, stride
        )
    )
    if status == kernels.STATUS_DIVERGED:
        raise DivergenceError(f"gradient descent diverged at iteration {n_iters}")
    trace = GDTrace(iters=iters, W=W, losses=losses, V=V)
    return trace, GDResult(
        w_final=w_final,
        v_final=float(v_final),
        final_loss=float(loss_final),
        n_iters=int(n_iters),
        converged=status == kernels.STATUS_CONVERGED,
    )


def integrate_hidden_flow(
    ds: Dataset,
    theta0: HiddenParams,
    step: float = 1e-4,
    t_max: float = 50.0,
    grad_tol: float = 1e-10,
    loss_tol: float = 1e-14,
    stride: int = 100,
) -> tuple[GDTrace, GDResult]:
    """RK4 integration of the hidden-neuron flow (conservation-law checks).

    The trace's iters column holds sample times scaled by 1/step.
    """
    ts, W, V, losses, w_final, v_final, t_end, status = kernels.rk4_hidden(
        ds.X, ds.y, theta0.w, theta0.v, step, t_max, grad_tol, loss_tol, stride
    )
    if status == kernels.STATUS_DIVERGED:
        raise DivergenceError(f"hidden flow diverged near t={t_end:.6g}")
    trace = GDTrace(
        iters=np.round(ts / step).astype(np.int64), W=W, losses=losses, V=V
    )
    return trace, GDResult(
        w_final=w_final,
        v_final=float(v_final),
        final_loss=float(losses[-1]),
        n_iters=int(round(t_end / step)),
        converged=status == kernels.STATUS_CONVERGED,
    )


def monotone_distance_check(traj: Trajectory, ref) -> float:
    """Largest increase of ||w(t) - ref|| between consecutive samples.

    For a zero-loss reference point the flow keeps this distance
    non-increasing, so the return value is at most numerical slack.
    """
    ref = np.asarray(ref, dtype=float)
    dist = np.linalg.norm(traj.W - ref[None, :], axis=1)
    if dist.shape[0] < 2:
        return 0.0
    return float(np.max(np.diff(dist)))
