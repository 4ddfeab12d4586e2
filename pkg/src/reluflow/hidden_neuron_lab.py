"""Experiments on the two-layer scalar-output model v * relu(X w).

The quantity v^2 - ||w||^2 is conserved by the gradient flow of this
model, so a run started at (w, v) = (0, eps) keeps v^2 = ||w||^2 + eps^2.
The lab trains over a grid of eps values, maps each run back to the
single-neuron coordinates through u = v * w, and checks the rotation and
scaling equivariances of the training map.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .flow_engine import GDResult, GDTrace, run_gd_hidden
from .model_core import Dataset, HiddenParams

DEFAULT_EPSILONS = tuple(10.0 ** (-k) for k in range(6))


def psi(u) -> HiddenParams:
    """Balanced lift of a single-neuron vector: (u / sqrt||u||, sqrt||u||)."""
    u = np.asarray(u, dtype=float)
    r = float(np.linalg.norm(u))
    if r == 0.0:
        return HiddenParams(w=np.zeros_like(u), v=0.0)
    return HiddenParams(w=u / np.sqrt(r), v=np.sqrt(r))


def psi_inv(theta: HiddenParams) -> np.ndarray:
    """Collapse back to single-neuron coordinates, u = v * w."""
    return theta.u


def train_from_epsilon(
    ds: Dataset,
    epsilon: float,
    lr: float = 1e-5,
    max_iters: int = 20_000_000,
    loss_tol: float = 1e-15,
    stride: int = 1000,
) -> tuple[GDTrace, GDResult]:
    """Gradient descent from the near-zero balanced start (w, v) = (0, eps)."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    theta0 = HiddenParams(w=np.zeros(ds.d), v=float(epsilon))
    return run_gd_hidden(ds, theta0, lr, max_iters, loss_tol, stride)


def balancedness_drift(trace: GDTrace) -> float:
    """Max drift of the conserved quantity v^2 - ||w||^2 along a trace."""
    if trace.V is None:
        raise ValueError("trace has no second-layer column")
    q = trace.V**2 - np.sum(trace.W**2, axis=1)
    return float(np.max(np.abs(q - q[0])))


@dataclass(frozen=True)
class EpsilonSweep:
    epsilons: np.ndarray
    U: np.ndarray  # row k: final u for epsilons[k]
    final_losses: np.ndarray
    iters: np.ndarray
    drifts: np.ndarray

    def write_csv(self, path) -> None:
        d = self.U.shape[1]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["epsilon"] + [f"u{i + 1}" for i in range(d)] + ["final_loss", "iters"]
            )
            for k in range(self.epsilons.shape[0]):
                writer.writerow(
                    [f"{self.epsilons[k]:.17g}"]
                    + [f"{x:.17g}" for x in self.U[k]]
                    + [f"{self.final_losses[k]:.17g}", str(int(self.iters[k]))]
                )


def epsilon_sweep(
    ds: Dataset,
    epsilons=DEFAULT_EPSILONS,
    lr: float = 1e-5,
    max_iters: int = 20_000_000,
    loss_tol: float = 1e-15,
    stride: int = 1000,
) -> EpsilonSweep:
    """Train from (0, eps) for each eps and collect the u-space limits."""
    epsilons = np.asarray(sorted(epsilons, reverse=True), dtype=float)
    rows, losses, iters, drifts = [], [], [], []
    for eps in epsilons:
        trace, res = train_from_epsilon(ds, float(eps), lr, max_iters, loss_tol, stride)
        rows.append(res.u_final)
        losses.append(res.final_loss)
        iters.append(res.n_iters)
        drifts.append(balancedness_drift(trace))
    return EpsilonSweep(
        epsilons=epsilons,
        U=np.stack(rows),
        final_losses=np.array(losses),
        iters=np.array(iters, dtype=np.int64),
        drifts=np.array(drifts),
    )


def random_rotation(d: int, seed: int) -> np.ndarray:
    """Haar-ish random rotation (orthogonal, determinant +1)."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def check_rotation_equivariance(
    ds: Dataset,
    M: np.ndarray,
    epsilon: float = 1e-2,
    lr: float = 1e-5,
    max_iters: int = 20_000_000,
    loss_tol: float = 1e-15,
) -> float:
    """Discrepancy ||u_rot - M u_base|| between training on (X M', y) and
    rotating the limit of training on (X, y).  Gradient descent commutes
    with rotations of the input features, so this is numerical noise."""
    M = np.asarray(M, dtype=float)
    ds_rot = Dataset(X=ds.X @ M.T, y=ds.y)
    _, base = train_from_epsilon(ds, epsilon, lr, max_iters, loss_tol)
    _, rot = train_from_epsilon(ds_rot, epsilon, lr, max_iters, loss_tol)
    return float(np.linalg.norm(rot.u_final - M @ base.u_final))


def check_scaling_equivariance(
    ds: Dataset,
    scale: float,
    epsilon: float = 1e-2,
    lr: float = 1e-5,
    max_iters: int = 20_000_000,
    loss_tol: float = 1e-15,
) -> float:
    """Discrepancy for label scaling: descent on (X, a*y) from (0, eps) with
    rate lr matches sqrt(a) times descent on (X, y) from (0, eps/sqrt(a))
    with rate a*lr, step for step.  Returns ||u_scaled - a * u_ref||."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    ds_scaled = Dataset(X=ds.X, y=scale * ds.y)
    _, big = train_from_epsilon(
        ds_scaled, epsilon, lr, max_iters, loss_tol * scale**2
    )
    _, ref = train_from_epsilon(
        ds, epsilon / np.sqrt(scale), lr * scale, max_iters, loss_tol
    )
    return float(np.linalg.norm(big.u_final - scale * ref.u_final))
