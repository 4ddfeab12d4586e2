"""Closed-form gradient-flow trajectories for the benchmark family.

For the family X(gamma), y(alpha) the flow started at the origin stays
piecewise linear in the activation pattern, so each piece is a matrix
exponential.  For gamma = 0 a single piece runs forever; for gamma > 0
there are exactly two pieces joined at the switch time t1 where the third
sample's pre-activation returns to zero and that unit goes inactive.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .linalg_small import SymEig, expm_sym_action, solve_linear, sym_eig
from .model_core import Activation, Dataset, benchmark_dataset

T1_SCAN_MAX = 2.0
T1_SCAN_STEP = 1e-3
T1_BISECT_TOL = 1e-12


@dataclass(frozen=True)
class BenchmarkInstance:
    """Cached spectral data for one (gamma, alpha) member of the family."""

    gamma: float
    alpha: float = 1.0

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")

    @cached_property
    def dataset(self) -> Dataset:
        return benchmark_dataset(self.gamma, self.alpha)

    @cached_property
    def interpolant(self) -> np.ndarray:
        """Where the first piece of the flow is headed: the solution of
        X w = y on the full (all-active) system, alpha * (5, -1, 1)."""
        return self.alpha * np.array([5.0, -1.0, 1.0])

    @cached_property
    def eig_full(self) -> SymEig:
        X = self.dataset.X
        return sym_eig(X.T @ X)

    @cached_property
    def eig_reduced(self) -> SymEig:
        Xr = self.dataset.X[:2, :2]
        return sym_eig(Xr.T @ Xr)

    @cached_property
    def t1(self) -> float:
        """Switch time: unique positive root of the third pre-activation."""
        if self.gamma == 0:
            raise ValueError("gamma = 0 has no regime switch")
        return _find_t1(self)

    @cached_property
    def w_t1(self) -> np.ndarray:
        return self.eval_part1(self.t1)

    def eval_part1(self, t: float) -> np.ndarray:
        """First piece (all samples active): c - expm(-t X'X) c."""
        c = self.interpolant
        return c - expm_sym_action(self.eig_full, t, c)

    def eval_part2(self, t: float) -> np.ndarray:
        """Second piece (third sample inactive), valid for t >= t1."""
        target = self.alpha * np.array([5.0, -1.0])
        dev = self.w_t1[:2] - target
        w12 = target + expm_sym_action(self.eig_reduced, t - self.t1, dev)
        return np.array([w12[0], w12[1], self.w_t1[2]])

    def eval_gamma0(self, t: float) -> np.ndarray:
        """gamma = 0 trajectory: single linear piece in the first two
        coordinates, third coordinate identically zero."""
        Xr = self.dataset.X[:2, :2]
        yr = self.dataset.y[:2]
        c = solve_linear(Xr, yr)
        w12 = c - expm_sym_action(self.eig_reduced, t, c)
        return np.array([w12[0], w12[1], 0.0])

    def eval(self, t: float) -> np.ndarray:
        if t < 0:
            raise ValueError("t must be >= 0")
        if self.gamma == 0:
            return self.eval_gamma0(t)
        if t <= self.t1:
            return self.eval_part1(t)
        return self.eval_part2(t)

    @cached_property
    def limit(self) -> np.ndarray:
        """The t -> infinity endpoint of the flow."""
        if self.gamma == 0:
            return self.alpha * np.array([5.0, -1.0, 0.0])
        return np.array(
            [5.0 * self.alpha, -1.0 * self.alpha, self.w_t1[2]]
        )

    def sample(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return np.stack([self.eval(float(t)) for t in ts])

    def write_csv(self, path, ts) -> None:
        from .flow_engine import Trajectory
        from .model_core import loss, regime_pattern

        ts = np.asarray(ts, dtype=float)
        W = self.sample(ts)
        act = Activation.relu()
        losses = np.array([loss(self.dataset, act, w) for w in W])
        patterns = [regime_pattern(self.dataset, w) for w in W]
        Trajectory(t=ts, W=W, loss=losses, patterns=patterns).write_csv(path)


def _third_preactivation_scaled(inst: BenchmarkInstance, t: float) -> float:
    """x3' w(t) / alpha on the first piece, rescaled by the slowest decay
    so the root stays well separated from underflow at large t."""
    c = inst.interpolant
    x3 = inst.dataset.X[2]
    eig = inst.eig_full
    lam_min = eig.eigenvalues[-1]
    # x3' c = 0 for this family, so only the exponential part survives.
    coeffs = (eig.basis.T @ x3) * (eig.basis.T @ c)
    scaled = -np.sum(coeffs * np.exp(-(eig.eigenvalues - lam_min) * t))
    return float(scaled / inst.alpha)


def _find_t1(inst: BenchmarkInstance) -> float:
    g = lambda t: _third_preactivation_scaled(inst, t)
    lo = T1_SCAN_STEP
    glo = g(lo)
    if glo <= 0:
        raise RuntimeError("third pre-activation not positive at scan start")
    t = lo
    hi = None
    while t < T1_SCAN_MAX:
        t_next = t + T1_SCAN_STEP
        if g(t_next) <= 0:
            lo, hi = t, t_next
            break
        t = t_next
    if hi is None:
        raise RuntimeError(f"no sign change located on (0, {T1_SCAN_MAX}]")
    while hi - lo > T1_BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def closed_form_limit(gamma: float, alpha: float = 1.0) -> np.ndarray:
    return BenchmarkInstance(gamma, alpha).limit


def residual_check(
    inst: BenchmarkInstance,
    ts,
    fd_step: float = 1e-7,
    switch_window: float = 1e-6,
) -> float:
    """Max norm of d/dt w(t) + grad L(w(t)) along the closed form, with the
    derivative taken by central differences.  Times within switch_window of
    the regime switch are skipped (the derivative jumps there)."""
    from .model_core import grad

    act = Activation.relu()
    worst = 0.0
    t1 = inst.t1 if inst.gamma > 0 else None
    for t in np.asarray(ts, dtype=float):
        if t < fd_step:
            continue
        if t1 is not None and abs(t - t1) < switch_window + fd_step:
            continue
        dw = (inst.eval(t + fd_step) - inst.eval(t - fd_step)) / (2 * fd_step)
        res = np.linalg.norm(dw + grad(inst.dataset, act, inst.eval(t)))
        worst = max(worst, float(res))
    return worst
