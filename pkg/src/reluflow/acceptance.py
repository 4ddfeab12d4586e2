"""The acceptance suite: one callable per headline claim of the lab.

Each criterion returns a dict with `name`, `passed`, and a `details`
string; `run_all` executes them in order.  Tolerances are fixed here, not
parameters, so a passing suite means the same thing everywhere.  `fast`
switches the slow gradient-descent criteria from learning rate 1e-5 to
1e-4; everything checked stays the same.
"""

from __future__ import annotations

import time

import numpy as np

from .bias_witness import hidden_neuron_witness, single_neuron_witness
from .closed_form import BenchmarkInstance
from .flow_engine import FlowConfig, integrate_flow, integrate_hidden_flow
from .hidden_neuron_lab import (
    balancedness_drift,
    check_rotation_equivariance,
    check_scaling_equivariance,
    epsilon_sweep,
    random_rotation,
    train_from_epsilon,
)
from .linalg_small import sym_eig
from .minnorm_kkt import factor2_ratio, min_norm_interpolant, relu_min_norm
from .model_core import Activation, Dataset, HiddenParams, benchmark_dataset
from .flow_engine import monotone_distance_check

GAMMAS = (0.0, 1.0, 2.0, 5.0)
S_INTERVALS = {1.0: (-0.045, -0.035), 2.0: (-0.12, -0.1), 5.0: (-0.22, -0.2)}
T1_BRACKETS = {1.0: (0.169, 0.17), 2.0: (0.138, 0.139), 5.0: (0.086, 0.087)}


def _result(name: str, passed: bool, details: str) -> dict:
    return {"name": name, "passed": bool(passed), "details": details}


def _flow_limit(gamma: float, cfg: FlowConfig = FlowConfig()):
    ds = benchmark_dataset(gamma)
    return integrate_flow(ds, Activation.relu(), np.zeros(3), cfg)


def check_family_limits(fast: bool = False) -> dict:
    """Limit points of the benchmark family, closed form vs integrated."""
    t0 = time.perf_counter()
    ok, notes = True, []
    for g in GAMMAS:
        w_cf = BenchmarkInstance(g).limit
        _, res = _flow_limit(g)
        gap = float(np.linalg.norm(w_cf - res.w_inf))
        if gap > 1e-3 or not res.converged:
            ok = False
        if g == 0.0:
            if np.max(np.abs(w_cf - [5, -1, 0])) > 1e-3:
                ok = False
            notes.append(f"g=0: w={np.round(w_cf, 6).tolist()} gap={gap:.2e}")
        else:
            lo, hi = S_INTERVALS[g]
            if not (lo < w_cf[2] < hi and lo < res.w_inf[2] < hi):
                ok = False
            notes.append(f"g={g:g}: s={w_cf[2]:.6f} gap={gap:.2e}")
    dt = time.perf_counter() - t0
    if dt > 10.0:
        ok = False
    return _result("family_limits", ok, "; ".join(notes) + f"; {dt:.2f}s")


def check_switch_times(fast: bool = False) -> dict:
    """Regime-switch times land in their certified brackets."""
    t0 = time.perf_counter()
    ok, notes = True, []
    for g, (lo, hi) in T1_BRACKETS.items():
        t1 = BenchmarkInstance(g).t1
        if not (lo < t1 < hi):
            ok = False
        notes.append(f"g={g:g}: t1={t1:.6f} in ({lo},{hi})")
    dt = time.perf_counter() - t0
    if dt > 1.0:
        ok = False
    return _result("switch_times", ok, "; ".join(notes) + f"; {dt:.2f}s")


def check_spectral_goldens(fast: bool = False) -> dict:
    """Eigenvalues of the family Gram matrices match exact values."""
    worst = 0.0
    ev = sym_eig(np.array([[25.0, 5.0], [5.0, 5.0]])).eigenvalues
    expected2 = np.array([15 + 5 * np.sqrt(5), 15 - 5 * np.sqrt(5)])
    worst = max(worst, float(np.max(np.abs(ev - expected2))))
    golden3 = {
        1.0: [13.5 + np.sqrt(649) / 2, 5.0, 13.5 - np.sqrt(649) / 2],
        2.0: [14 + 2 * np.sqrt(39), 10.0, 14 - 2 * np.sqrt(39)],
        5.0: [27.5 + 2.5 * np.sqrt(105), 25.0, 27.5 - 2.5 * np.sqrt(105)],
    }
    for g, expected in golden3.items():
        X = benchmark_dataset(g).X
        ev = sym_eig(X @ X.T).eigenvalues
        worst = max(worst, float(np.max(np.abs(ev - np.array(expected)))))
    return _result("spectral_goldens", worst <= 1e-10, f"max dev {worst:.2e}")


def check_alpha_scaling(fast: bool = False) -> dict:
    """Limit points scale linearly in the target scale alpha."""
    worst = 0.0
    for g in GAMMAS:
        base = BenchmarkInstance(g, 1.0).limit
        for a in (0.5, 1.0, 3.0):
            dev = np.max(np.abs(BenchmarkInstance(g, a).limit - a * base))
            worst = max(worst, float(dev))
    return _result("alpha_scaling", worst <= 1e-10, f"max dev {worst:.2e}")


def check_closed_form_vs_ode(fast: bool = False) -> dict:
    """Sup-norm gap on [0, 10] between closed form and the integrator,
    plus the finite-difference residual of the closed form itself."""
    from .closed_form import residual_check

    worst_gap, worst_res = 0.0, 0.0
    cfg = FlowConfig(t_max=10.0, grad_tol=1e-300, loss_tol=1e-300)
    for g in GAMMAS:
        inst = BenchmarkInstance(g)
        traj, _ = integrate_flow(inst.dataset, Activation.relu(), np.zeros(3), cfg)
        gaps = [
            np.linalg.norm(inst.eval(float(t)) - traj.W[k])
            for k, t in enumerate(traj.t)
        ]
        worst_gap = max(worst_gap, float(np.max(gaps)))
        ts = np.linspace(0.01, 10.0, 400)
        worst_res = max(worst_res, residual_check(inst, ts))
    ok = worst_gap <= 1e-3 and worst_res <= 1e-5
    return _result(
        "closed_form_vs_ode", ok, f"sup gap {worst_gap:.2e}, residual {worst_res:.2e}"
    )


def _random_instance(rng, n: int, d: int = 3, cond_max: float = 25.0):
    while True:
        X = rng.standard_normal((n, d))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        s = np.linalg.svd(X, compute_uv=False)
        if s[-1] > 0 and (s[0] / s[-1]) ** 2 <= cond_max:
            return X


def check_invertible_min_norm(fast: bool = False) -> dict:
    """Flow limits for an invertible leaky activation match the
    KKT minimum-distance interpolant, over random full-row-rank data."""
    rng = np.random.default_rng(20260826)
    act = Activation.leaky(0.5)
    cfg = FlowConfig(step=1e-2, t_max=5000.0, grad_tol=1e-11, loss_tol=1e-300)
    worst = 0.0
    n_checked = 0
    while n_checked < 50:
        n = int(rng.integers(1, 4))
        X = _random_instance(rng, n)
        y = act.value(X @ rng.standard_normal(3))
        ds = Dataset(X=X, y=y)
        w0 = np.zeros(3)
        _, res = integrate_flow(ds, act, w0, cfg)
        if not res.converged:
            continue
        sol = min_norm_interpolant(ds, act, w0)
        worst = max(worst, float(np.linalg.norm(res.w_inf - sol.w_star)))
        n_checked += 1
    return _result(
        "invertible_min_norm", worst <= 1e-4, f"50 instances, max gap {worst:.2e}"
    )


def check_factor_two_census(fast: bool = False) -> dict:
    """||w(inf) - w0|| <= 2 ||w* - w0|| over random realizable ReLU data,
    plus monotone distance-to-limit on the benchmark trajectories."""
    rng = np.random.default_rng(4213)
    act = Activation.relu()
    cfg = FlowConfig(step=1e-2, t_max=2000.0, grad_tol=1e-11, loss_tol=1e-300)
    worst_ratio, n_checked = 0.0, 0
    while n_checked < 200:
        n = int(rng.integers(1, 4))
        X = _random_instance(rng, n)
        y = act.value(X @ rng.standard_normal(3))
        ds = Dataset(X=X, y=y)
        _, res = integrate_flow(ds, act, np.zeros(3), cfg)
        if not res.converged:
            continue
        w_star = relu_min_norm(ds, np.zeros(3))
        if np.linalg.norm(w_star) < 1e-9:
            continue  # zero is already an interpolant; ratio undefined
        worst_ratio = max(worst_ratio, factor2_ratio(res.w_inf, w_star, np.zeros(3)))
        n_checked += 1
    worst_mono = 0.0
    for g in GAMMAS:
        inst = BenchmarkInstance(g)
        traj, _ = integrate_flow(inst.dataset, act, np.zeros(3), FlowConfig())
        worst_mono = max(worst_mono, monotone_distance_check(traj, inst.limit))
    ok = worst_ratio <= 2 + 1e-6 and worst_mono <= 1e-6
    return _result(
        "factor_two_census",
        ok,
        f"200 instances, max ratio {worst_ratio:.6f}; max distance increase {worst_mono:.2e}",
    )


def check_balancedness(fast: bool = False) -> dict:
    """v^2 - ||w||^2 conservation: tiny drift under RK4 flow, O(lr) drift
    under gradient descent that halves when the rate halves."""
    ds = benchmark_dataset(5.0)
    theta0 = HiddenParams(w=np.zeros(3), v=1e-2)
    trace, _ = integrate_hidden_flow(ds, theta0, step=1e-4, t_max=20.0, stride=100)
    rk4_drift = balancedness_drift(trace)
    lr = 1e-5
    tr1, _ = train_from_epsilon(ds, 1e-2, lr, stride=100)
    tr2, _ = train_from_epsilon(ds, 1e-2, lr / 2, stride=100)
    d1, d2 = balancedness_drift(tr1), balancedness_drift(tr2)
    halves = d2 <= 0.6 * d1
    ok = rk4_drift <= 1e-8 and d1 <= 1e-4 and halves
    return _result(
        "balancedness",
        ok,
        f"rk4 drift {rk4_drift:.2e}; gd drift {d1:.2e} -> {d2:.2e} at half rate",
    )


def check_epsilon_sweep(fast: bool = False) -> dict:
    """Near-zero balanced starts: every cell of the eps grid trains to
    loss < 1e-15; the third product coordinate is exactly zero when the
    third input row is zero and strictly negative (and stabilizing in eps)
    when it is not."""
    lr = 1e-4 if fast else 1e-5
    ok, notes = True, [f"lr={lr:g}"]
    sweeps = {}
    for g in (0.0, 5.0):
        sw = epsilon_sweep(benchmark_dataset(g), lr=lr)
        sweeps[g] = sw
        if np.any(sw.final_losses >= 1e-15):
            ok = False
            notes.append(f"g={g:g}: loss floor missed")
    if np.any(sweeps[0.0].U[:, 2] != 0.0):
        ok = False
        notes.append("g=0: u3 not identically zero")
    u3 = sweeps[5.0].U[:, 2]
    eps = sweeps[5.0].epsilons
    if np.any(u3 >= 0):
        ok = False
        notes.append("g=5: u3 not negative everywhere")
    k4 = int(np.argmin(np.abs(eps - 1e-4)))
    k5 = int(np.argmin(np.abs(eps - 1e-5)))
    stab = abs(u3[k4] - u3[k5])
    if stab >= 0.01:
        ok = False
    notes.append(f"g=5: u3 grid {np.round(u3, 4).tolist()}, |u3(1e-4)-u3(1e-5)|={stab:.2e}")
    return _result("epsilon_sweep", ok, "; ".join(notes))


def check_equivariance(fast: bool = False) -> dict:
    """Rotating the inputs rotates the trained limit; scaling the targets
    scales it, via the matched-rate reference run."""
    lr = 1e-4 if fast else 1e-5
    worst_rot, worst_scale = 0.0, 0.0
    M = random_rotation(3, seed=7)
    for g in (0.0, 5.0):
        ds = benchmark_dataset(g)
        worst_rot = max(worst_rot, check_rotation_equivariance(ds, M, lr=lr))
        worst_scale = max(worst_scale, check_scaling_equivariance(ds, 2.0, lr=lr))
    ok = worst_rot <= 1e-6 and worst_scale <= 1e-3
    return _result(
        "equivariance", ok, f"rotation dev {worst_rot:.2e}, scaling dev {worst_scale:.2e}"
    )


def check_witness_records(fast: bool = False) -> dict:
    """Distinct limits on the shared zero-loss ray, single-neuron and
    hidden-neuron versions."""
    rec = single_neuron_witness()
    s = {g: rec.limits[k][2] for k, g in enumerate(rec.gammas)}
    sep = abs(s[1.0] - s[2.0])
    lr = 1e-4 if fast else 1e-5
    hrec = hidden_neuron_witness(lr=lr)
    ok = (
        rec.valid
        and sep >= 0.055
        and hrec.extra["orthogonal"]
        and hrec.distinct
        and not hrec.failures
    )
    return _result(
        "witness_records",
        ok,
        f"|s(1)-s(2)|={sep:.4f}; inner product {hrec.extra['inner_product']:.2e}; "
        f"separation {hrec.extra['separation']:.4f}",
    )


CRITERIA = {
    "family_limits": check_family_limits,
    "switch_times": check_switch_times,
    "spectral_goldens": check_spectral_goldens,
    "alpha_scaling": check_alpha_scaling,
    "closed_form_vs_ode": check_closed_form_vs_ode,
    "invertible_min_norm": check_invertible_min_norm,
    "factor_two_census": check_factor_two_census,
    "balancedness": check_balancedness,
    "epsilon_sweep": check_epsilon_sweep,
    "equivariance": check_equivariance,
    "witness_records": check_witness_records,
}


def run_all(fast: bool = False, names=None) -> list[dict]:
    selected = list(CRITERIA) if names is None else list(names)
    unknown = [n for n in selected if n not in CRITERIA]
    if unknown:
        raise KeyError(f"unknown criteria: {unknown}")
    return [CRITERIA[n](fast=fast) for n in selected]
