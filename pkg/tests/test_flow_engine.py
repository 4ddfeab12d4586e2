"""Tests for the RK4 flow integrator and the gradient-descent drivers.

Oracles: the exact matrix-exponential solution for the identity
activation (a plain linear least-squares flow) and closed-form quadratic
descent for gradient descent.  Backend parity is checked separately in
test_kernels_parity.
"""

import numpy as np
import pytest

from reluflow.flow_engine import (
    DivergenceError,
    FlowConfig,
    GDTrace,
    Trajectory,
    integrate_flow,
    integrate_hidden_flow,
    monotone_distance_check,
    run_gd,
    run_gd_hidden,
)
from reluflow.model_core import Activation, Dataset, HiddenParams, benchmark_dataset


def linear_flow_oracle(X, y, w0, t):
    """Exact solution of w' = -X^T (X w - y) via numpy eigh."""
    lam, u = np.linalg.eigh(X.T @ X)
    # particular solution: any w_p with X w_p = y (X square invertible here)
    w_p = np.linalg.solve(X, y)
    z0 = u.T @ (w0 - w_p)
    return w_p + u @ (np.exp(-lam * t) * z0)


def test_identity_activation_matches_matrix_exponential():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((3, 3))
    y = rng.standard_normal(3)
    w0 = rng.standard_normal(3)
    cfg = FlowConfig(step=1e-4, t_max=2.0, grad_tol=1e-300, loss_tol=1e-300)
    traj, res = integrate_flow(Dataset(X, y), Activation.identity(), w0, cfg)
    for k in range(0, len(traj), 7):
        want = linear_flow_oracle(X, y, w0, traj.t[k])
        assert np.allclose(traj.W[k], want, atol=1e-8)


def test_flow_converges_and_reports_small_gradient():
    ds = benchmark_dataset(5.0)
    traj, res = integrate_flow(ds, Activation.relu(), np.zeros(3), FlowConfig())
    assert res.converged
    # stops on whichever tolerance is hit first
    assert res.final_loss < 1e-14 or res.final_grad_norm <= 1.1e-10
    assert np.allclose(res.w_inf, traj.W[-1])


def test_event_detected_at_regime_switch():
    # For gamma > 0 the third sample's pre-activation crosses zero once.
    ds = benchmark_dataset(5.0)
    traj, _ = integrate_flow(ds, Activation.relu(), np.zeros(3), FlowConfig())
    assert len(traj.events) == 1
    t_ev, idx, direction = traj.events[0]
    assert idx == 2 and direction == -1
    assert 0.086 < t_ev < 0.087


def test_no_event_for_gamma_zero():
    traj, _ = integrate_flow(
        benchmark_dataset(0.0), Activation.relu(), np.zeros(3), FlowConfig()
    )
    assert traj.events == []


def test_loss_monotone_along_flow():
    traj, _ = integrate_flow(
        benchmark_dataset(2.0), Activation.relu(), np.zeros(3), FlowConfig()
    )
    assert np.all(np.diff(traj.loss) <= 1e-12)


def test_patterns_annotated():
    traj, _ = integrate_flow(
        benchmark_dataset(5.0), Activation.relu(), np.zeros(3), FlowConfig()
    )
    assert traj.patterns[0] == "000"
    assert traj.patterns[-1] == "++-"


def test_gd_quadratic_matches_closed_form():
    # Identity activation: w_{k+1} = w_k - lr X^T (X w_k - y), solvable exactly.
    rng = np.random.default_rng(1)
    X = rng.standard_normal((3, 3))
    y = rng.standard_normal(3)
    ds = Dataset(X, y)
    lr = 1e-2 / np.linalg.norm(X.T @ X, 2)
    trace, res = run_gd(ds, Activation.identity(), np.zeros(3), lr, max_iters=500, stride=100)
    a = np.eye(3) - lr * X.T @ X
    w = np.zeros(3)
    for _ in range(res.n_iters):
        w = a @ w + lr * X.T @ y
    assert np.allclose(res.w_final, w, atol=1e-12)


def test_gd_converges_on_family():
    ds = benchmark_dataset(5.0)
    trace, res = run_gd(ds, Activation.relu(), np.zeros(3), 1e-3, loss_tol=1e-20)
    assert res.converged
    assert res.final_loss < 1e-20
    assert np.allclose(res.w_final[:2], [5.0, -1.0], atol=1e-6)
    assert np.all(np.diff(trace.losses) <= 0)


def test_gd_divergence_raises():
    # identity activation so the iteration cannot park in a dead ReLU cone
    ds = benchmark_dataset(5.0)
    with pytest.raises(DivergenceError):
        run_gd(ds, Activation.identity(), np.ones(3), lr=10.0, max_iters=10_000)


def test_run_gd_hidden_reaches_zero_loss():
    ds = benchmark_dataset(0.0)
    trace, res = run_gd_hidden(
        ds, HiddenParams(w=np.zeros(3), v=1e-1), lr=1e-4, loss_tol=1e-16
    )
    assert res.converged
    assert res.final_loss < 1e-16
    assert np.allclose(res.u_final, [5.0, -1.0, 0.0], atol=1e-6)
    # v^2 - ||w||^2 stays near its initial value eps^2 = 1e-2
    assert res.v_final**2 - np.sum(res.w_final**2) == pytest.approx(1e-2, abs=1e-3)


def test_hidden_flow_conserves_balancedness():
    ds = benchmark_dataset(5.0)
    trace, _ = integrate_hidden_flow(
        ds, HiddenParams(w=np.zeros(3), v=1e-2), step=1e-4, t_max=5.0, stride=100
    )
    q = trace.V**2 - np.sum(trace.W**2, axis=1)
    assert np.max(np.abs(q - q[0])) < 1e-9


def test_monotone_distance_check():
    t = np.linspace(0, 1, 5)
    W = np.array([[3.0, 0.0], [2.0, 0.0], [1.0, 0.0], [1.5, 0.0], [0.5, 0.0]])
    traj = Trajectory(t=t, W=W, loss=np.zeros(5), patterns=["+"] * 5)
    assert monotone_distance_check(traj, np.zeros(2)) == pytest.approx(0.5)


def test_flow_config_validation():
    with pytest.raises(ValueError):
        FlowConfig(step=0.0)
    with pytest.raises(ValueError):
        FlowConfig(event_refine_tol=1.0, step=1e-4)
    with pytest.raises(ValueError):
        FlowConfig(stride=0)


def test_trajectory_csv_roundtrip(tmp_path):
    traj, _ = integrate_flow(
        benchmark_dataset(1.0), Activation.relu(), np.zeros(3), FlowConfig(t_max=1.0)
    )
    path = tmp_path / "traj.csv"
    traj.write_csv(path)
    rows = path.read_text().strip().split("\n")
    assert rows[0] == "t,w1,w2,w3,loss,pattern"
    assert len(rows) == len(traj) + 1
    cells = rows[1].split(",")
    assert float(cells[0]) == traj.t[0]
    assert cells[-1] == traj.patterns[0]
    # %.17g formatting preserves doubles exactly
    k = len(traj) // 2
    assert float(rows[k + 1].split(",")[1]) == traj.W[k][0]


def test_w0_shape_rejected():
    ds = benchmark_dataset(1.0)
    with pytest.raises(ValueError):
        integrate_flow(ds, Activation.relu(), np.zeros(2), FlowConfig())
    with pytest.raises(ValueError):
        run_gd(ds, Activation.relu(), np.zeros(4), 1e-3)
