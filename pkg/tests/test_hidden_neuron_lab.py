"""Tests for the two-layer experiments: the balanced lift, the conserved
quantity, the epsilon sweep, and the equivariance checks.

Runs here use learning rate 1e-4; the acceptance suite covers 1e-5.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reluflow.hidden_neuron_lab import (
    DEFAULT_EPSILONS,
    balancedness_drift,
    check_rotation_equivariance,
    check_scaling_equivariance,
    epsilon_sweep,
    psi,
    psi_inv,
    random_rotation,
    train_from_epsilon,
)
from reluflow.model_core import benchmark_dataset

LR = 1e-4


@given(
    st.lists(st.floats(-10, 10), min_size=3, max_size=3),
)
@settings(max_examples=80, deadline=None)
def test_psi_roundtrip_and_balance(u):
    u = np.array(u)
    theta = psi(u)
    assert np.allclose(psi_inv(theta), u, atol=1e-12 * max(1.0, np.linalg.norm(u)))
    # the lift lands on the balanced set ||w|| = v
    assert np.isclose(np.linalg.norm(theta.w), theta.v, atol=1e-12)
    assert theta.v >= 0


def test_psi_at_zero():
    theta = psi(np.zeros(3))
    assert theta.v == 0.0
    assert np.array_equal(theta.w, np.zeros(3))


def test_train_reaches_loss_floor():
    _, res = train_from_epsilon(benchmark_dataset(5.0), 1e-2, LR)
    assert res.converged
    assert res.final_loss < 1e-15
    assert np.allclose(res.u_final[:2], [5.0, -1.0], atol=1e-6)


def test_balancedness_drift_scales_with_lr():
    ds = benchmark_dataset(5.0)
    tr1, _ = train_from_epsilon(ds, 1e-2, LR, stride=100)
    tr2, _ = train_from_epsilon(ds, 1e-2, LR / 2, stride=100)
    d1, d2 = balancedness_drift(tr1), balancedness_drift(tr2)
    assert d1 < 1e-3
    assert 0.4 < d2 / d1 < 0.6


def test_sweep_gamma0_u3_exactly_zero():
    sweep = epsilon_sweep(benchmark_dataset(0.0), (1e-1, 1e-3), lr=LR)
    assert np.all(sweep.U[:, 2] == 0.0)
    assert np.all(sweep.final_losses < 1e-15)


def test_sweep_gamma5_u3_negative_and_stabilizing():
    sweep = epsilon_sweep(benchmark_dataset(5.0), (1e-2, 1e-3, 1e-4), lr=LR)
    assert np.all(sweep.U[:, 2] < 0)
    assert abs(sweep.U[-1, 2] - sweep.U[-2, 2]) < 0.01
    # epsilons come out sorted descending regardless of input order
    assert np.all(np.diff(sweep.epsilons) < 0)


def test_sweep_csv_schema(tmp_path):
    sweep = epsilon_sweep(benchmark_dataset(0.0), (1e-1, 1e-2), lr=LR)
    path = tmp_path / "sweep.csv"
    sweep.write_csv(path)
    rows = path.read_text().strip().split("\n")
    assert rows[0] == "epsilon,u1,u2,u3,final_loss,iters"
    assert len(rows) == 3
    cells = rows[1].split(",")
    assert float(cells[0]) == sweep.epsilons[0]
    assert int(cells[5]) == sweep.iters[0]


def test_sweep_rejects_bad_epsilon():
    with pytest.raises(ValueError):
        train_from_epsilon(benchmark_dataset(0.0), 0.0, LR)


def test_random_rotation_is_rotation():
    for seed in range(5):
        M = random_rotation(3, seed)
        assert np.allclose(M.T @ M, np.eye(3), atol=1e-12)
        assert np.linalg.det(M) == pytest.approx(1.0)
    assert np.array_equal(random_rotation(3, 1), random_rotation(3, 1))


def test_rotation_equivariance():
    M = random_rotation(3, seed=7)
    dev = check_rotation_equivariance(benchmark_dataset(5.0), M, epsilon=1e-2, lr=LR)
    assert dev < 1e-6


def test_rotation_equivariance_identity_exact():
    dev = check_rotation_equivariance(benchmark_dataset(0.0), np.eye(3), epsilon=1e-2, lr=LR)
    assert dev == 0.0


def test_scaling_equivariance():
    for scale in (2.0, 4.0):
        dev = check_scaling_equivariance(benchmark_dataset(5.0), scale, epsilon=1e-2, lr=LR)
        assert dev < 1e-3


def test_default_epsilon_grid():
    assert DEFAULT_EPSILONS == (1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5)
