"""Tests for the piecewise closed-form trajectories.

Oracles: the flow's own differential equation, checked by central finite
differences along the formula (residual_check), plus frozen switch-time
brackets and limit intervals.
"""

import numpy as np
import pytest

from reluflow.closed_form import BenchmarkInstance, closed_form_limit, residual_check
from reluflow.model_core import Activation, grad, loss

T1_BRACKETS = {1.0: (0.169, 0.17), 2.0: (0.138, 0.139), 5.0: (0.086, 0.087)}
S_INTERVALS = {1.0: (-0.045, -0.035), 2.0: (-0.12, -0.1), 5.0: (-0.22, -0.2)}


@pytest.mark.parametrize("gamma,bracket", sorted(T1_BRACKETS.items()))
def test_switch_time_brackets(gamma, bracket):
    t1 = BenchmarkInstance(gamma).t1
    assert bracket[0] < t1 < bracket[1]


@pytest.mark.parametrize("gamma", [1.0, 2.0, 5.0])
def test_switch_state_is_balanced(gamma):
    # At the switch the second and third coordinates cancel (the third
    # sample's pre-activation is gamma * (w2 + w3) = 0) and w1 is between
    # 4 and 5.
    inst = BenchmarkInstance(gamma)
    w1, w2, w3 = inst.w_t1
    assert abs(w2 + w3) < 1e-10
    assert 4.0 < w1 < 5.0


@pytest.mark.parametrize("gamma", [1.0, 2.0, 5.0])
def test_third_preactivation_zero_at_t1(gamma):
    inst = BenchmarkInstance(gamma)
    x3 = inst.dataset.X[2]
    assert abs(x3 @ inst.eval_part1(inst.t1)) < 1e-9
    # strictly positive inside (0, t1), so sample 3 is active on the piece
    for t in np.linspace(inst.t1 / 10, inst.t1 * 0.9, 7):
        assert x3 @ inst.eval_part1(t) > 0


@pytest.mark.parametrize("gamma", [1.0, 2.0, 5.0])
def test_pieces_agree_at_t1(gamma):
    inst = BenchmarkInstance(gamma)
    assert np.allclose(inst.eval_part1(inst.t1), inst.eval_part2(inst.t1), atol=1e-12)


@pytest.mark.parametrize("gamma", [0.0, 1.0, 2.0, 5.0])
def test_residual_of_closed_form(gamma):
    # The formula must satisfy w'(t) = -grad L(w(t)) along its whole length.
    inst = BenchmarkInstance(gamma)
    ts = np.linspace(0.01, 5.0, 250)
    assert residual_check(inst, ts) < 1e-6


@pytest.mark.parametrize("gamma", [0.0, 1.0, 2.0, 5.0])
def test_limits(gamma):
    w = BenchmarkInstance(gamma).limit
    assert np.allclose(w[:2], [5.0, -1.0], atol=1e-12)
    if gamma == 0.0:
        assert w[2] == 0.0
    else:
        lo, hi = S_INTERVALS[gamma]
        assert lo < w[2] < hi


@pytest.mark.parametrize("gamma", [0.0, 1.0, 2.0, 5.0])
def test_limit_has_zero_loss(gamma):
    inst = BenchmarkInstance(gamma)
    assert loss(inst.dataset, Activation.relu(), inst.limit) < 1e-20
    assert np.linalg.norm(grad(inst.dataset, Activation.relu(), inst.limit)) < 1e-9


@pytest.mark.parametrize("gamma", [0.0, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 3.0])
def test_alpha_scaling(gamma, alpha):
    base = BenchmarkInstance(gamma, 1.0)
    scaled = BenchmarkInstance(gamma, alpha)
    assert np.allclose(scaled.limit, alpha * base.limit, atol=1e-10)
    for t in (0.05, 0.5, 2.0):
        assert np.allclose(scaled.eval(t), alpha * base.eval(t), atol=1e-10)
    if gamma > 0:
        # the switch time itself is independent of alpha
        assert abs(scaled.t1 - base.t1) < 1e-10


def test_gamma_between_the_golden_values():
    # The machinery is not tied to the tabulated gamma values.
    inst = BenchmarkInstance(3.0)
    assert 0.087 < inst.t1 < 0.138  # t1 decreases in gamma
    assert -0.2 < inst.limit[2] < -0.11
    ts = np.linspace(0.01, 3.0, 150)
    assert residual_check(inst, ts) < 1e-6


def test_trajectory_starts_at_origin():
    for g in (0.0, 2.0):
        assert np.allclose(BenchmarkInstance(g).eval(0.0), 0.0, atol=1e-12)


def test_gamma0_third_coordinate_identically_zero():
    inst = BenchmarkInstance(0.0)
    for t in np.linspace(0.0, 10.0, 50):
        assert inst.eval(t)[2] == 0.0


def test_closed_form_limit_helper():
    assert np.allclose(closed_form_limit(0.0, 2.0), [10.0, -2.0, 0.0], atol=1e-12)


def test_validation_errors():
    with pytest.raises(ValueError):
        BenchmarkInstance(-1.0)
    with pytest.raises(ValueError):
        BenchmarkInstance(1.0, alpha=0.0)
    with pytest.raises(ValueError):
        BenchmarkInstance(0.0).t1
    with pytest.raises(ValueError):
        BenchmarkInstance(1.0).eval(-0.5)


def test_write_csv(tmp_path):
    path = tmp_path / "cf.csv"
    BenchmarkInstance(5.0).write_csv(path, np.linspace(0.0, 1.0, 11))
    rows = path.read_text().strip().split("\n")
    assert rows[0] == "t,w1,w2,w3,loss,pattern"
    assert len(rows) == 12
