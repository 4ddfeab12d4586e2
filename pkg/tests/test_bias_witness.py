"""Tests for witness records: distinct limits on a shared zero-loss ray."""

import json

import numpy as np
import pytest

from reluflow.bias_witness import (
    WitnessRecord,
    hidden_neuron_witness,
    rotated_witness,
    single_neuron_witness,
)
from reluflow.hidden_neuron_lab import random_rotation


def test_single_neuron_witness_closed_form():
    rec = single_neuron_witness()
    assert rec.valid
    assert rec.gammas == (0.0, 1.0, 2.0, 5.0)
    # all limits share the first two coordinates and sit on the ray
    for w in rec.limits:
        assert np.allclose(w[:2], [5.0, -1.0], atol=1e-3)
        assert w[2] <= 1e-12
    # third coordinates are genuinely distinct between gamma=1 and gamma=2
    s = dict(zip(rec.gammas, rec.limits[:, 2]))
    assert abs(s[1.0] - s[2.0]) >= 0.055


def test_single_neuron_witness_integrated_matches_closed_form():
    cf = single_neuron_witness(gammas=(0.0, 5.0))
    ode = single_neuron_witness(gammas=(0.0, 5.0), use_closed_form=False)
    assert ode.valid and not ode.failures
    assert np.allclose(cf.limits, ode.limits, atol=1e-3)


def test_witness_alpha_scaling():
    base = single_neuron_witness(alpha=1.0)
    scaled = single_neuron_witness(alpha=3.0)
    assert scaled.valid
    assert np.allclose(scaled.limits, 3.0 * base.limits, atol=1e-9)


def test_witness_preconditions():
    with pytest.raises(ValueError):
        single_neuron_witness(gammas=(0.0,))
    with pytest.raises(ValueError):
        single_neuron_witness(gammas=(1.0, 2.0))  # must include 0 and 5


def test_witness_json_deterministic():
    a = single_neuron_witness().to_json()
    b = single_neuron_witness().to_json()
    assert a == b
    payload = json.loads(a)
    assert payload["on_ray"] and payload["distinct"]
    assert len(payload["limits"]) == 4


def test_hidden_neuron_witness():
    rec = hidden_neuron_witness(lr=1e-4)
    assert rec.valid
    u_star = np.array(rec.extra["u_star"])
    u_tilde = np.array(rec.extra["u_tilde"])
    u_prime = u_tilde - u_star
    assert u_star[2] == 0.0
    assert u_tilde[2] < 0.0
    assert abs(u_star @ u_prime) <= 1e-3 * np.linalg.norm(u_star) * np.linalg.norm(
        u_prime
    )
    assert np.linalg.norm(u_prime) > 1e-2


def test_hidden_witness_grid_precondition():
    with pytest.raises(ValueError):
        hidden_neuron_witness(epsilons=(1e-1, 1e-2))


def test_rotated_witness_identity():
    base = single_neuron_witness(gammas=(0.0, 5.0))
    rec = rotated_witness(base, np.eye(3))
    assert not rec.failures
    assert np.allclose(rec.limits, base.limits, atol=1e-3)


def test_rotated_witness_quarter_turn():
    # rotation by pi/2 in the (1,2) plane permutes the limit coordinates
    M = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    base = single_neuron_witness(gammas=(0.0, 5.0))
    rec = rotated_witness(base, M)
    assert not rec.failures
    for k in range(len(base.gammas)):
        w = base.limits[k]
        assert np.allclose(rec.limits[k], [-w[1], w[0], w[2]], atol=1e-3)


def test_rotated_witness_random():
    M = random_rotation(3, seed=123)
    base = single_neuron_witness(gammas=(0.0, 5.0))
    rec = rotated_witness(base, M)
    assert not rec.failures
    assert rec.distinct and rec.on_ray


def test_rotated_witness_rejects_non_rotation():
    base = single_neuron_witness(gammas=(0.0, 5.0))
    with pytest.raises(ValueError):
        rotated_witness(base, 2.0 * np.eye(3))
