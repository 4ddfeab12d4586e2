"""End-to-end tests of the command-line interface: artifact schemas,
config handling, exit codes, determinism."""

import json
import os

import numpy as np
import pytest

from reluflow.cli import EXIT_INPUT, EXIT_NOCONV, EXIT_OK, main


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def test_simulate_family(tmp_path):
    code = run(tmp_path, "simulate", "--gamma", "2", "--alpha", "1")
    assert code == EXIT_OK
    result = json.loads((tmp_path / "result_gamma2_alpha1.json").read_text())
    assert result["converged"]
    assert -0.12 < result["w_inf"][2] < -0.1
    rows = (tmp_path / "trajectory_gamma2_alpha1.csv").read_text().splitlines()
    assert rows[0] == "t,w1,w2,w3,loss,pattern"
    assert len(rows) > 10


def test_simulate_custom_dataset_and_activation(tmp_path):
    ds_file = tmp_path / "ds.json"
    ds_file.write_text(json.dumps({"X": [[1.0, 0.0], [0.0, 2.0]], "y": [1.0, -1.0]}))
    code = run(
        tmp_path, "simulate", "--dataset", str(ds_file), "--activation", "leaky:0.5",
        "--tag", "custom",
    )
    assert code == EXIT_OK
    result = json.loads((tmp_path / "result_custom.json").read_text())
    # leaky(0.5) interpolant of this diagonal system: (1, -1)
    assert np.allclose(result["w_inf"], [1.0, -1.0], atol=1e-4)


def test_simulate_nonconvergence_exit_code(tmp_path):
    code = run(tmp_path, "simulate", "--gamma", "5", "--t-max", "0.01",
               "--grad-tol", "1e-300", "--loss-tol", "1e-300")
    assert code == EXIT_NOCONV


def test_closed_form_artifacts(tmp_path):
    code = run(tmp_path, "closed-form", "--gamma", "1")
    assert code == EXIT_OK
    payload = json.loads((tmp_path / "closed_form_gamma1_alpha1.json").read_text())
    assert 0.169 < payload["t1"] < 0.17
    assert -0.045 < payload["limit"][2] < -0.035


def test_closed_form_gamma0_null_t1(tmp_path):
    code = run(tmp_path, "closed-form", "--gamma", "0")
    assert code == EXIT_OK
    payload = json.loads((tmp_path / "closed_form_gamma0_alpha1.json").read_text())
    assert payload["t1"] is None
    assert payload["limit"] == [5.0, -1.0, 0.0]


def test_closed_form_off_grid_gamma(tmp_path):
    code = run(tmp_path, "closed-form", "--gamma", "3")
    assert code == EXIT_OK
    payload = json.loads((tmp_path / "closed_form_gamma3_alpha1.json").read_text())
    assert 0.087 < payload["t1"] < 0.138


def test_sweep_epsilon(tmp_path):
    code = run(
        tmp_path, "sweep-epsilon", "--gamma", "0",
        "--epsilon-grid", "0.1", "0.01", "--lr", "1e-4",
    )
    assert code == EXIT_OK
    rows = (tmp_path / "sweep_gamma0.csv").read_text().splitlines()
    assert rows[0] == "epsilon,u1,u2,u3,final_loss,iters"
    assert len(rows) == 3
    for row in rows[1:]:
        assert float(row.split(",")[3]) == 0.0  # u3 column all zeros


def test_sweep_rejects_bad_grid(tmp_path):
    code = run(tmp_path, "sweep-epsilon", "--epsilon-grid", "-1.0")
    assert code == EXIT_INPUT


def test_config_overlay_and_rejection(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"gamma": 1.0, "alpha": 2.0}))
    code = run(tmp_path, "closed-form", "--config", str(cfg))
    assert code == EXIT_OK
    assert (tmp_path / "closed_form_gamma1_alpha2.json").exists()

    cfg.write_text(json.dumps({"gamma": 1.0, "bogus_key": 1}))
    assert run(tmp_path, "closed-form", "--config", str(cfg)) == EXIT_INPUT


def test_malformed_config_reports_position(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"gamma": 1.0,}')
    code = run(tmp_path, "closed-form", "--config", str(cfg))
    assert code == EXIT_INPUT
    err = capsys.readouterr().err
    assert "line 1" in err and "column" in err


def test_deterministic_outputs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["closed-form", "--gamma", "2", "--out", str(out)]) == EXIT_OK
        assert main(
            ["sweep-epsilon", "--gamma", "5", "--epsilon-grid", "0.01",
             "--lr", "1e-4", "--out", str(out)]
        ) == EXIT_OK
    for name in os.listdir(a):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_verify_filter(tmp_path, capsys):
    code = run(tmp_path, "verify", "--filter", "spectral_goldens")
    assert code == EXIT_OK
    assert "PASS  spectral_goldens" in capsys.readouterr().out
    verdicts = json.loads((tmp_path / "verify.json").read_text())
    assert len(verdicts) == 1
    assert verdicts[0]["passed"] is True


def test_verify_unknown_filter(tmp_path):
    assert run(tmp_path, "verify", "--filter", "no_such_criterion") == EXIT_INPUT


def test_witness_command(tmp_path):
    code = run(tmp_path, "witness", "--lr", "1e-4")
    assert code == EXIT_OK
    single = json.loads((tmp_path / "witness_single.json").read_text())
    hidden = json.loads((tmp_path / "witness_hidden.json").read_text())
    assert single["distinct"] and single["on_ray"]
    assert hidden["extra"]["orthogonal"]
