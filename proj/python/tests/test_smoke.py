import copy
import json
import math
import os
import pathlib
import subprocess

import numpy as np
import pytest

import ghzcav

EXAMPLES = pathlib.Path(__file__).resolve().parents[2] / "examples_configs"


def six_qubit():
    return json.loads((EXAMPLES / "six_qubit.json").read_text())


def test_calibrate_reference_device():
    report = ghzcav.calibrate(EXAMPLES / "six_qubit.json")
    assert math.isclose(report["calibration"]["lambda_over_g"], 0.021805, rel_tol=1e-6)
    assert len(report["calibration"]["spectators"]) == 5


def test_simulate_closed_form_is_exact():
    report, trace = ghzcav.simulate(six_qubit(), mode="closed-form")
    assert abs(report["fidelity"]["F_numeric"] - 1.0) < 1e-12
    assert trace.startswith("segment,time_s,observable,value\n")


def test_simulate_is_deterministic():
    a, _ = ghzcav.simulate(six_qubit(), seed=5)
    b, _ = ghzcav.simulate(json.dumps(six_qubit()), seed=5)
    assert a == b


def test_full_mode_three_qubits():
    report, _ = ghzcav.simulate(EXAMPLES / "three_qubit_full.json")
    f = report["fidelity"]
    assert abs(f["F_numeric"] - f["F_analytic"]) <= 0.01


def test_sweep_rows_follow_values():
    cfg = json.loads((EXAMPLES / "two_qubit_ratio_sweep.json").read_text())
    report, table = ghzcav.sweep(cfg, mode="closed-form")
    lines = table.strip().splitlines()
    assert len(lines) == 1 + len(cfg["sweep"]["values"])


def test_noise_zero_rates_match_simulation():
    cfg = six_qubit()
    for q in [cfg["device"]["qubit1"], *cfg["device"]["spectators"]]:
        for k in list(q):
            if k.startswith("gamma"):
                q[k] = 0.0
    cfg["device"]["cavity"]["quality"] = "inf"
    cfg["noise"]["n_traj"] = 4
    report = ghzcav.noise(cfg)
    sim, _ = ghzcav.simulate(cfg)
    assert report["F_mean"] == sim["fidelity"]["F_numeric"]
    assert report["F_stderr"] == 0.0


def test_errors_map_to_exceptions():
    cfg = six_qubit()
    bad = copy.deepcopy(cfg)
    bad["device"]["bogus"] = 1
    with pytest.raises(ghzcav.ConfigError, match="/device/bogus"):
        ghzcav.calibrate(bad)
    tight = copy.deepcopy(cfg)
    for s in tight["device"]["spectators"]:
        s["cavity_detuning_ratio"] = 4.0
    with pytest.raises(ghzcav.InfeasibleError) as info:
        ghzcav.calibrate(tight)
    assert "cavity_detuning_ratio" in info.value.args[1]
    with pytest.raises(ghzcav.ConfigError):
        ghzcav.simulate(cfg, mode="exact")


def test_helpers():
    assert ghzcav.fidelity_analytic([0.0] * 5) == 1.0
    assert 0.985 < ghzcav.fidelity_analytic([0.011 * math.pi] * 5) < 0.995
    assert math.isclose(ghzcav.occupation_probability(10, 10), 4 / 104)
    u = ghzcav.closed_form_step_map("1", 2)
    assert u.shape == (9, 9)
    assert np.allclose(u.conj().T @ u, np.eye(9), atol=1e-12)
    assert ghzcav.splitmix64(0) == 0xE220A8397B1DCDAF


def test_load_config_fills_defaults():
    cfg = ghzcav.load_config(EXAMPLES / "six_qubit.json")
    assert cfg["protocol"]["jc_during_pulses"] is False
    assert cfg["propagator"]["method"] == "static-krylov"


@pytest.mark.skipif("GHZCAV_CLI" not in os.environ, reason="command-line tool path not given")
def test_cli_round_trip(tmp_path):
    cli = os.environ["GHZCAV_CLI"]
    rc = subprocess.run([cli, "simulate", "--config", str(EXAMPLES / "six_qubit.json"), "--out", str(tmp_path)])
    assert rc.returncode == 0
    report = json.loads((tmp_path / "report.json").read_text())
    py_report, _ = ghzcav.simulate(EXAMPLES / "six_qubit.json")
    assert report == py_report
    rc = subprocess.run([cli, "simulate", "--config", str(tmp_path / "missing.json")], capture_output=True)
    assert rc.returncode == 2
