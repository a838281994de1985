"""CLI contract tests: golden equivalence against direct library calls,
envelope schema validation, exit codes, and file determinism."""

import json
import math
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from tendonarm import (
    ArmParameters,
    Configuration,
    forward_kinematics,
    inverse_kinematics,
    jacobians,
    stiffness_config,
    stiffness_task,
    energy_hessian,
    tendon_stiffness,
)


def run_cli(*args, check=False):
    result = subprocess.run([sys.executable, "-m", "tendonarm", *args],
                            capture_output=True, text=True)
    if check:
        assert result.returncode == 0, result.stderr
    return result


def envelope_of(result):
    doc = json.loads(result.stdout)
    schema = json.loads(
        resources.files("tendonarm").joinpath("schemas/envelope.schema.json").read_text())
    jsonschema.validate(doc, schema)
    return doc


# ------------------------------------------------------------- basics

def test_help_exits_zero():
    assert run_cli("--help").returncode == 0
    assert run_cli("fk", "--help").returncode == 0


def test_unknown_flag_exits_two():
    assert run_cli("fk", "--theta-deg", "10", "--bogus").returncode == 2
    assert run_cli("frobnicate").returncode == 2


def test_missing_required_flag_exits_two():
    assert run_cli("ik").returncode == 2


def test_theta_out_of_range_exits_two():
    result = run_cli("fk", "--theta-deg", "200")
    assert result.returncode == 2
    assert "theta" in result.stderr


# ------------------------------------------------------------- golden equivalence

def test_fk_matches_library_exactly(params):
    doc = envelope_of(run_cli("fk", "--theta-deg", "90", "--delta-deg", "0", check=True))
    pose = forward_kinematics(params, Configuration(math.radians(90.0), 0.0))
    assert doc["result"]["position_m"] == pose.position.tolist()
    assert doc["result"]["rotation"] == pose.rotation.tolist()
    assert doc["result"]["position_m"][0] == pytest.approx(0.14133, abs=1e-5)

    doc = envelope_of(run_cli("fk", "--theta-deg", "0", check=True))
    assert doc["result"]["position_m"] == [0.0, 0.0, 0.222]


def test_ik_matches_library_exactly(params):
    doc = envelope_of(run_cli("ik", "--theta-deg", "45", check=True))
    q = inverse_kinematics(params, Configuration(math.radians(45.0), 0.0))
    assert doc["result"]["q_mm"] == (q * 1e3).tolist()
    assert doc["result"]["q_mm"][0] == pytest.approx(9.4248, abs=1e-4)
    zeros = envelope_of(run_cli("ik", "--theta-deg", "0", check=True))
    assert zeros["result"]["q_mm"] == [0.0, 0.0, 0.0, 0.0]


def test_jacobian_and_stiffness_match_library_exactly(params):
    psi = Configuration(math.radians(30.0), 0.0)
    doc = envelope_of(run_cli("jacobian", "--theta-deg", "30", check=True))
    jac = jacobians(params, psi)
    assert doc["result"]["J_q"] == jac.j_q_psi.tolist()
    assert doc["result"]["J_v"] == jac.j_v_psi.tolist()
    assert doc["result"]["J_w"] == jac.j_w_psi.tolist()

    doc = envelope_of(run_cli("stiffness", "--theta-deg", "30", check=True))
    assert doc["result"]["H_psi"] == energy_hessian(params).tolist()
    assert doc["result"]["K_q"] == tendon_stiffness(params).tolist()
    assert doc["result"]["K_psi"] == stiffness_config(params, psi).tolist()
    assert doc["result"]["K_X"] == stiffness_task(params, psi).tolist()
    assert doc["warnings"] == []


def test_stiffness_near_straight_exits_two():
    result = run_cli("stiffness", "--theta-deg", "1")
    assert result.returncode == 2
    assert "below the validity floor" in result.stderr


def test_stiffness_with_tau_matches_library_and_stays_symmetric(params):
    # the active term is a Hessian contraction sum(tau_i * H(q_i)), so
    # K_psi stays symmetric for every tau and the asymmetry check is quiet
    doc = envelope_of(run_cli("stiffness", "--theta-deg", "45", "--delta-deg", "20",
                              "--tau", "3,0,1,0.5", check=True))
    psi = Configuration(math.radians(45.0), math.radians(20.0))
    tau = np.array([3.0, 0.0, 1.0, 0.5])
    assert doc["result"]["K_psi"] == stiffness_config(params, psi, tau).tolist()
    assert doc["result"]["K_X"] == stiffness_task(params, psi, tau).tolist()
    assert doc["warnings"] == []


# ------------------------------------------------------------- pipeline

def test_simulate_estimate_round_trip(params, tmp_path):
    # force along the observable direction so the round trip is exact
    psi = Configuration(math.radians(45.0), 0.0)
    from tendonarm import jacobian_v_psi
    column = jacobian_v_psi(params, psi)[:, 0]
    force = 0.5 * column / np.linalg.norm(column)
    out = tmp_path / "log.csv"
    doc = envelope_of(run_cli(
        "simulate", "--theta-deg", "45", "--delta-deg", "0",
        "--force", ",".join(repr(float(f)) for f in force),
        "--samples", "10", "--out", str(out), check=True))
    assert doc["result"]["samples"] == 10

    est = envelope_of(run_cli("estimate-force", "--log", str(out),
                              "--ref-theta-deg", "45", check=True))
    assert np.linalg.norm(np.array(est["result"]["F_ext_N"]) - force) <= 1e-6
    assert 0.0 < est["result"]["condition"] <= 1.0


def test_simulate_seed_reproducibility(tmp_path):
    logs = [tmp_path / "one.csv", tmp_path / "two.csv"]
    for path in logs:
        run_cli("simulate", "--theta-deg", "40", "--force", "0.2,0,-0.1",
                "--noise-deg", "0.2", "--seed", "7", "--samples", "30",
                "--out", str(path), check=True)
    assert logs[0].read_bytes() == logs[1].read_bytes()


def test_simulate_unwritable_output_exits_two(tmp_path):
    result = run_cli("simulate", "--theta-deg", "40", "--force", "0.1,0,0",
                     "--out", str(tmp_path / "missing_dir" / "log.csv"))
    assert result.returncode == 2


def test_estimate_force_error_paths(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("imu-log,v1\n")
    result = run_cli("estimate-force", "--log", str(empty), "--ref-theta-deg", "45")
    assert result.returncode == 2
    assert "no orientation samples" in result.stderr

    bad = tmp_path / "bad.csv"
    bad.write_text("imu-log,v1\n0.0,1,0,0,0\n0.1,1,0,zero,0\n")
    result = run_cli("estimate-force", "--log", str(bad), "--ref-theta-deg", "45")
    assert result.returncode == 2
    assert "line 3" in result.stderr

    missing = run_cli("estimate-force", "--log", str(tmp_path / "nope.csv"),
                      "--ref-theta-deg", "45")
    assert missing.returncode == 2


def test_estimate_force_window_clamp_warns(tmp_path):
    out = tmp_path / "log.csv"
    run_cli("simulate", "--theta-deg", "45", "--force", "0.1,0,-0.05",
            "--samples", "5", "--out", str(out), check=True)
    doc = envelope_of(run_cli("estimate-force", "--log", str(out),
                              "--ref-theta-deg", "45", "--window", "50", check=True))
    assert any("using all samples" in w for w in doc["warnings"])


def test_sweep_grid_contract(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({
        "theta_start_deg": 10, "theta_stop_deg": 60, "theta_step_deg": 10,
        "delta_deg": 0, "direction": "inward",
        "load_start_N": 0.0, "load_stop_N": 1.0, "load_step_N": 0.2,
    }))
    out = tmp_path / "sweep.csv"
    doc = envelope_of(run_cli("sweep", "--spec", str(spec), "--out", str(out),
                              check=True))
    assert doc["result"]["rows"] == 36
    lines = out.read_text().splitlines()
    assert lines[0] == "theta_rad,load_N,disp_m,kxx,kxz,kzx,kzz"
    assert len(lines) == 37

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"theta_start_deg": 10}))
    assert run_cli("sweep", "--spec", str(bad), "--out", str(out)).returncode == 2


# ------------------------------------------------------------- parameter file

def test_parameter_file_round_trip(tmp_path):
    param_file = tmp_path / "arm.json"
    param_file.write_text(json.dumps({
        "L_mm": 300.0, "r_mm": 10.0, "Ep_GPa": 82.0, "ET_GPa": 2.34,
        "Ip_mm4": 0.2485, "A_mm2": 0.2642,
    }))
    doc = envelope_of(run_cli("fk", "--theta-deg", "0", "--params", str(param_file),
                              check=True))
    assert doc["result"]["position_m"] == [0.0, 0.0, 0.3]
    custom = ArmParameters(backbone_length=0.3, pitch_radius=0.01)
    doc = envelope_of(run_cli("ik", "--theta-deg", "45", "--params", str(param_file),
                              check=True))
    q = inverse_kinematics(custom, Configuration(math.radians(45.0), 0.0))
    assert doc["result"]["q_mm"] == (q * 1e3).tolist()


def test_parameter_file_errors(tmp_path):
    missing_key = tmp_path / "partial.json"
    missing_key.write_text(json.dumps({"L_mm": 222.0}))
    result = run_cli("fk", "--theta-deg", "10", "--params", str(missing_key))
    assert result.returncode == 2
    assert "missing keys" in result.stderr

    negative = tmp_path / "neg.json"
    negative.write_text(json.dumps({
        "L_mm": -222.0, "r_mm": 12.0, "Ep_GPa": 82.0, "ET_GPa": 2.34,
        "Ip_mm4": 0.2485, "A_mm2": 0.2642,
    }))
    assert run_cli("fk", "--theta-deg", "10", "--params", str(negative)).returncode == 2

    garbage = tmp_path / "garbage.json"
    garbage.write_text("{not json")
    assert run_cli("fk", "--theta-deg", "10", "--params", str(garbage)).returncode == 2


def test_parameter_file_theta_floor_override(tmp_path):
    param_file = tmp_path / "arm.json"
    param_file.write_text(json.dumps({
        "L_mm": 222.0, "r_mm": 12.0, "Ep_GPa": 82.0, "ET_GPa": 2.34,
        "Ip_mm4": 0.2485, "A_mm2": 0.2642, "theta_est_min_deg": 0.5,
    }))
    result = run_cli("stiffness", "--theta-deg", "1", "--params", str(param_file))
    assert result.returncode == 0


def test_parameter_file_r_offset_applied(params, tmp_path):
    # a 90-degree yaw offset between world and base frames
    offset = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]
    param_file = tmp_path / "arm.json"
    param_file.write_text(json.dumps({
        "L_mm": 222.0, "r_mm": 12.0, "Ep_GPa": 82.0, "ET_GPa": 2.34,
        "Ip_mm4": 0.2485, "A_mm2": 0.2642, "R_offset": offset,
    }))
    psi = Configuration(math.radians(45.0), 0.0)
    from tendonarm import jacobian_v_psi, write_imu_log
    from tendonarm.force_estimation import OrientationMeasurement
    column = jacobian_v_psi(params, psi)[:, 0]
    force = 0.3 * column / np.linalg.norm(column)
    from tendonarm import LoadCase, synthesize_imu_log
    samples = synthesize_imu_log(params, LoadCase(psi_ref=psi, force=force, samples=4))
    # log the world-frame view R_offset @ R_base
    world = [OrientationMeasurement(s.timestamp, np.array(offset) @ s.rotation)
             for s in samples]
    log = tmp_path / "world.csv"
    write_imu_log(log, world)
    doc = envelope_of(run_cli("estimate-force", "--log", str(log),
                              "--ref-theta-deg", "45", "--params", str(param_file),
                              check=True))
    assert np.linalg.norm(np.array(doc["result"]["F_ext_N"]) - force) <= 1e-6
