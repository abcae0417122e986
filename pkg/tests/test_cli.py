"""CLI surface: exit codes, determinism, round trips, all four subcommands."""

import json
import subprocess
import sys

import numpy as np
import pytest

EXAMPLE_SCENARIO = {
    "n_modes": 2,
    "initial_state": [1, 0],
    "gates": [{"kind": "tunneling", "modes": [0, 1], "theta": 0.7853981633974483}],
    "partitions": [[0], [1]],
    "checks": [
        {"name": "diagram"},
        {"name": "no_signalling", "seed": 1, "count": 6},
        {"name": "locality_invariance", "seed": 2, "count": 4},
        {"name": "ontic_properties", "seed": 3, "count": 4},
    ],
}


def run_cli(*args, stdin_text=None):
    return subprocess.run(
        [sys.executable, "-m", "fermidesc.cli", *args],
        input=stdin_text,
        capture_output=True,
        text=True,
        timeout=300,
    )


def write_scenario(tmp_path, scenario):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(scenario))
    return path


def strip_timings(report: dict) -> dict:
    out = dict(report)
    out.pop("timings", None)
    return out


def test_simulate_example_scenario(tmp_path):
    path = write_scenario(tmp_path, EXAMPLE_SCENARIO)
    proc = run_cli("simulate", str(path))
    assert proc.returncode == 0, proc.stderr
    report = json.loads(proc.stdout)
    assert report["schema_version"] == "1"
    assert all(check["passed"] for check in report["checks"])
    assert report["reconstruction"]["round_trip_residual"] < 1e-8
    assert report["reconstruction"]["phase_blind_distance"] < 1e-8
    # the half-tunneling leaves each single mode maximally mixed
    for block in report["partitions"]:
        diag = [row[i][0] for i, row in enumerate(block["phenomenal"]["matrix"])]
        assert diag == pytest.approx([0.5, 0.5], abs=1e-9)


def test_simulate_deterministic_modulo_timings(tmp_path):
    path = write_scenario(tmp_path, EXAMPLE_SCENARIO)
    first = json.loads(run_cli("simulate", str(path)).stdout)
    second = json.loads(run_cli("simulate", str(path)).stdout)
    assert strip_timings(first) == strip_timings(second)


def test_simulate_reads_stdin():
    proc = run_cli("simulate", "-", stdin_text=json.dumps(EXAMPLE_SCENARIO))
    assert proc.returncode == 0


def test_empty_gate_list_reconstructs_identity(tmp_path):
    scenario = {"n_modes": 2, "initial_state": [0, 0], "partitions": [[0]]}
    path = write_scenario(tmp_path, scenario)
    proc = run_cli("simulate", str(path))
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    unit = json.loads(
        run_cli("reconstruct", "-", stdin_text=proc.stdout).stdout
    )["unitary"]["matrix"]
    dense = np.array([[complex(re, im) for re, im in row] for row in unit])
    phase = dense[0, 0]
    assert abs(abs(phase) - 1) < 1e-9
    assert np.allclose(dense, phase * np.eye(4), atol=1e-9)
    canonical = report["global_descriptors"]["descriptors"]
    assert len(canonical) == 2


def test_explicit_hamiltonian_gate(tmp_path):
    # exp(i pi n_0) flips the sign of the occupied-mode-0 amplitudes
    h = np.zeros((4, 4))
    h[2, 2] = h[3, 3] = np.pi
    scenario = {
        "n_modes": 2,
        "initial_state": [1, 0],
        "gates": [{"kind": "hamiltonian", "matrix": [[[v, 0.0] for v in row] for row in h]}],
        "partitions": [[0]],
    }
    path = write_scenario(tmp_path, scenario)
    proc = run_cli("simulate", str(path))
    assert proc.returncode == 0, proc.stderr
    report = json.loads(proc.stdout)
    final = report["final_state"]["matrix"]
    assert final[2][2][0] == pytest.approx(1.0, abs=1e-12)


def test_hamiltonian_gate_rejects_parity_mixing(tmp_path):
    h = np.array([[0, 1], [1, 0]], dtype=float)
    scenario = {
        "n_modes": 1,
        "initial_state": [0],
        "gates": [{"kind": "hamiltonian", "matrix": [[[v, 0.0] for v in row] for row in h]}],
    }
    path = write_scenario(tmp_path, scenario)
    proc = run_cli("simulate", str(path))
    assert proc.returncode == 3
    assert "ssr_violation" in proc.stderr


def test_malformed_json_exits_2(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    proc = run_cli("simulate", str(path))
    assert proc.returncode == 2
    assert "parse error" in proc.stderr


def test_ssr_violating_scenario_exits_3(tmp_path):
    scenario = {
        "n_modes": 1,
        "initial_state": [
            {"occupation": [0], "amplitude": [0.70710678, 0.0]},
            {"occupation": [1], "amplitude": [0.70710678, 0.0]},
        ],
    }
    path = write_scenario(tmp_path, scenario)
    proc = run_cli("simulate", str(path))
    assert proc.returncode == 3
    assert "ssr_violation" in proc.stderr
    assert "initial_state" in proc.stderr


def test_validation_error_names_offending_field(tmp_path):
    scenario = dict(EXAMPLE_SCENARIO, gates=[{"kind": "phase", "modes": [5], "theta": 0.1}])
    path = write_scenario(tmp_path, scenario)
    proc = run_cli("simulate", str(path))
    assert proc.returncode == 3
    assert "gates[0]" in proc.stderr


def test_failing_check_exits_1(tmp_path):
    scenario = dict(EXAMPLE_SCENARIO)
    scenario["tolerances"] = {"no_signalling": 1e-30}
    path = write_scenario(tmp_path, scenario)
    proc = run_cli("simulate", str(path))
    assert proc.returncode == 1


def test_verify_rejects_single_mode_sweep():
    proc = run_cli("verify", "--modes", "1", "--count", "2")
    assert proc.returncode == 3
    assert "mode" in proc.stderr


def test_verify_small_sweep(tmp_path):
    out = tmp_path / "verify.json"
    proc = run_cli("verify", "--modes", "2", "--count", "5", "-o", str(out))
    assert proc.returncode == 0, proc.stderr
    report = json.loads(out.read_text())
    assert all(check["passed"] for check in report["checks"])
    assert "pass " in proc.stderr or "pass" in proc.stderr


def test_reconstruct_from_simulate_output(tmp_path):
    path = write_scenario(tmp_path, EXAMPLE_SCENARIO)
    report_path = tmp_path / "report.json"
    assert run_cli("simulate", str(path), "-o", str(report_path)).returncode == 0
    proc = run_cli("reconstruct", str(report_path))
    assert proc.returncode == 0
    result = json.loads(proc.stdout)
    assert result["round_trip_residual"] < 1e-8


def test_reconstruct_rejects_bad_descriptor_algebra(tmp_path):
    path = write_scenario(tmp_path, EXAMPLE_SCENARIO)
    report = json.loads(run_cli("simulate", str(path)).stdout)
    payload = report["global_descriptors"]
    payload["descriptors"][0][0][0] = [5.0, 0.0]  # corrupt one entry
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(payload))
    proc = run_cli("reconstruct", str(bad))
    assert proc.returncode == 3


def test_schema_output_stable():
    first = run_cli("schema")
    second = run_cli("schema")
    assert first.returncode == 0
    assert first.stdout == second.stdout
    doc = json.loads(first.stdout)
    assert doc["conventions"]["mode_labels"] == "0-based"
