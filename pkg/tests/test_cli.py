import json

import numpy as np
import pytest

import spinsqueeze.cli as cli
from spinsqueeze.cli import main


def _read_csv(path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
    return header, rows


def test_thermal_defaults(tmp_path, capsys):
    assert main(["--out", str(tmp_path), "thermal"]) == 0
    payload = json.loads((tmp_path / "thermal.json").read_text())
    assert abs(payload["epsilon"] - 1.3e-6) / 1.3e-6 < 0.05
    assert payload["partition_dim"] == 8
    assert payload["constants"]["hbar_j_s"] == pytest.approx(1.054571817e-34, rel=1e-8)
    assert payload["deviation_matrix"]["diagonal"][0] == 3.5
    assert "polarization" in capsys.readouterr().out


def test_thermal_missing_temperature_value():
    with pytest.raises(SystemExit) as err:
        main(["thermal", "--temperature"])
    assert err.value.code == 2


def test_thermal_invalid_temperature_from_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"thermal": {"temperature_k": None}}))
    assert main(["--config", str(cfg), "--out", str(tmp_path), "thermal"]) == 2
    assert "temperature" in capsys.readouterr().err


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"thermal": {"temp": 300.0}}))
    assert main(["--config", str(cfg), "thermal"]) == 2
    assert "unknown key" in capsys.readouterr().err


def test_config_env_var(tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"output": {"directory": str(tmp_path / "sub")}}))
    monkeypatch.setenv("SPINSQUEEZE_CONFIG", str(cfg))
    assert main(["thermal"]) == 0
    assert (tmp_path / "sub" / "thermal.json").exists()


def test_trajectory_defaults(tmp_path):
    assert main(["--out", str(tmp_path), "trajectory"]) == 0
    header, rows = _read_csv(tmp_path / "trajectory.csv")
    assert header == ["tau_us", "A", "B", "C", "xi", "alpha_rad"]
    assert len(rows) == 45
    assert rows[0][0] == 0.0
    assert rows[0][4] == pytest.approx(1.0, abs=1e-6)
    assert rows[0][5] == pytest.approx(0.785398, abs=1e-6)
    assert rows[-1][4] == pytest.approx(rows[0][4], abs=1e-6)
    assert min(row[4] for row in rows) < 1.0


def test_trajectory_deterministic_bytes(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["--out", str(out_a), "trajectory"]) == 0
    assert main(["--out", str(out_b), "trajectory"]) == 0
    assert (out_a / "trajectory.csv").read_bytes() == (out_b / "trajectory.csv").read_bytes()


def test_trajectory_explicit_grid(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"trajectory": {"time_stop_s": 30e-6, "time_step_s": 3e-6}}))
    assert main(["--config", str(cfg), "--out", str(tmp_path), "trajectory"]) == 0
    _, rows = _read_csv(tmp_path / "trajectory.csv")
    assert len(rows) == 11
    assert rows[-1][0] == pytest.approx(30.0)


def test_wigner_default_indices(tmp_path):
    assert main(["--out", str(tmp_path), "wigner"]) == 0
    from spinsqueeze.wigner import _sphere_grid

    thetas, phis, weights = _sphere_grid(64, 128)
    for k in (0, 4, 17, 40, 44):
        header, rows = _read_csv(tmp_path / f"wigner_k{k}.csv")
        assert header == ["theta_rad", "phi_rad", "w"]
        assert len(rows) == 64 * 128
        w = np.array([r[2] for r in rows]).reshape(64, 128)
        integral = weights @ w.sum(axis=1) * (2 * np.pi / 128)
        assert integral == pytest.approx(1.0, abs=1e-6)
    # k=0 argmax lands at the node nearest (pi/2, pi)
    header, rows = _read_csv(tmp_path / "wigner_k0.csv")
    best = max(rows, key=lambda r: r[2])
    assert abs(best[0] - np.pi / 2) <= np.abs(np.diff(thetas)).max()
    assert best[1] == pytest.approx(np.pi, abs=1e-7)  # CSV carries 9 digits


def test_wigner_empty_k(tmp_path):
    assert main(["--out", str(tmp_path), "wigner", "--k", ""]) == 0
    assert not list(tmp_path.glob("wigner_k*.csv"))


def test_wigner_bad_index(tmp_path, capsys):
    assert main(["--out", str(tmp_path), "wigner", "--k", "99"]) == 2
    assert "outside trajectory grid" in capsys.readouterr().err


def test_smp_small_run_deterministic(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"smp": {"segments": 4, "eta": 2, "restarts": 1}}))
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["--config", str(cfg), "--out", str(out_a), "smp"]) == 0
    assert main(["--config", str(cfg), "--out", str(out_b), "smp"]) == 0
    for name in ("pulse_program.json", "smp_report.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    program = json.loads((out_a / "pulse_program.json").read_text())
    assert program["spin_two_i"] == 7
    assert program["eta"] == 2
    assert len(program["variants"]) == 2
    assert len(program["variants"][0]) == 4
    seg = program["variants"][0][0]
    assert set(seg) == {"amplitude_rad_s", "phase_rad", "duration_s"}
    assert program["envelope"] == {"ramp_fraction": 0.1, "sigma_fraction": 0.33}
    report = json.loads((out_a / "smp_report.json").read_text())
    assert report["seed"] == program["seed"]
    assert report["rng"] == "pcg64"
    assert 0.0 <= report["achieved_fidelity"] <= 1.0
    # serialized programs round-trip into simulatable objects; the averaged
    # state reproduces the reported fidelity up to the 9-digit file rounding
    from spinsqueeze import (
        SpinSystem,
        fidelity,
        coherent_state,
        programs_from_payload,
        smp_propagator,
        thermal_deviation,
    )

    spin = SpinSystem(program["spin_two_i"])
    programs = programs_from_payload(program)
    rho0 = thermal_deviation(spin)
    omega_q = 2 * np.pi * program["nu_q_hz"]
    outs = [
        (u := smp_propagator(p, omega_q, spin)).unitary @ rho0 @ u.unitary.conj().T
        for p in programs
    ]
    zeta = coherent_state(spin, np.pi / 2, np.pi)
    target = np.outer(zeta, zeta.conj())
    target_dev = target - np.trace(target) / spin.dim * np.eye(spin.dim)
    replay = fidelity(np.mean(outs, axis=0), target_dev)
    assert replay == pytest.approx(report["achieved_fidelity"], abs=1e-6)


def test_smp_rejects_zero_segments(tmp_path, capsys):
    assert main(["--out", str(tmp_path), "smp", "--segments", "0"]) == 2
    assert "segments" in capsys.readouterr().err


def test_pulse_error_defaults(tmp_path, capsys):
    assert main(["--out", str(tmp_path), "pulse-error"]) == 0
    payload = json.loads((tmp_path / "pulse_error.json").read_text())
    assert payload["fidelity"] == pytest.approx(0.972, abs=0.003)
    assert payload["error_percent"] == pytest.approx(2.8, abs=0.3)
    assert "0.97" in capsys.readouterr().out


def test_errors_report(tmp_path):
    assert main(["--out", str(tmp_path), "errors"]) == 0
    payload = json.loads((tmp_path / "errors.json").read_text())
    assert payload["temperature"]["nu_q_hz"] == 7580.0
    assert payload["temperature"]["uncertainty_hz"] == pytest.approx(25.0)
    assert payload["hidden_delays"]["budget_s"] == pytest.approx(4.15e-6)
    assert payload["tomography_pulse"]["fidelity"] == pytest.approx(0.972, abs=0.003)


def test_errors_zero_temp_accuracy(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"errors": {"temp_accuracy_k": 0.0}}))
    assert main(["--config", str(cfg), "--out", str(tmp_path), "errors"]) == 0
    payload = json.loads((tmp_path / "errors.json").read_text())
    assert payload["temperature"]["uncertainty_hz"] == 0.0


def test_numerical_inconsistency_exit_code(tmp_path, monkeypatch):
    from spinsqueeze.metrics import InconsistentMomentsError

    def boom(states, times):
        raise InconsistentMomentsError("forced for the exit-code contract")

    monkeypatch.setattr(cli, "report_trajectory", boom)
    assert main(["--out", str(tmp_path), "trajectory"]) == 3


def test_nine_significant_digits(tmp_path):
    assert main(["--out", str(tmp_path), "trajectory"]) == 0
    for line in (tmp_path / "trajectory.csv").read_text().splitlines()[1:3]:
        for tok in line.split(","):
            mantissa = tok.replace("-", "").replace(".", "").split("e")[0].lstrip("0")
            assert len(mantissa) <= 9
