"""Command-line front end.

Subcommands: thermal, trajectory, wigner, smp, pulse-error, errors.
Global flags: --config (JSON, or $SPINSQUEEZE_CONFIG), --out, --seed, --nu-q.

Exit codes: 0 success, 2 configuration/usage error, 3 numerical
inconsistency. All numeric output (CSV and JSON) is formatted to 9
significant digits; files are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .calibration import (
    DelayEvent,
    DelayKind,
    TempModel,
    hidden_delay_budget,
    nu_q_at,
    nu_q_uncertainty,
    pulse_error_report,
)
from .config import CONFIG_ENV_VAR, ConfigError, ExperimentConfig, load_config
from .dynamics import oat_trajectory
from .metrics import InconsistentMomentsError, report_trajectory
from .operators import SpinSystem
from .smp import EnvelopeSpec, SmpConfig, optimize_smp
from .states import HBAR, K_B, ThermalParams, coherent_state, polarization, thermal_deviation
from .wigner import sphere_integral, wigner_map

__all__ = ["main"]


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def _round9(obj):
    """Recursively round floats to 9 significant digits for JSON output."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round9(v) for v in obj]
    return obj


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _write_json(path: Path, payload: dict) -> None:
    _atomic_write(path, json.dumps(_round9(payload), indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: list[str], rows: list[list[float]]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    _atomic_write(path, "\n".join(lines) + "\n")


def _out_dir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_thermal(cfg: ExperimentConfig) -> int:
    spin = SpinSystem(cfg.two_i)
    params = ThermalParams(
        larmor_frequency=2.0 * math.pi * cfg.nu_l_hz,
        temperature=cfg.temperature_k,
        partition_dim=cfg.z,
    )
    eps = polarization(params)
    dev = thermal_deviation(spin)
    payload = {
        "epsilon": eps,
        "nu_l_hz": cfg.nu_l_hz,
        "larmor_frequency_rad_s": params.larmor_frequency,
        "temperature_k": cfg.temperature_k,
        "partition_dim": cfg.z,
        "constants": {"hbar_j_s": HBAR, "k_b_j_per_k": K_B},
        "deviation_matrix": {
            "operator": "Jz",
            "basis": "descending m, |I,I> first",
            "diagonal": [float(x) for x in np.diag(dev).real],
        },
    }
    out = _out_dir(cfg)
    _write_json(out / "thermal.json", payload)
    print(f"polarization epsilon = {_fmt(eps)}")
    print(f"deviation matrix: Jz, diag({', '.join(_fmt(x) for x in np.diag(dev).real)})")
    print(f"wrote {out / 'thermal.json'}")
    return 0


def _trajectory_states(cfg: ExperimentConfig):
    spin = SpinSystem(cfg.two_i)
    zeta = coherent_state(spin, cfg.theta0_rad, cfg.phi0_rad)
    initial = np.outer(zeta, zeta.conj())
    times = cfg.times()
    omega_q = 2.0 * math.pi * cfg.nu_q_hz
    return oat_trajectory(initial, omega_q, times), times


def cmd_trajectory(cfg: ExperimentConfig) -> int:
    states, times = _trajectory_states(cfg)
    reports = report_trajectory(states, times)
    rows = [[r.time * 1e6, r.a, r.b, r.c, r.xi, r.alpha] for r in reports]
    out = _out_dir(cfg)
    path = out / "trajectory.csv"
    _write_csv(path, ["tau_us", "A", "B", "C", "xi", "alpha_rad"], rows)
    min_report = min(reports, key=lambda r: r.xi)
    print(f"{len(reports)} time points, tau in [{_fmt(times[0] * 1e6)}, {_fmt(times[-1] * 1e6)}] us")
    print(f"min xi = {_fmt(min_report.xi)} at tau = {_fmt(min_report.time * 1e6)} us")
    print(f"wrote {path}")
    return 0


def cmd_wigner(cfg: ExperimentConfig, k_indices: list[int] | None) -> int:
    indices = cfg.k_indices if k_indices is None else tuple(k_indices)
    states, times = _trajectory_states(cfg)
    for k in indices:
        if not 0 <= k < len(states):
            raise ConfigError(f"k index {k} outside trajectory grid 0..{len(states) - 1}")
    out = _out_dir(cfg)
    for k in indices:
        grid = wigner_map(states[k], cfg.n_theta, cfg.n_phi)
        rows = [
            [grid.thetas[i], grid.phis[j], grid.values[i, j]]
            for i in range(len(grid.thetas))
            for j in range(len(grid.phis))
        ]
        path = out / f"wigner_k{k}.csv"
        _write_csv(path, ["theta_rad", "phi_rad", "w"], rows)
        print(f"k={k}: tau = {_fmt(times[k] * 1e6)} us, integral = {_fmt(sphere_integral(grid))}, wrote {path}")
    if not indices:
        print("no k indices requested; nothing to write")
    return 0


def cmd_smp(cfg: ExperimentConfig) -> int:
    spin = SpinSystem(cfg.two_i)
    smp_cfg = SmpConfig(
        spin=spin,
        omega_q=2.0 * math.pi * cfg.nu_q_hz,
        segments=cfg.smp_segments,
        eta=cfg.smp_eta,
        t_smp=cfg.t_smp,
        restarts=cfg.smp_restarts,
        seed=cfg.seed,
        envelope=EnvelopeSpec(cfg.ramp_fraction, cfg.sigma_fraction),
    )
    zeta = coherent_state(spin, cfg.theta0_rad, cfg.phi0_rad)
    target = np.outer(zeta, zeta.conj())
    result = optimize_smp(target, smp_cfg)
    out = _out_dir(cfg)
    program_payload = {
        "spin_two_i": cfg.two_i,
        "nu_q_hz": cfg.nu_q_hz,
        "eta": cfg.smp_eta,
        "t_smp_s": smp_cfg.duration,
        "envelope": {
            "ramp_fraction": cfg.ramp_fraction,
            "sigma_fraction": cfg.sigma_fraction,
        },
        "variants": [
            [
                {
                    "amplitude_rad_s": seg.amplitude,
                    "phase_rad": seg.phase,
                    "duration_s": seg.duration,
                }
                for seg in prog.segments
            ]
            for prog in result.programs
        ],
        "seed": cfg.seed,
    }
    _write_json(out / "pulse_program.json", program_payload)
    report_payload = {
        "achieved_fidelity": result.fidelity,
        "iterations": result.iterations,
        "seed": result.seed,
        "rng": "pcg64",
        "target_fidelity": smp_cfg.target_fidelity,
        "below_target": result.below_target,
        "segments": cfg.smp_segments,
        "eta": cfg.smp_eta,
        "restarts": cfg.smp_restarts,
    }
    _write_json(out / "smp_report.json", report_payload)
    print(f"achieved fidelity = {_fmt(result.fidelity)} ({result.iterations} simplex iterations)")
    if result.below_target:
        print(f"warning: below target fidelity {_fmt(smp_cfg.target_fidelity)}", file=sys.stderr)
    print(f"wrote {out / 'pulse_program.json'}")
    print(f"wrote {out / 'smp_report.json'}")
    return 0


def cmd_pulse_error(cfg: ExperimentConfig) -> int:
    spin = SpinSystem(cfg.two_i)
    report = pulse_error_report(
        spin,
        omega_1=2.0 * math.pi * cfg.nu_1_hz,
        omega_q=2.0 * math.pi * cfg.nu_q_hz,
        phi=cfg.pulse_phase_rad,
        t=cfg.pulse_duration_s,
    )
    payload = {
        "fidelity": report["fidelity"],
        "error_percent": report["error_percent"],
        "nu_1_hz": cfg.nu_1_hz,
        "nu_q_hz": cfg.nu_q_hz,
        "phase_rad": cfg.pulse_phase_rad,
        "duration_s": cfg.pulse_duration_s,
        "spin_two_i": cfg.two_i,
    }
    out = _out_dir(cfg)
    _write_json(out / "pulse_error.json", payload)
    print(f"tomography pulse fidelity = {_fmt(report['fidelity'])} "
          f"(error {_fmt(report['error_percent'])} %)")
    print(f"wrote {out / 'pulse_error.json'}")
    return 0


def cmd_errors(cfg: ExperimentConfig) -> int:
    spin = SpinSystem(cfg.two_i)
    pulse = pulse_error_report(
        spin,
        omega_1=2.0 * math.pi * cfg.nu_1_hz,
        omega_q=2.0 * math.pi * cfg.nu_q_hz,
        phi=cfg.pulse_phase_rad,
        t=cfg.pulse_duration_s,
    )
    model = TempModel(nu_q_ref=cfg.nu_q_hz, t_ref=cfg.t_ref_k, slope=cfg.slope_hz_per_k)
    events = [
        DelayEvent(DelayKind.PHASE_SET),
        DelayEvent(DelayKind.GATE_ON),
        DelayEvent(DelayKind.GATE_OFF),
        DelayEvent(DelayKind.FREQUENCY_CHANGE),
    ]
    budget = hidden_delay_budget(events)
    payload = {
        "tomography_pulse": {
            "fidelity": pulse["fidelity"],
            "error_percent": pulse["error_percent"],
            "nu_1_hz": cfg.nu_1_hz,
            "nu_q_hz": cfg.nu_q_hz,
            "duration_s": cfg.pulse_duration_s,
        },
        "temperature": {
            "nu_q_hz": nu_q_at(model, cfg.t_ref_k),
            "uncertainty_hz": nu_q_uncertainty(model, cfg.temp_accuracy_k),
            "slope_hz_per_k": cfg.slope_hz_per_k,
            "temp_accuracy_k": cfg.temp_accuracy_k,
        },
        "hidden_delays": {
            "events": {ev.kind.value: ev.count for ev in events},
            "budget_s": budget,
            "note": "per-event bounds taken as values; budget is an upper estimate",
        },
    }
    out = _out_dir(cfg)
    _write_json(out / "errors.json", payload)
    print(f"tomography pulse fidelity = {_fmt(pulse['fidelity'])}")
    print(f"nu_q = {_fmt(nu_q_at(model, cfg.t_ref_k))} +/- "
          f"{_fmt(nu_q_uncertainty(model, cfg.temp_accuracy_k))} Hz")
    print(f"hidden delay budget (one pulse) = {_fmt(budget * 1e6)} us")
    print(f"wrote {out / 'errors.json'}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinsqueeze",
        description="Spin-squeezing simulator for a single quadrupolar NMR nucleus",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help=f"JSON config path (default ${CONFIG_ENV_VAR})")
    parser.add_argument("--out", help="output directory (default from config)")
    parser.add_argument("--seed", type=int, help="PRNG seed (pcg64)")
    parser.add_argument("--nu-q", type=float, dest="nu_q", help="quadrupolar frequency in Hz")
    parser.add_argument("--two-i", type=int, dest="two_i", help="2I (spin doubled)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thermal", help="polarization factor and thermal deviation matrix")
    p.add_argument("--nu-l", type=float, dest="nu_l", help="Larmor frequency in Hz")
    p.add_argument("--temperature", type=float, help="temperature in K")
    p.add_argument("--partition-dim", type=int, dest="partition_dim", help="Z (default 2I+1)")

    p = sub.add_parser("trajectory", help="squeezing dynamics over the time grid")
    p.add_argument("--theta0", type=float, help="initial polar angle (rad)")
    p.add_argument("--phi0", type=float, help="initial azimuthal angle (rad)")

    p = sub.add_parser("wigner", help="Wigner maps at trajectory indices")
    p.add_argument("--k", help="comma-separated k indices (default 0,4,17,40,44)")
    p.add_argument("--n-theta", type=int, dest="n_theta", help="polar grid size")
    p.add_argument("--n-phi", type=int, dest="n_phi", help="azimuthal grid size")

    p = sub.add_parser("smp", help="design the state-preparation pulse programs")
    p.add_argument("--segments", type=int, help="segments per pulse train (N)")
    p.add_argument("--eta", type=int, help="number of averaged pulse trains")
    p.add_argument("--restarts", type=int, help="seeded optimizer restarts")

    sub.add_parser("pulse-error", help="tomography-pulse fidelity vs ideal rotation")
    sub.add_parser("errors", help="full error budget report")
    return parser


def _apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    mapping = {
        "out": "out_dir",
        "seed": "seed",
        "nu_q": "nu_q_hz",
        "two_i": "two_i",
        "nu_l": "nu_l_hz",
        "temperature": "temperature_k",
        "partition_dim": "partition_dim",
        "theta0": "theta0_rad",
        "phi0": "phi0_rad",
        "n_theta": "n_theta",
        "n_phi": "n_phi",
        "segments": "smp_segments",
        "eta": "smp_eta",
        "restarts": "smp_restarts",
    }
    for arg_name, field_name in mapping.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            setattr(cfg, field_name, value)
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
        cfg = load_config(config_path)
        cfg = _apply_overrides(cfg, args)
        cfg.validate()
        if args.command == "thermal":
            return cmd_thermal(cfg)
        if args.command == "trajectory":
            return cmd_trajectory(cfg)
        if args.command == "wigner":
            k = None
            if args.k is not None:
                k = [int(tok) for tok in args.k.split(",") if tok.strip() != ""]
            return cmd_wigner(cfg, k)
        if args.command == "smp":
            return cmd_smp(cfg)
        if args.command == "pulse-error":
            return cmd_pulse_error(cfg)
        if args.command == "errors":
            return cmd_errors(cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InconsistentMomentsError as exc:
        print(f"numerical inconsistency: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
