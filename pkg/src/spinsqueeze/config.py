"""Experiment configuration: defaults, JSON loading, flag overrides.

The JSON file is a single document with one section per command plus a few
shared top-level keys; command-line flags override file values. Times left
null pick the protocol defaults (one quadrupolar period in 44 steps for the
trajectory, two periods for the pulse length).
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "CONFIG_ENV_VAR"]

CONFIG_ENV_VAR = "SPINSQUEEZE_CONFIG"


class ConfigError(ValueError):
    """Invalid or inconsistent configuration (CLI exit code 2)."""


@dataclass
class ExperimentConfig:
    # shared
    two_i: int = 7
    nu_q_hz: float = 7580.0
    seed: int = 20240803
    out_dir: str = "."
    # thermal
    nu_l_hz: float = 65.598e6
    temperature_k: float = 299.15
    partition_dim: int | None = None  # None -> 2I + 1
    # trajectory (None times -> one quadrupolar period in 44 equal steps)
    theta0_rad: float = math.pi / 2
    phi0_rad: float = math.pi
    time_start_s: float = 0.0
    time_stop_s: float | None = None
    time_step_s: float | None = None
    # wigner
    n_theta: int = 64
    n_phi: int = 128
    k_indices: tuple[int, ...] = (0, 4, 17, 40, 44)
    # smp
    smp_segments: int = 16
    smp_eta: int = 2
    smp_t_smp_s: float | None = None  # None -> 2 / nu_q
    smp_restarts: int = 8
    ramp_fraction: float = 0.1
    sigma_fraction: float = 0.33
    # pulse error / error budget
    nu_1_hz: float = 19e3
    pulse_phase_rad: float = 0.0
    pulse_duration_s: float = 2.2e-6
    t_ref_k: float = 299.15
    slope_hz_per_k: float = -250.0
    temp_accuracy_k: float = 0.1
    # recycle delay between repetitions; metadata only (no relaxation is modelled)
    recycle_delay_s: float = 3.5

    def validate(self) -> "ExperimentConfig":
        if not isinstance(self.two_i, int) or self.two_i < 1:
            raise ConfigError(f"two_i must be a positive integer, got {self.two_i!r}")
        if self.nu_q_hz is None or self.nu_q_hz <= 0:
            raise ConfigError("nu_q_hz must be positive")
        if self.nu_l_hz is None or self.nu_l_hz <= 0:
            raise ConfigError("nu_l_hz must be positive")
        if self.temperature_k is None or self.temperature_k <= 0:
            raise ConfigError("temperature_k must be positive")
        if self.partition_dim is not None and self.partition_dim < 1:
            raise ConfigError("partition_dim must be >= 1")
        if self.time_step_s is not None and self.time_step_s <= 0:
            raise ConfigError("time_step_s must be positive")
        if self.time_stop_s is not None and self.time_stop_s < self.time_start_s:
            raise ConfigError("time_stop_s must be >= time_start_s")
        if self.n_theta < 2 or self.n_phi < 2:
            raise ConfigError("wigner grid needs at least 2 nodes per axis")
        if self.smp_segments < 1:
            raise ConfigError("smp segments must be >= 1")
        if self.smp_eta < 1:
            raise ConfigError("smp eta must be >= 1")
        if self.smp_restarts < 1:
            raise ConfigError("smp restarts must be >= 1")
        if self.pulse_duration_s <= 0:
            raise ConfigError("pulse_duration_s must be positive")
        if self.temp_accuracy_k < 0:
            raise ConfigError("temp_accuracy_k must be non-negative")
        if self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        return self

    @property
    def z(self) -> int:
        return (self.two_i + 1) if self.partition_dim is None else self.partition_dim

    def times(self) -> np.ndarray:
        """The trajectory time grid; defaults to one period in 44 steps."""
        period = 1.0 / self.nu_q_hz
        start = self.time_start_s
        stop = period if self.time_stop_s is None else self.time_stop_s
        step = period / 44.0 if self.time_step_s is None else self.time_step_s
        n = int(math.floor((stop - start) / step + 0.5)) + 1
        grid = start + step * np.arange(n)
        return grid[grid <= stop + step * 1e-9]

    @property
    def t_smp(self) -> float:
        return (2.0 / self.nu_q_hz) if self.smp_t_smp_s is None else self.smp_t_smp_s


# JSON section -> (json key -> dataclass field)
_SECTIONS: dict[str, dict[str, str]] = {
    "spin": {"two_i": "two_i"},
    "thermal": {
        "nu_l_hz": "nu_l_hz",
        "temperature_k": "temperature_k",
        "partition_dim": "partition_dim",
    },
    "trajectory": {
        "nu_q_hz": "nu_q_hz",
        "theta0_rad": "theta0_rad",
        "phi0_rad": "phi0_rad",
        "time_start_s": "time_start_s",
        "time_stop_s": "time_stop_s",
        "time_step_s": "time_step_s",
    },
    "wigner": {"n_theta": "n_theta", "n_phi": "n_phi", "k_indices": "k_indices"},
    "smp": {
        "segments": "smp_segments",
        "eta": "smp_eta",
        "t_smp_s": "smp_t_smp_s",
        "restarts": "smp_restarts",
        "seed": "seed",
        "ramp_fraction": "ramp_fraction",
        "sigma_fraction": "sigma_fraction",
    },
    "pulse_error": {
        "nu_1_hz": "nu_1_hz",
        "phase_rad": "pulse_phase_rad",
        "duration_s": "pulse_duration_s",
    },
    "errors": {
        "t_ref_k": "t_ref_k",
        "slope_hz_per_k": "slope_hz_per_k",
        "temp_accuracy_k": "temp_accuracy_k",
    },
    "output": {"directory": "out_dir"},
}

_TOP_LEVEL = {"nu_q_hz": "nu_q_hz", "seed": "seed", "out_dir": "out_dir",
              "spin_two_i": "two_i", "recycle_delay_s": "recycle_delay_s"}


def load_config(path: str | Path | None) -> ExperimentConfig:
    """Defaults, overlaid with the JSON file when given. Unknown keys error."""
    cfg = ExperimentConfig()
    if path is None:
        return cfg
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    updates: dict[str, object] = {}
    for key, value in raw.items():
        if key in _TOP_LEVEL:
            updates[_TOP_LEVEL[key]] = value
        elif key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"section {key!r} must be a JSON object")
            table = _SECTIONS[key]
            for sub, subval in value.items():
                if sub not in table:
                    raise ConfigError(f"unknown key {key}.{sub} in config")
                updates[table[sub]] = subval
        else:
            raise ConfigError(f"unknown section or key {key!r} in config")
    if "k_indices" in updates and updates["k_indices"] is not None:
        updates["k_indices"] = tuple(int(k) for k in updates["k_indices"])  # type: ignore[arg-type]
    for name, value in updates.items():
        ftypes = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
        if name not in ftypes:
            raise ConfigError(f"unknown config field {name!r}")
        setattr(cfg, name, value)
    if isinstance(cfg.two_i, float):
        if cfg.two_i != int(cfg.two_i):
            raise ConfigError("two_i must be an integer")
        cfg.two_i = int(cfg.two_i)
    return cfg
