"""Error-budget models: tomography-pulse accuracy, temperature-driven
quadrupolar drift, spectrometer hidden delays, and batch state fidelities.

The temperature model is the measured linear response of the quadrupolar
frequency (default -250 Hz/K around 7580 Hz). Hidden delays are fixed
instrument latencies; the defaults take the quoted "less than" bounds as
values, so budgets are upper estimates, and per-kind values are
configurable because the listed generators are not exhaustive.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dynamics import ideal_pulse_operator, rf_pulse_operator
from .metrics import fidelity
from .operators import SpinSystem

__all__ = [
    "TempModel",
    "DelayKind",
    "DelayEvent",
    "DEFAULT_DELAYS",
    "nu_q_at",
    "nu_q_uncertainty",
    "pulse_error_report",
    "hidden_delay_budget",
    "batch_fidelity",
    "add_hermitian_noise",
]


@dataclass(frozen=True)
class TempModel:
    """Linear quadrupolar-frequency response around a reference temperature."""

    nu_q_ref: float = 7580.0  # Hz at t_ref
    t_ref: float = 299.15  # K
    slope: float = -250.0  # Hz / K

    def __post_init__(self):
        if self.nu_q_ref <= 0:
            raise ValueError("nu_q_ref must be positive")


class DelayKind(enum.Enum):
    PHASE_SET = "phase_set"
    GATE_ON = "gate_on"
    GATE_OFF = "gate_off"
    ACQUISITION_SAMPLE = "acquisition_sample"
    FREQUENCY_CHANGE = "frequency_change"


@dataclass(frozen=True)
class DelayEvent:
    kind: DelayKind
    count: int = 1

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be non-negative")


DEFAULT_DELAYS: dict[DelayKind, float] = {
    DelayKind.PHASE_SET: 50e-9,
    DelayKind.GATE_ON: 50e-9,
    DelayKind.GATE_OFF: 50e-9,
    DelayKind.ACQUISITION_SAMPLE: 200e-9,
    DelayKind.FREQUENCY_CHANGE: 4e-6,
}


def nu_q_at(model: TempModel, temperature: float) -> float:
    """Quadrupolar frequency (Hz) at the given temperature, exactly linear."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    return model.nu_q_ref + model.slope * (temperature - model.t_ref)


def nu_q_uncertainty(model: TempModel, temp_accuracy: float) -> float:
    """Frequency uncertainty (Hz) induced by the controller accuracy (K)."""
    if temp_accuracy < 0:
        raise ValueError("temp_accuracy must be non-negative")
    return abs(model.slope) * temp_accuracy


def pulse_error_report(spin: SpinSystem, omega_1: float, omega_q: float,
                       phi: float, t: float) -> dict[str, float]:
    """Similarity between the real tomography pulse and the ideal rotation.

    Builds U (with the quadrupolar term) and V (without) over the same
    duration and reports {fidelity, error_percent = (1 - F) * 100}.
    """
    if t <= 0:
        raise ValueError("pulse duration must be positive")
    u = rf_pulse_operator(spin, omega_1, omega_q, phi, t)
    v = ideal_pulse_operator(spin, omega_1, phi, t)
    f = fidelity(u.unitary, v.unitary)
    return {"fidelity": f, "error_percent": (1.0 - f) * 100.0}


def hidden_delay_budget(events: Iterable[DelayEvent],
                        delays: Mapping[DelayKind, float] | None = None) -> float:
    """Total systematic timing error (s): sum of count * per-kind delay."""
    table = DEFAULT_DELAYS if delays is None else {**DEFAULT_DELAYS, **delays}
    return sum(ev.count * table[ev.kind] for ev in events)


def batch_fidelity(measured: Sequence[np.ndarray],
                   theoretical: Sequence[np.ndarray]) -> list[float]:
    """Elementwise fidelity between reconstructed and predicted matrices."""
    if len(measured) != len(theoretical):
        raise ValueError(f"{len(measured)} measured vs {len(theoretical)} theoretical")
    return [fidelity(m, t) for m, t in zip(measured, theoretical)]


def add_hermitian_noise(matrix: np.ndarray, relative_sigma: float,
                        rng: np.random.Generator) -> np.ndarray:
    """A noisy Hermitian copy modelling imperfect state reconstruction.

    Adds complex Gaussian noise with standard deviation relative_sigma times
    the RMS entry magnitude of ``matrix``, then Hermitizes.
    """
    matrix = np.asarray(matrix)
    d = matrix.shape[0]
    rms = np.linalg.norm(matrix) / d
    sigma = relative_sigma * rms
    noise = sigma * (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    noisy = matrix + noise
    return (noisy + noisy.conj().T) / 2.0
