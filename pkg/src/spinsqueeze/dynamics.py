"""Rotating-frame NMR Hamiltonians, exact propagators and free evolution.

The full rotating-frame Hamiltonian (hbar = 1) is

    H = -detuning * Jz + (omega_q / 6) (3 Jz^2 - J^2)
        + omega_1 (Jx cos(phi) + Jy sin(phi))

With the transmitter off and on resonance this reduces, after dropping the
constant -(omega_q/6) J^2 term, to the one-axis-twisting generator
H = (omega_q / 2) Jz^2.

Propagators are computed by Hermitian eigendecomposition (exactly unitary up
to roundoff, with a cheaper path for diagonal generators); dimensions here
never exceed 15, so nothing fancier is warranted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .operators import SpinSystem, angular_momentum, require_hermitian, require_square

__all__ = [
    "NmrParams",
    "Propagator",
    "nmr_hamiltonian",
    "oat_hamiltonian",
    "propagator",
    "evolve",
    "rf_pulse_operator",
    "ideal_pulse_operator",
    "default_time_grid",
    "oat_trajectory",
]


@dataclass(frozen=True)
class NmrParams:
    """Rotating-frame Hamiltonian parameters, all angular frequencies in rad/s.

    omega_q may take either sign (prolate vs oblate charge distribution);
    omega_1 is the RF amplitude; detuning is omega_L - omega_RF.
    """

    omega_q: float
    omega_1: float = 0.0
    detuning: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        if self.omega_1 < 0:
            raise ValueError("omega_1 must be non-negative")


@dataclass(frozen=True)
class Propagator:
    """A unitary together with the evolution time that produced it."""

    unitary: np.ndarray
    duration: float

    def __post_init__(self):
        u = require_square(self.unitary, "unitary")
        defect = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
        if defect >= 1e-10:
            raise ValueError(f"matrix is not unitary: max |U^dag U - 1| = {defect:.3e}")
        u.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.unitary.shape[0]


def nmr_hamiltonian(spin: SpinSystem, params: NmrParams) -> np.ndarray:
    ops = angular_momentum(spin)
    h = (params.omega_q / 6.0) * (3.0 * (ops.jz @ ops.jz) - ops.j2)
    if params.detuning != 0.0:
        h = h - params.detuning * ops.jz
    if params.omega_1 != 0.0:
        h = h + params.omega_1 * (np.cos(params.phase) * ops.jx + np.sin(params.phase) * ops.jy)
    return h


def oat_hamiltonian(spin: SpinSystem, omega_q: float) -> np.ndarray:
    """One-axis-twisting generator (omega_q / 2) Jz^2, diagonal."""
    jz = angular_momentum(spin).jz
    return (omega_q / 2.0) * (jz @ jz)


def propagator(h: np.ndarray, t: float) -> Propagator:
    """U = exp(-i H t) for Hermitian H."""
    h = require_hermitian(h, "hamiltonian")
    d = h.shape[0]
    off = h - np.diag(np.diag(h))
    if not off.any():
        u = np.diag(np.exp(-1j * np.diag(h).real * t))
    else:
        w, v = np.linalg.eigh(h)
        u = (v * np.exp(-1j * w * t)) @ v.conj().T
    return Propagator(u, t)


def evolve(rho: np.ndarray, u: Propagator) -> np.ndarray:
    """U rho U^dag; preserves trace and spectrum."""
    rho = require_square(rho, "rho")
    if rho.shape[0] != u.dim:
        raise ValueError(f"dimension mismatch: state {rho.shape[0]}, propagator {u.dim}")
    return u.unitary @ rho @ u.unitary.conj().T


def rf_pulse_operator(spin: SpinSystem, omega_1: float, omega_q: float,
                      phi: float, t: float) -> Propagator:
    """Resonant tomography pulse including the quadrupolar term:

    U(t) = exp[-i omega_1 t (Jx cos(phi) + Jy sin(phi)) - i (omega_q t / 2) Jz^2]
    """
    if t < 0:
        raise ValueError("pulse duration must be non-negative")
    ops = angular_momentum(spin)
    h = omega_1 * (np.cos(phi) * ops.jx + np.sin(phi) * ops.jy) + (omega_q / 2.0) * (ops.jz @ ops.jz)
    return propagator(h, t)


def ideal_pulse_operator(spin: SpinSystem, omega_1: float, phi: float, t: float) -> Propagator:
    """Pure rotation V(t) = exp[-i omega_1 t (Jx cos(phi) + Jy sin(phi))]."""
    if t < 0:
        raise ValueError("pulse duration must be non-negative")
    ops = angular_momentum(spin)
    h = omega_1 * (np.cos(phi) * ops.jx + np.sin(phi) * ops.jy)
    return propagator(h, t)


def default_time_grid(nu_q: float, points: int = 45) -> np.ndarray:
    """One quadrupolar period 1/nu_q sampled at equally spaced points.

    For nu_q = 7580 Hz and 45 points the step is 2.998 us and the endpoint
    131.93 us (the nominal 3 us / 132 us protocol, kept commensurate with the
    period so the final sample is an exact revival).
    """
    if nu_q <= 0:
        raise ValueError("nu_q must be positive")
    if points < 2:
        raise ValueError("need at least 2 grid points")
    return np.arange(points) * (1.0 / nu_q / (points - 1))


def oat_trajectory(initial: np.ndarray, omega_q: float,
                   times: Sequence[float]) -> list[np.ndarray]:
    """Evolve a deviation matrix under (omega_q/2) Jz^2 at each listed time.

    Times must be non-decreasing and are taken verbatim (no step inference).
    Each point is computed independently from the initial state via the
    diagonal fast path, so results do not depend on evaluation order.
    """
    initial = require_square(initial, "initial")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-d sequence")
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be non-decreasing")
    d = initial.shape[0]
    spin = SpinSystem(d - 1)
    levels = (omega_q / 2.0) * spin.m_values() ** 2
    out = []
    for t in times:
        u = np.exp(-1j * levels * t)
        out.append((u[:, None] * initial) * u.conj()[None, :])
    return out
