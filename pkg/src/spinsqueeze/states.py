"""Thermal, deviation, pseudo-pure and spin coherent states.

The coherent state is

    |zeta(theta, phi)> = sum_m binom(2I, I+m)^(1/2) cos(theta/2)^(I-m)
                         sin(theta/2)^(I+m) exp(-i (I+m) phi) |I, m>

Note the orientation this formula implies: theta = 0 gives |I, -I>
(mean spin along -z), and <Jz> = -I cos(theta), <Jx> = I sin(theta) cos(phi),
<Jy> = I sin(theta) sin(phi). theta is effectively measured from the south
pole; the formula is implemented verbatim and the convention is documented
here rather than "corrected".
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .operators import SpinSystem, angular_momentum, require_hermitian

__all__ = [
    "HBAR",
    "K_B",
    "ThermalParams",
    "coherent_state",
    "thermal_deviation",
    "polarization",
    "pseudo_pure",
]

# CODATA 2018 exact values (SI); recorded in CLI output metadata.
HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K


@dataclass(frozen=True)
class ThermalParams:
    """High-temperature thermal-state parameters.

    larmor_frequency is an angular frequency (rad/s); partition_dim is the
    identity-dominated partition function Z (2I+1 in the high-T limit).
    """

    larmor_frequency: float
    temperature: float
    partition_dim: int

    def __post_init__(self):
        if self.larmor_frequency <= 0:
            raise ValueError("larmor_frequency must be positive")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.partition_dim < 1:
            raise ValueError("partition_dim must be >= 1")


def coherent_state(spin: SpinSystem, theta: float, phi: float) -> np.ndarray:
    """Spin coherent state |zeta(theta, phi)> as a dim-vector of amplitudes."""
    amps = np.empty(spin.dim, dtype=complex)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    for idx in range(spin.dim):
        n_up = spin.two_i - idx  # I + m with m = I - idx
        n_down = idx  # I - m
        amps[idx] = (
            comb(spin.two_i, n_up) ** 0.5
            * c**n_down
            * s**n_up
            * np.exp(-1j * n_up * phi)
        )
    return amps


def thermal_deviation(spin: SpinSystem) -> np.ndarray:
    """Deviation density matrix of the thermal state: Jz (traceless, Hermitian)."""
    return angular_momentum(spin).jz.copy()


def polarization(params: ThermalParams) -> float:
    """Polarization factor eps = hbar * omega_L / (k_B * T * Z)."""
    return HBAR * params.larmor_frequency / (K_B * params.temperature * params.partition_dim)


def pseudo_pure(spin: SpinSystem, epsilon: float, delta_rho: np.ndarray,
                partition_dim: int | None = None) -> np.ndarray:
    """Pseudo-pure density matrix ((1 - eps)/Z) * identity + eps * delta_rho.

    delta_rho must be Hermitian with unit trace (a pure-state-shaped
    deviation). Z defaults to the Hilbert-space dimension.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    z = spin.dim if partition_dim is None else partition_dim
    delta_rho = require_hermitian(delta_rho, "delta_rho")
    if delta_rho.shape[0] != spin.dim:
        raise ValueError(f"delta_rho dimension {delta_rho.shape[0]} != {spin.dim}")
    tr = np.trace(delta_rho).real
    if abs(tr - 1.0) > 1e-10:
        raise ValueError(f"delta_rho must have unit trace, got {tr}")
    return ((1.0 - epsilon) / z) * np.eye(spin.dim) + epsilon * delta_rho
