"""Squeezing quantification and operator similarity.

For a state whose mean spin points along x, squeezing is read off the
second moments of the transverse components:

    A = <Jz^2 - Jy^2>,  B = <Jz Jy + Jy Jz>,  C = <Jz^2 + Jy^2>

    xi    = sqrt(C/2 - sqrt(A^2 + B^2)/2) / sqrt(J/2)
    alpha = (1/2) arctan(B / A)

xi < 1 certifies squeezing; alpha is the orientation of the squeezed
quadrature in the y-z plane. The moments are used raw (no mean subtraction),
which is valid only when <Jy> = <Jz> = 0; squeezing_abc enforces that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .operators import (
    SpinOperators,
    SpinSystem,
    angular_momentum,
    expectation,
    require_hermitian,
    require_square,
)

__all__ = [
    "InconsistentMomentsError",
    "SqueezingReport",
    "squeezing_abc",
    "xi",
    "alpha",
    "fidelity",
    "report_trajectory",
]

# Degenerate-branch threshold for alpha and residue checks on moments.
_ATOL = 1e-10


class InconsistentMomentsError(ValueError):
    """Second moments violate variance non-negativity beyond tolerance."""


@dataclass(frozen=True)
class SqueezingReport:
    """Squeezing diagnostics at one evolution time."""

    time: float
    a: float
    b: float
    c: float
    xi: float
    alpha: float


def squeezing_abc(rho: np.ndarray, ops: SpinOperators) -> tuple[float, float, float]:
    """The (A, B, C) second-moment combinations of Jy and Jz.

    rho must be Hermitian with unit trace, and its transverse means must
    vanish (|<Jy>|, |<Jz>| < 1e-8), since A, B, C are raw second moments.
    """
    rho = require_hermitian(rho, "rho")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > 1e-8:
        raise ValueError(f"rho must have unit trace, got {tr}")
    mean_y = expectation(rho, ops.jy)
    mean_z = expectation(rho, ops.jz)
    if abs(mean_y) > 1e-8 or abs(mean_z) > 1e-8:
        raise ValueError(
            "raw second moments require <Jy> = <Jz> = 0; got "
            f"<Jy> = {mean_y:.3e}, <Jz> = {mean_z:.3e}"
        )
    jz2 = ops.jz @ ops.jz
    jy2 = ops.jy @ ops.jy
    a = expectation(rho, jz2 - jy2)
    b = expectation(rho, ops.jz @ ops.jy + ops.jy @ ops.jz)
    c = expectation(rho, jz2 + jy2)
    for name, val in (("A", a), ("B", b), ("C", c)):
        if abs(val.imag) > _ATOL:
            raise ValueError(f"{name} has imaginary residue {val.imag:.3e}")
    return a.real, b.real, c.real


def xi(a: float, b: float, c: float, j: float) -> float:
    """Squeezing parameter: minimal transverse std dev over sqrt(J/2)."""
    radicand = c / 2.0 - np.hypot(a, b) / 2.0
    if radicand < -1e-9:
        raise InconsistentMomentsError(
            f"C/2 - sqrt(A^2+B^2)/2 = {radicand:.3e} < 0 beyond tolerance"
        )
    return float(np.sqrt(max(radicand, 0.0) / (j / 2.0)))


def alpha(a: float, b: float) -> float:
    """Squeezing angle (1/2) arctan(B/A) on the principal branch.

    Degenerate inputs follow the short-time limit of the twisting dynamics:
    A = B = 0 maps to +pi/4, and A = 0 alone to sign(B) * pi/4.
    """
    if abs(a) < _ATOL:
        if abs(b) < _ATOL:
            return np.pi / 4
        return float(np.sign(b)) * np.pi / 4
    return 0.5 * float(np.arctan(b / a))


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Normalized Hilbert-Schmidt similarity |Tr(A B^dag)| / sqrt(|A| |B|).

    Global-phase invariant, symmetric, and bounded by 1; identical operators
    give exactly 1. Raises on zero input.
    """
    a = require_square(a, "a")
    b = require_square(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("fidelity of a zero operator is undefined")
    return float(abs(np.einsum("ij,ij->", a, b.conj())) / (na * nb))


def report_trajectory(states: Sequence[np.ndarray], times: Sequence[float]) -> list[SqueezingReport]:
    """squeezing_abc -> xi -> alpha for each state; spin inferred from dim."""
    if len(states) != len(times):
        raise ValueError(f"{len(states)} states but {len(times)} times")
    reports = []
    for rho, t in zip(states, times):
        d = np.asarray(rho).shape[0]
        spin = SpinSystem(d - 1)
        ops = angular_momentum(spin)
        a, b, c = squeezing_abc(rho, ops)
        reports.append(SqueezingReport(float(t), a, b, c, xi(a, b, c, spin.i), alpha(a, b)))
    return reports
