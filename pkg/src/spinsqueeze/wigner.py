"""Multipole decomposition and Wigner quasi-probability maps on the sphere.

A state of spin I is expanded over the orthonormal tensor basis,
rho_KQ = Tr(rho T_KQ^dag), and synthesized against spherical harmonics:

    W(theta, phi) = sqrt((2I+1)/(4 pi)) sum_KQ rho_KQ Y_KQ(theta, phi)

W is real for Hermitian input and integrates to Tr(rho) over the sphere.
Quadrature is Gauss-Legendre in cos(theta) crossed with a uniform trapezoid
rule in phi, both exact for the band-limited (K <= 2I) synthesis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import SpinSystem, _tensor_stack, require_hermitian, require_square

__all__ = [
    "MultipoleCoeffs",
    "WignerGrid",
    "multipoles",
    "reconstruct",
    "spherical_harmonic",
    "wigner_map",
    "sphere_integral",
]

MAX_DEGREE = 14


@dataclass(frozen=True)
class MultipoleCoeffs:
    """Tensor expansion coefficients rho_KQ of one state, keyed by (K, Q)."""

    two_i: int
    coeffs: dict[tuple[int, int], complex]

    def __getitem__(self, kq: tuple[int, int]) -> complex:
        return self.coeffs[kq]


@dataclass(frozen=True)
class WignerGrid:
    """Wigner map samples with the quadrature that integrates them.

    thetas are Gauss-Legendre nodes mapped to (0, pi) in increasing order,
    phis are uniform on [0, 2 pi), values has shape (n_theta, n_phi), and
    weights are the per-theta Gauss-Legendre weights (the phi rule is the
    uniform weight 2 pi / n_phi).
    """

    thetas: np.ndarray
    phis: np.ndarray
    values: np.ndarray
    weights: np.ndarray


def multipoles(rho: np.ndarray) -> MultipoleCoeffs:
    """All (2I+1)^2 coefficients Tr(rho T_KQ^dag); spin inferred from dim."""
    rho = require_square(rho, "rho")
    two_i = rho.shape[0] - 1
    kq, stack = _tensor_stack(two_i)
    vals = np.einsum("ab,kab->k", rho, stack.conj())
    return MultipoleCoeffs(two_i, dict(zip(kq, (complex(v) for v in vals))))


def reconstruct(mc: MultipoleCoeffs) -> np.ndarray:
    """Inverse expansion sum_KQ rho_KQ T_KQ."""
    kq, stack = _tensor_stack(mc.two_i)
    coeffs = np.array([mc.coeffs[key] for key in kq])
    return np.einsum("k,kab->ab", coeffs, stack)


def _legendre_normalized(kmax: int, x: np.ndarray) -> np.ndarray:
    """Fully normalized associated Legendre table with Condon-Shortley phase.

    Returns L with L[k, q] such that Y_kq(theta, phi) = L[k, q] e^{i q phi}
    evaluated at x = cos(theta), for 0 <= q <= k <= kmax. Uses the standard
    stable upward recurrences in k at fixed q.
    """
    x = np.asarray(x, dtype=float)
    sin_t = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    out = np.zeros((kmax + 1, kmax + 1) + x.shape)
    out[0, 0] = 1.0 / np.sqrt(4.0 * np.pi)
    for q in range(1, kmax + 1):
        out[q, q] = -np.sqrt((2 * q + 1) / (2 * q)) * sin_t * out[q - 1, q - 1]
    for q in range(kmax):
        out[q + 1, q] = np.sqrt(2 * q + 3) * x * out[q, q]
    for q in range(kmax + 1):
        for k in range(q + 2, kmax + 1):
            a = np.sqrt((4 * k * k - 1) / (k * k - q * q))
            b = np.sqrt(((k - 1) ** 2 - q * q) / (4 * (k - 1) ** 2 - 1))
            out[k, q] = a * (x * out[k - 1, q] - b * out[k - 2, q])
    return out


def spherical_harmonic(k: int, q: int, theta, phi):
    """Orthonormalized Y_KQ(theta, phi), Condon-Shortley phase, K <= 14."""
    if not 0 <= k <= MAX_DEGREE:
        raise ValueError(f"degree k={k} outside 0..{MAX_DEGREE}")
    if abs(q) > k:
        raise ValueError(f"order q={q} outside -k..k for k={k}")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    table = _legendre_normalized(k, np.cos(theta))
    if q >= 0:
        val = table[k, q] * np.exp(1j * q * phi)
    else:
        val = (-1.0) ** (-q) * np.conj(table[k, -q] * np.exp(-1j * q * phi))
    return complex(val) if val.ndim == 0 else val


def _sphere_grid(n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n_theta)
    thetas = np.arccos(x)
    order = np.argsort(thetas)
    phis = np.arange(n_phi) * (2.0 * np.pi / n_phi)
    return thetas[order], phis, w[order]


def wigner_map(rho: np.ndarray, n_theta: int = 64, n_phi: int = 128) -> WignerGrid:
    """Synthesize the Wigner map of a Hermitian state on an n_theta x n_phi grid.

    n_theta >= 2I + 1 makes the quadrature exact for the band limit; the
    default 64 x 128 is oversampled for smooth plots.
    """
    rho = require_hermitian(rho, "rho")
    two_i = rho.shape[0] - 1
    if n_theta < 2 or n_phi < 2:
        raise ValueError("grid must have at least 2 nodes per axis")
    thetas, phis, weights = _sphere_grid(n_theta, n_phi)
    kq, stack = _tensor_stack(two_i)
    coeffs = np.einsum("ab,kab->k", rho, stack.conj())
    table = _legendre_normalized(two_i, np.cos(thetas))
    phase = np.exp(1j * np.outer(np.arange(-two_i, two_i + 1), phis))  # row q+two_i
    synth = np.zeros((n_theta, n_phi), dtype=complex)
    for idx, (k, q) in enumerate(kq):
        if q >= 0:
            y_theta = table[k, q]
            y_phi = phase[q + two_i]
        else:
            y_theta = (-1.0) ** (-q) * table[k, -q]
            y_phi = phase[q + two_i]
        synth += coeffs[idx] * np.outer(y_theta, y_phi)
    synth *= np.sqrt((two_i + 1) / (4.0 * np.pi))
    residue = float(np.abs(synth.imag).max())
    if residue > 1e-9:
        raise ValueError(f"synthesis imaginary residue {residue:.3e} exceeds 1e-9")
    return WignerGrid(thetas, phis, synth.real, weights)


def sphere_integral(grid: WignerGrid) -> float:
    """Integral of W over the sphere under the grid's own quadrature."""
    dphi = 2.0 * np.pi / len(grid.phis)
    return float(grid.weights @ grid.values.sum(axis=1) * dphi)
