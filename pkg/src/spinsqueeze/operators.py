"""Angular-momentum operators and irreducible spherical tensors for a single spin.

Conventions used throughout the package:

* The spin quantum number is stored as the integer ``2I`` so half-integer
  spins stay exact; the Hilbert-space dimension is ``d = 2I + 1``.
* Basis order is descending magnetic quantum number: ``|I, I>`` first,
  ``|I, -I>`` last.
* hbar = 1: Hamiltonians are angular frequencies in rad/s, times in seconds.
* Clebsch-Gordan coefficients and spherical tensors use the Condon-Shortley
  phase convention; tensors are orthonormal, ``Tr(T_KQ^dag T_K'Q') = delta``.

All operators are dense complex matrices (``numpy.ndarray``); functions here
are pure and the returned arrays from cached constructors are read-only, so
everything is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

__all__ = [
    "SpinSystem",
    "SpinOperators",
    "angular_momentum",
    "clebsch_gordan",
    "spherical_tensor",
    "tensor_basis",
    "expectation",
    "is_hermitian",
    "is_unitary",
    "require_hermitian",
    "require_square",
]

MAX_TWO_I = 14


@dataclass(frozen=True)
class SpinSystem:
    """A single spin with quantum number I = two_i / 2."""

    two_i: int

    def __post_init__(self):
        if not isinstance(self.two_i, int) or self.two_i < 0:
            raise ValueError(f"two_i must be a non-negative integer, got {self.two_i!r}")

    @property
    def dim(self) -> int:
        return self.two_i + 1

    @property
    def i(self) -> float:
        """Spin quantum number I (exact: half-integers are dyadic)."""
        return self.two_i / 2

    def m_values(self) -> np.ndarray:
        """Magnetic quantum numbers in basis order, I down to -I."""
        return (self.two_i - 2 * np.arange(self.dim)) / 2


@dataclass(frozen=True)
class SpinOperators:
    """The standard operator set for one spin, all dim x dim complex."""

    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    j2: np.ndarray
    jplus: np.ndarray
    jminus: np.ndarray


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def _angular_momentum_cached(two_i: int) -> SpinOperators:
    spin = SpinSystem(two_i)
    d = spin.dim
    i = spin.i
    m = spin.m_values()
    jz = np.diag(m).astype(complex)
    jplus = np.zeros((d, d), dtype=complex)
    for col in range(1, d):
        # J+|I,m> = sqrt(I(I+1) - m(m+1)) |I,m+1>; column col holds m = m[col]
        jplus[col - 1, col] = np.sqrt(i * (i + 1) - m[col] * (m[col] + 1))
    jminus = jplus.conj().T
    jx = (jplus + jminus) / 2
    jy = (jplus - jminus) / 2j
    j2 = i * (i + 1) * np.eye(d, dtype=complex)
    return SpinOperators(*(_readonly(a) for a in (jx, jy, jz, j2, jplus, jminus)))


def angular_momentum(spin: SpinSystem) -> SpinOperators:
    """Build Jx, Jy, Jz, J^2 and the ladder operators for ``spin``.

    Jz is diagonal with entries I, I-1, ..., -I; Jx = (J+ + J-)/2;
    Jy = (J+ - J-)/(2i); J^2 = I(I+1) * identity.
    """
    return _angular_momentum_cached(spin.two_i)


def _fact2(n2: int) -> int:
    # factorial of a doubled-integer argument; n2 must be even and >= 0
    if n2 < 0 or n2 % 2:
        raise ValueError(f"invalid doubled factorial argument {n2}")
    return factorial(n2 // 2)


def clebsch_gordan(two_j1: int, two_m1: int, two_j2: int, two_m2: int,
                   two_j3: int, two_m3: int) -> float:
    """<j1 m1; j2 m2 | j3 m3> with Condon-Shortley phases.

    All quantum numbers are doubled integers. The value is computed from the
    closed-form alternating sum with exact rational arithmetic and converted
    to float at the end, so coefficient tables are correct to the last ulp.
    """
    if two_m1 + two_m2 != two_m3:
        return 0.0
    if not abs(two_j1 - two_j2) <= two_j3 <= two_j1 + two_j2:
        return 0.0
    if (two_j1 + two_j2 + two_j3) % 2:
        return 0.0
    if abs(two_m1) > two_j1 or abs(two_m2) > two_j2 or abs(two_m3) > two_j3:
        return 0.0
    pre = Fraction(two_j3 + 1)
    pre *= Fraction(
        _fact2(two_j1 + two_j2 - two_j3)
        * _fact2(two_j1 - two_j2 + two_j3)
        * _fact2(-two_j1 + two_j2 + two_j3),
        _fact2(two_j1 + two_j2 + two_j3 + 2),
    )
    pre *= (
        _fact2(two_j3 + two_m3) * _fact2(two_j3 - two_m3)
        * _fact2(two_j1 + two_m1) * _fact2(two_j1 - two_m1)
        * _fact2(two_j2 + two_m2) * _fact2(two_j2 - two_m2)
    )
    kmin = max(0, (two_j2 - two_j3 - two_m1) // 2, (two_j1 + two_m2 - two_j3) // 2)
    kmax = min(
        (two_j1 + two_j2 - two_j3) // 2,
        (two_j1 - two_m1) // 2,
        (two_j2 + two_m2) // 2,
    )
    total = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (
            factorial(k)
            * _fact2(two_j1 + two_j2 - two_j3 - 2 * k)
            * _fact2(two_j1 - two_m1 - 2 * k)
            * _fact2(two_j2 + two_m2 - 2 * k)
            * _fact2(two_j3 - two_j2 + two_m1 + 2 * k)
            * _fact2(two_j3 - two_j1 - two_m2 + 2 * k)
        )
        total += Fraction(-1 if k % 2 else 1, den)
    if total == 0:
        return 0.0
    sign = 1.0 if total > 0 else -1.0
    return sign * float(total * total * pre) ** 0.5


def spherical_tensor(spin: SpinSystem, k: int, q: int) -> np.ndarray:
    """Irreducible spherical tensor T_KQ, orthonormal convention.

    Matrix elements <I,m'|T_KQ|I,m> = <I m; K Q | I m'> sqrt((2K+1)/(2I+1)),
    which gives Tr(T_KQ^dag T_K'Q') = delta_KK' delta_QQ' and
    T_KQ^dag = (-1)^Q T_K,-Q.
    """
    if not 0 <= k <= spin.two_i:
        raise ValueError(f"rank k={k} outside 0..2I={spin.two_i}")
    if abs(q) > k:
        raise ValueError(f"component q={q} outside -k..k for k={k}")
    return _tensor_stack(spin.two_i)[1][_kq_index(k, q)].copy()


def _kq_index(k: int, q: int) -> int:
    # (K,Q) pairs enumerated K-major, Q from -K to K
    return k * k + (q + k)


@lru_cache(maxsize=None)
def _tensor_stack(two_i: int) -> tuple[tuple[tuple[int, int], ...], np.ndarray]:
    """All (2I+1)^2 tensors as a stacked array, cached per spin."""
    spin = SpinSystem(two_i)
    d = spin.dim
    kq: list[tuple[int, int]] = []
    stack = np.zeros((d * d, d, d), dtype=complex)
    for k in range(two_i + 1):
        scale = ((2 * k + 1) / d) ** 0.5
        for q in range(-k, k + 1):
            t = stack[_kq_index(k, q)]
            for col in range(d):
                two_m = two_i - 2 * col
                two_mp = two_m + 2 * q
                if abs(two_mp) > two_i:
                    continue
                row = (two_i - two_mp) // 2
                t[row, col] = clebsch_gordan(two_i, two_m, 2 * k, 2 * q, two_i, two_mp) * scale
            kq.append((k, q))
    return tuple(kq), _readonly(stack)


def tensor_basis(spin: SpinSystem) -> dict[tuple[int, int], np.ndarray]:
    """The full orthonormal tensor basis as a {(K, Q): matrix} mapping."""
    kq, stack = _tensor_stack(spin.two_i)
    return {key: stack[i] for i, key in enumerate(kq)}


def require_square(a: np.ndarray, name: str = "operator") -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    return a


def is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    """Max-norm Hermiticity check; tol is scaled by max(1, |a|_max)."""
    a = np.asarray(a)
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    return float(np.abs(a - a.conj().T).max(initial=0.0)) < tol * scale


def is_unitary(a: np.ndarray, tol: float = 1e-10) -> bool:
    a = np.asarray(a)
    d = a.shape[0]
    return float(np.abs(a.conj().T @ a - np.eye(d)).max()) < tol


def require_hermitian(a: np.ndarray, name: str = "operator", tol: float = 1e-12) -> np.ndarray:
    a = require_square(a, name)
    if not is_hermitian(a, tol):
        raise ValueError(f"{name} is not Hermitian within tolerance {tol}")
    return a


def expectation(rho: np.ndarray, obs: np.ndarray) -> complex:
    """Tr(rho @ obs); the imaginary part is tiny when both are Hermitian."""
    rho = require_square(rho, "rho")
    obs = require_square(obs, "obs")
    if rho.shape != obs.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {obs.shape}")
    # Tr(rho obs) = sum_ab rho_ab obs_ba
    return complex(np.einsum("ab,ba->", rho, obs))
