import numpy as np
import pytest

from spinsqueeze import (
    NmrParams,
    Propagator,
    SpinSystem,
    angular_momentum,
    coherent_state,
    default_time_grid,
    evolve,
    ideal_pulse_operator,
    nmr_hamiltonian,
    oat_hamiltonian,
    oat_trajectory,
    propagator,
    rf_pulse_operator,
)

from oracles import expm_taylor

NU_Q = 7580.0
OMEGA_Q = 2 * np.pi * NU_Q


def test_zero_params_zero_hamiltonian(spin72):
    h = nmr_hamiltonian(spin72, NmrParams(omega_q=0.0))
    assert np.abs(h).max() == 0.0


def test_free_hamiltonian_diagonal(spin72):
    h = nmr_hamiltonian(spin72, NmrParams(omega_q=OMEGA_Q))
    m = spin72.m_values()
    expected = (OMEGA_Q / 6) * (3 * m**2 - spin72.i * (spin72.i + 1))
    assert np.abs(h - np.diag(expected)).max() < 1e-9
    assert abs(np.trace(h)) < 1e-9 * OMEGA_Q


def test_oat_hamiltonian(spin72):
    assert np.abs(oat_hamiltonian(spin72, 0.0)).max() == 0.0
    h = oat_hamiltonian(spin72, OMEGA_Q)
    m = spin72.m_values()
    assert np.abs(h - np.diag((OMEGA_Q / 2) * m**2)).max() < 1e-9


def test_detuning_term(spin72, ops72):
    detuned = nmr_hamiltonian(spin72, NmrParams(omega_q=OMEGA_Q, detuning=500.0))
    free = nmr_hamiltonian(spin72, NmrParams(omega_q=OMEGA_Q))
    assert np.abs(detuned - (free - 500.0 * ops72.jz)).max() < 1e-9


def test_oat_differs_by_constant(spin72):
    free = nmr_hamiltonian(spin72, NmrParams(omega_q=OMEGA_Q))
    oat = oat_hamiltonian(spin72, OMEGA_Q)
    shift = (OMEGA_Q / 6) * spin72.i * (spin72.i + 1)
    assert np.abs(oat - free - shift * np.eye(8)).max() < 1e-9


def test_propagator_zero_time(spin72):
    u = propagator(oat_hamiltonian(spin72, OMEGA_Q), 0.0)
    assert np.abs(u.unitary - np.eye(8)).max() == 0.0


def test_oat_revival_is_global_phase(spin72):
    # direct oracle: exp(-i pi m^2) is the same phase for every half-integer m
    phases = np.exp(-1j * np.pi * spin72.m_values() ** 2)
    assert np.abs(phases - np.exp(-1j * np.pi / 4)).max() < 1e-12
    u = propagator(oat_hamiltonian(spin72, OMEGA_Q), 1.0 / NU_Q)
    assert np.abs(u.unitary - np.exp(-1j * np.pi / 4) * np.eye(8)).max() < 1e-10


def test_propagator_eigenvalues_on_unit_circle(spin72, rng):
    h = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    h = h + h.conj().T
    u = propagator(h, 0.37)
    assert np.abs(np.abs(np.linalg.eigvals(u.unitary)) - 1.0).max() < 1e-12


def test_propagator_rejects_non_hermitian(ops72):
    with pytest.raises(ValueError):
        propagator(ops72.jplus.copy(), 1.0)


def test_propagator_unitarity_validated():
    with pytest.raises(ValueError):
        Propagator(np.diag([1.0, 2.0]).astype(complex), 0.0)


def test_segment_splitting(spin72, rng):
    h = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    h = (h + h.conj().T) / 2
    u_full = propagator(h, 0.9).unitary
    u_split = propagator(h, 0.5).unitary @ propagator(h, 0.4).unitary
    assert np.abs(u_full - u_split).max() < 1e-10


@pytest.mark.parametrize("scale", [0.1, 1.0, 10.0])
def test_matrix_exponential_against_taylor_oracle(rng, scale):
    h = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    h = (h + h.conj().T) / 2
    h = h / np.abs(np.linalg.eigvalsh(h)).max()  # ||H|| = 1
    t = scale
    u = propagator(h, t).unitary
    ref = expm_taylor(-1j * h * t)
    assert np.abs(u - ref).max() < 1e-9


def test_evolve_preserves_mixed_state(spin72, ops72):
    u = propagator(oat_hamiltonian(spin72, OMEGA_Q), 3e-6)
    rho = np.eye(8) / 8
    assert np.abs(evolve(rho, u) - rho).max() < 1e-14


def test_evolve_preserves_trace_and_spectrum(spin72, rng):
    h = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    h = (h + h.conj().T) / 2
    rho = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    rho = (rho + rho.conj().T) / 2
    u = propagator(h, 1.7)
    out = evolve(rho, u)
    assert abs(np.trace(out) - np.trace(rho)) < 1e-12 * max(1, abs(np.trace(rho)))
    assert np.abs(np.linalg.eigvalsh(out) - np.linalg.eigvalsh(rho)).max() < 1e-10


def test_evolve_revival(spin72):
    zeta = coherent_state(spin72, np.pi / 2, np.pi)
    rho = np.outer(zeta, zeta.conj())
    u = propagator(oat_hamiltonian(spin72, OMEGA_Q), 1.0 / NU_Q)
    assert np.abs(evolve(rho, u) - rho).max() < 1e-8


def test_evolve_dimension_mismatch(spin72):
    u = propagator(oat_hamiltonian(spin72, OMEGA_Q), 1e-6)
    with pytest.raises(ValueError):
        evolve(np.eye(4) / 4, u)


def test_pulse_operators_agree_without_quadrupole(spin72):
    w1 = 2 * np.pi * 19e3
    u = rf_pulse_operator(spin72, w1, 0.0, 0.0, 2.2e-6)
    v = ideal_pulse_operator(spin72, w1, 0.0, 2.2e-6)
    assert np.abs(u.unitary - v.unitary).max() < 1e-12


def test_pulse_operators_at_zero_time(spin72):
    u = rf_pulse_operator(spin72, 1e5, OMEGA_Q, 0.3, 0.0)
    v = ideal_pulse_operator(spin72, 1e5, 0.3, 0.0)
    assert np.abs(u.unitary - np.eye(8)).max() < 1e-14
    assert np.abs(v.unitary - np.eye(8)).max() < 1e-14


@pytest.mark.parametrize("phi", [0.0, 1.1, np.pi])
def test_pulse_operators_unitary(spin72, phi):
    u = rf_pulse_operator(spin72, 2 * np.pi * 19e3, OMEGA_Q, phi, 5e-6)
    assert np.abs(u.unitary.conj().T @ u.unitary - np.eye(8)).max() < 1e-10


def test_default_time_grid():
    grid = default_time_grid(NU_Q)
    assert len(grid) == 45
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(1.0 / NU_Q, rel=1e-15)
    steps = np.diff(grid)
    assert np.allclose(steps, steps[0])
    assert steps[0] == pytest.approx(3e-6, rel=2e-3)  # nominal 3 us


def test_trajectory_single_time(spin72):
    zeta = coherent_state(spin72, np.pi / 2, np.pi)
    rho = np.outer(zeta, zeta.conj())
    out = oat_trajectory(rho, OMEGA_Q, [0.0])
    assert len(out) == 1
    assert np.abs(out[0] - rho).max() == 0.0


def test_trajectory_default_grid_length_and_revival(spin72):
    zeta = coherent_state(spin72, np.pi / 2, np.pi)
    rho = np.outer(zeta, zeta.conj())
    states = oat_trajectory(rho, OMEGA_Q, default_time_grid(NU_Q))
    assert len(states) == 45
    assert np.abs(states[-1] - states[0]).max() < 1e-8


def test_trajectory_matches_propagator_path(spin72):
    zeta = coherent_state(spin72, np.pi / 2, np.pi)
    rho = np.outer(zeta, zeta.conj())
    t = 17e-6
    fast = oat_trajectory(rho, OMEGA_Q, [t])[0]
    slow = evolve(rho, propagator(oat_hamiltonian(spin72, OMEGA_Q), t))
    assert np.abs(fast - slow).max() < 1e-12


def test_trajectory_periodicity_of_observables(spin72, ops72):
    # scalar observables repeat after one period 2 pi / omega_q
    zeta = coherent_state(spin72, np.pi / 2, np.pi)
    rho = np.outer(zeta, zeta.conj())
    period = 2 * np.pi / OMEGA_Q
    taus = np.array([5e-6, 41e-6, 90e-6])
    a = oat_trajectory(rho, OMEGA_Q, taus)
    b = oat_trajectory(rho, OMEGA_Q, taus + period)
    for x, y in zip(a, b):
        for obs in (ops72.jx, ops72.jy @ ops72.jy, ops72.jz @ ops72.jy):
            va = np.trace(x @ obs)
            vb = np.trace(y @ obs)
            assert abs(va - vb) < 1e-8


def test_trajectory_rejects_decreasing_times(spin72):
    rho = np.eye(8) / 8
    with pytest.raises(ValueError):
        oat_trajectory(rho, OMEGA_Q, [1e-6, 0.5e-6])
