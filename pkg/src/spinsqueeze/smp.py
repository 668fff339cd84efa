"""Segmented pulse design: Gaussian-ramped pulse trains, an averaged-state
objective, and Nelder-Mead simplex search over the pulse parameters.

A pulse program is N back-to-back RF segments of equal duration, each with
its own amplitude and phase, with Gaussian ramps at both ends so the drive
rises from exactly zero and returns to it without abrupt changes. The state
objective builds eta independent programs (2 * eta * N free parameters),
applies each to the thermal deviation matrix Jz, averages the eta results,
and scores the average against a target by normalized overlap.

The optimizer maximizes that overlap against the traceless part of the
target: unitary conjugates of Jz and their averages are traceless, so the
trace component of a pure-state target is unreachable and enters the
prepared pseudo-pure state through the identity term instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .dynamics import NmrParams, Propagator, nmr_hamiltonian, propagator
from .metrics import fidelity
from .operators import SpinSystem, angular_momentum, require_square
from .states import thermal_deviation

__all__ = [
    "EnvelopeSpec",
    "PulseSegment",
    "PulseProgram",
    "apply_envelope",
    "smp_propagator",
    "SmpConfig",
    "SmpResult",
    "smp_objective",
    "NelderMeadResult",
    "nelder_mead",
    "optimize_smp",
    "programs_from_payload",
]


@dataclass(frozen=True)
class EnvelopeSpec:
    """Gaussian amplitude ramps at both ends of a pulse program.

    Each ramp occupies ramp_fraction of the total duration and follows a
    baseline-subtracted Gaussian with sigma = sigma_fraction * ramp length,
    so the envelope is exactly 0 at t = 0 and t = t_total and 1 on the
    plateau between the ramps.
    """

    ramp_fraction: float = 0.1
    sigma_fraction: float = 0.33

    def __post_init__(self):
        if not 0.0 < self.ramp_fraction <= 0.5:
            raise ValueError("ramp_fraction must lie in (0, 0.5]")
        if self.sigma_fraction <= 0.0:
            raise ValueError("sigma_fraction must be positive")

    def value(self, t, total: float):
        """Envelope sampled at time(s) t within a program of length total."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        ramp = self.ramp_fraction * total
        base = np.exp(-0.5 / self.sigma_fraction**2)

        def rise(u):  # u in [0, 1] across the ramp
            g = np.exp(-0.5 * ((1.0 - u) / self.sigma_fraction) ** 2)
            return (g - base) / (1.0 - base)

        out = np.ones_like(t)
        lo = t < ramp
        hi = t > total - ramp
        out[lo] = rise(t[lo] / ramp)
        out[hi] = rise((total - t[hi]) / ramp)
        return float(out[0]) if scalar else out


@dataclass(frozen=True)
class PulseSegment:
    """One RF segment: amplitude omega_1 in rad/s, phase in rad, duration in s."""

    amplitude: float
    phase: float
    duration: float

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")
        if self.duration <= 0:
            raise ValueError("duration must be positive")


@dataclass(frozen=True)
class PulseProgram:
    """An ordered segment train. eta records how many such trains are averaged
    in the experiment this program belongs to; envelope, when present, is
    applied to the amplitudes before simulation (see apply_envelope)."""

    segments: tuple[PulseSegment, ...]
    eta: int = 1
    envelope: EnvelopeSpec | None = None

    def __post_init__(self):
        if not self.segments:
            raise ValueError("program needs at least one segment")
        if self.eta < 1:
            raise ValueError("eta must be >= 1")

    @property
    def total_duration(self) -> float:
        return sum(s.duration for s in self.segments)


def apply_envelope(program: PulseProgram) -> PulseProgram:
    """Scale segment amplitudes by the envelope at the segment midpoints.

    Returns a program with envelope = None so it cannot be applied twice.
    """
    if program.envelope is None:
        return program
    total = program.total_duration
    ends = np.cumsum([s.duration for s in program.segments])
    mids = ends - 0.5 * np.array([s.duration for s in program.segments])
    scales = program.envelope.value(mids, total)
    segs = tuple(
        replace(s, amplitude=s.amplitude * g) for s, g in zip(program.segments, scales)
    )
    return PulseProgram(segs, eta=program.eta, envelope=None)


def smp_propagator(program: PulseProgram, omega_q: float, spin: SpinSystem) -> Propagator:
    """Ordered product of per-segment propagators, earliest segment first.

    Each segment evolves under the resonant rotating-frame Hamiltonian with
    the segment's amplitude and phase plus the quadrupolar term.
    """
    program = apply_envelope(program)
    u = np.eye(spin.dim, dtype=complex)
    for seg in program.segments:
        params = NmrParams(omega_q=omega_q, omega_1=seg.amplitude, phase=seg.phase)
        u = propagator(nmr_hamiltonian(spin, params), seg.duration).unitary @ u
    return Propagator(u, program.total_duration)


@dataclass(frozen=True)
class SmpConfig:
    """Pulse-design problem definition plus optimizer budgets.

    segments (N) and eta define 2 * eta * N parameters; t_smp defaults to
    two quadrupolar periods. Budgets are iteration counts so runs are
    reproducible; stop_fidelity ends polishing early once reached.
    """

    spin: SpinSystem
    omega_q: float
    segments: int = 16
    eta: int = 2
    t_smp: float | None = None
    restarts: int = 8
    seed: int = 20240803
    envelope: EnvelopeSpec = field(default_factory=EnvelopeSpec)
    target_fidelity: float = 0.99
    stop_fidelity: float = 0.995
    probe_iters: int = 1200
    polish_iters: int = 1600
    polish_rounds: int = 30
    amp_scale: float = 2.0 * np.pi * 10e3

    def __post_init__(self):
        if self.segments < 1:
            raise ValueError("segments must be >= 1")
        if self.eta < 1:
            raise ValueError("eta must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")

    @property
    def duration(self) -> float:
        if self.t_smp is not None:
            return self.t_smp
        if self.omega_q == 0.0:
            raise ValueError("t_smp must be given explicitly when omega_q = 0")
        return 2.0 * 2.0 * np.pi / abs(self.omega_q)  # 2 / nu_q

    @property
    def n_params(self) -> int:
        return 2 * self.eta * self.segments


def _segment_envelope(config: SmpConfig) -> np.ndarray:
    n = config.segments
    dt = config.duration / n
    mids = (np.arange(n) + 0.5) * dt
    return config.envelope.value(mids, config.duration)


def _averaged_deviation(params: np.ndarray, config: SmpConfig) -> np.ndarray:
    """Average of the eta transformed deviation matrices for one parameter set.

    Parameter layout is variant-major: params[2*(v*N + s)] is the
    log-amplitude of segment s in variant v and the next entry its phase.
    Physical amplitudes are exp(log_amp) * envelope(midpoint).
    """
    spin = config.spin
    ops = angular_momentum(spin)
    d = spin.dim
    n = config.segments
    dt = config.duration / n
    log_amp = np.minimum(params[0::2], 60.0)  # overflow guard for wild simplex steps
    phase = params[1::2]
    amps = np.exp(log_amp) * np.tile(_segment_envelope(config), config.eta)
    quad = (config.omega_q / 6.0) * (3.0 * (ops.jz @ ops.jz) - ops.j2)
    h = quad[None] + amps[:, None, None] * (
        np.cos(phase)[:, None, None] * ops.jx + np.sin(phase)[:, None, None] * ops.jy
    )
    w, v = np.linalg.eigh(h)
    u = (v * np.exp(-1j * w * dt)[:, None, :]) @ v.conj().transpose(0, 2, 1)
    # product over segments by pairwise halving: result = U_{N-1} ... U_0
    m = u.reshape(config.eta, n, d, d)
    while m.shape[1] > 1:
        if m.shape[1] % 2:
            head, m = m[:, :1], m[:, 1:]
            m = np.concatenate([head, m[:, 1::2] @ m[:, 0::2]], axis=1)
        else:
            m = m[:, 1::2] @ m[:, 0::2]
    trains = m[:, 0]
    rho0 = thermal_deviation(spin)
    transformed = trains @ rho0[None] @ trains.conj().transpose(0, 2, 1)
    return transformed.mean(axis=0)


def smp_objective(params: Sequence[float], target: np.ndarray, config: SmpConfig) -> float:
    """Fidelity of the eta-averaged transformed Jz against ``target``."""
    params = np.asarray(params, dtype=float)
    if params.shape != (config.n_params,):
        raise ValueError(
            f"expected {config.n_params} parameters (2 * eta * N), got {params.shape}"
        )
    target = require_square(target, "target")
    return fidelity(_averaged_deviation(params, config), target)


@dataclass(frozen=True)
class NelderMeadResult:
    best_x: np.ndarray
    best_value: float
    iterations: int


def nelder_mead(objective: Callable[[np.ndarray], float], x0: Sequence[float],
                initial_step: Sequence[float] | float = 0.1, max_iter: int = 2000,
                xtol: float = 1e-10, ftol: float = 1e-12) -> NelderMeadResult:
    """Minimize with the simplex method (reflection 1, expansion 2,
    contraction 1/2, shrink 1/2). Deterministic given x0 and options.

    initial_step sets the offset of each initial simplex vertex, per
    coordinate when a sequence is given. Maximization is done by negating
    the objective at the call site. Stops on max_iter or when both the
    simplex spread (xtol, max-norm) and value spread (ftol) collapse.
    """
    x0 = np.asarray(x0, dtype=float)
    if not np.all(np.isfinite(x0)):
        raise ValueError("x0 must be finite")
    n = x0.size
    step = np.broadcast_to(np.asarray(initial_step, dtype=float), (n,))

    def evaluate(x: np.ndarray) -> float:
        val = float(objective(x))
        if not np.isfinite(val):
            raise RuntimeError(f"objective returned non-finite value {val} at x = {x!r}")
        return val

    points = [x0]
    for i in range(n):
        x = x0.copy()
        x[i] += step[i]
        points.append(x)
    values = [evaluate(p) for p in points]

    def sort():
        order = np.argsort(values, kind="stable")
        return [points[i] for i in order], [values[i] for i in order]

    points, values = sort()
    iterations = 0
    while iterations < max_iter:
        iterations += 1
        spread_x = max(float(np.abs(p - points[0]).max()) for p in points[1:])
        if abs(values[-1] - values[0]) < ftol and spread_x < xtol:
            break
        centroid = np.mean(points[:-1], axis=0)
        reflected = centroid + (centroid - points[-1])
        f_r = evaluate(reflected)
        if f_r < values[0]:
            expanded = centroid + 2.0 * (centroid - points[-1])
            f_e = evaluate(expanded)
            if f_e < f_r:
                points[-1], values[-1] = expanded, f_e
            else:
                points[-1], values[-1] = reflected, f_r
        elif f_r < values[-2]:
            points[-1], values[-1] = reflected, f_r
        else:
            contracted = centroid + 0.5 * (points[-1] - centroid)
            f_c = evaluate(contracted)
            if f_c < values[-1]:
                points[-1], values[-1] = contracted, f_c
            else:
                best = points[0]
                for i in range(1, n + 1):
                    points[i] = best + 0.5 * (points[i] - best)
                    values[i] = evaluate(points[i])
        points, values = sort()
    return NelderMeadResult(points[0], values[0], iterations)


@dataclass(frozen=True)
class SmpResult:
    """Outcome of a pulse-design run. fidelity is measured against the
    traceless deviation part of the requested target; below_target flags a
    best result under config.target_fidelity (reported, never fatal)."""

    programs: tuple[PulseProgram, ...]
    fidelity: float
    iterations: int
    seed: int
    below_target: bool


def _programs_from_params(params: np.ndarray, config: SmpConfig) -> tuple[PulseProgram, ...]:
    n = config.segments
    dt = config.duration / n
    progs = []
    for v in range(config.eta):
        segs = []
        for s in range(n):
            base = 2 * (v * n + s)
            segs.append(
                PulseSegment(
                    amplitude=float(np.exp(params[base])),
                    phase=float(np.mod(params[base + 1], 2.0 * np.pi)),
                    duration=dt,
                )
            )
        progs.append(PulseProgram(tuple(segs), eta=config.eta, envelope=config.envelope))
    return tuple(progs)


def programs_from_payload(payload: dict) -> tuple[PulseProgram, ...]:
    """Rebuild pulse programs from the CLI's pulse_program.json payload."""
    envelope = EnvelopeSpec(**payload["envelope"])
    eta = int(payload["eta"])
    programs = []
    for variant in payload["variants"]:
        segments = tuple(
            PulseSegment(seg["amplitude_rad_s"], seg["phase_rad"], seg["duration_s"])
            for seg in variant
        )
        programs.append(PulseProgram(segments, eta=eta, envelope=envelope))
    return tuple(programs)


def optimize_smp(target: np.ndarray, config: SmpConfig) -> SmpResult:
    """Design eta pulse programs that steer Jz toward ``target``.

    The target's traceless deviation part is the actual optimization goal
    (see module docstring). Each restart runs a short Nelder-Mead probe from
    a seeded random start; the best probe is then refined by repeated
    simplex re-initializations with shrinking steps, a standard remedy for
    simplex stagnation in high dimension. Fully deterministic for a given
    seed: all budgets are iteration counts.
    """
    target = require_square(target, "target")
    d = config.spin.dim
    if target.shape[0] != d:
        raise ValueError(f"target dimension {target.shape[0]} != {d}")
    target_dev = target - (np.trace(target) / d) * np.eye(d)
    if not target_dev.any():
        raise ValueError("target has no traceless part to optimize toward")

    def negated(params: np.ndarray) -> float:
        return -fidelity(_averaged_deviation(params, config), target_dev)

    rng = np.random.Generator(np.random.PCG64(config.seed))
    n_par = config.n_params
    probe_step = np.empty(n_par)
    probe_step[0::2] = 0.6
    probe_step[1::2] = 0.7

    best_x, best_f, total_iters = None, np.inf, 0
    for _ in range(config.restarts):
        x0 = np.empty(n_par)
        x0[0::2] = np.log(config.amp_scale) + rng.uniform(-2.0, 1.0, n_par // 2)
        x0[1::2] = rng.uniform(0.0, 2.0 * np.pi, n_par // 2)
        res = nelder_mead(negated, x0, probe_step, max_iter=config.probe_iters)
        total_iters += res.iterations
        if res.best_value < best_f:
            best_x, best_f = res.best_x, res.best_value

    step = np.empty(n_par)
    step[0::2] = 0.35
    step[1::2] = 0.4
    for _ in range(config.polish_rounds):
        if -best_f >= config.stop_fidelity:
            break
        res = nelder_mead(negated, best_x, step, max_iter=config.polish_iters)
        total_iters += res.iterations
        if res.best_value < best_f:
            best_x, best_f = res.best_x, res.best_value
        step = step * 0.7
        if step[0] < 0.02:
            step[0::2] = 0.25
            step[1::2] = 0.3

    achieved = -best_f
    return SmpResult(
        programs=_programs_from_params(best_x, config),
        fidelity=achieved,
        iterations=total_iters,
        seed=config.seed,
        below_target=achieved < config.target_fidelity,
    )
