"""Spin-squeezing simulator for a single quadrupolar NMR nucleus.

Builds angular-momentum algebra for arbitrary spin, prepares thermal and
spin coherent (pseudo-pure) states, evolves them under the one-axis-twisting
quadrupolar Hamiltonian, quantifies squeezing (xi, alpha), renders Wigner
quasi-probability maps on the sphere, designs the state-preparation pulse
programs by simplex search, and computes the instrument error budget.
"""

from .calibration import (
    DEFAULT_DELAYS,
    DelayEvent,
    DelayKind,
    TempModel,
    add_hermitian_noise,
    batch_fidelity,
    hidden_delay_budget,
    nu_q_at,
    nu_q_uncertainty,
    pulse_error_report,
)
from .config import ConfigError, ExperimentConfig, load_config
from .dynamics import (
    NmrParams,
    Propagator,
    default_time_grid,
    evolve,
    ideal_pulse_operator,
    nmr_hamiltonian,
    oat_hamiltonian,
    oat_trajectory,
    propagator,
    rf_pulse_operator,
)
from .metrics import (
    InconsistentMomentsError,
    SqueezingReport,
    alpha,
    fidelity,
    report_trajectory,
    squeezing_abc,
    xi,
)
from .operators import (
    SpinOperators,
    SpinSystem,
    angular_momentum,
    clebsch_gordan,
    expectation,
    spherical_tensor,
    tensor_basis,
)
from .smp import (
    EnvelopeSpec,
    PulseProgram,
    PulseSegment,
    SmpConfig,
    SmpResult,
    apply_envelope,
    nelder_mead,
    optimize_smp,
    programs_from_payload,
    smp_objective,
    smp_propagator,
)
from .states import (
    HBAR,
    K_B,
    ThermalParams,
    coherent_state,
    polarization,
    pseudo_pure,
    thermal_deviation,
)
from .wigner import (
    MultipoleCoeffs,
    WignerGrid,
    multipoles,
    reconstruct,
    sphere_integral,
    spherical_harmonic,
    wigner_map,
)

__version__ = "0.1.0"
