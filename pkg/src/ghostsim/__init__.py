"""Scalar ("ghost") mode entanglement of superposed static charges in the Lorenz gauge."""

from .core import ChargeConfiguration, PhysicsContext, Position3, WaveVector, coupling_g, eta_eigenvalue, mode_mean_photons
from .exceptions import (
    ConfigurationError,
    DomainError,
    GhostSimError,
    TruncationError,
    UndefinedConditionalError,
)
from .integrals import (
    CutoffPair,
    RadialModeGrid,
    SeparationGeometry,
    angular_reduced_integrand,
    charge_decoherence_scaling,
    mass_decoherence_scaling,
    per_mode_distance2,
    total_photon_number,
    visibility,
)
from .tomography import (
    Config,
    TomographyScenario,
    build_state_and_reduce,
    coulomb_phase,
    expect_C_RL,
    field_gram,
    probe_entanglement_entropy,
    probe_visibility,
)

__version__ = "0.1.0"
