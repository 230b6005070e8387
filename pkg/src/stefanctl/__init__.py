"""Sampled-data boundary feedback control of one- and two-phase melting
fronts: front-fixed finite-difference solvers, the energy-shaping hold
controller, trajectory diagnostics, and a config-driven CLI."""

from .core import (
    DomainSpec,
    InitialData,
    MaterialParams,
    Profile,
    Schedule,
    TwoPhaseInitialData,
    TwoPhaseParams,
    derive_beta,
    derive_diffusivity,
    make_schedule,
    validate_gain_vs_schedule,
    validate_initial_data,
)
from .control import (
    ControllerConfig,
    ControllerState,
    decay_rate_bound,
    internal_energy,
    nominal_control,
    open_loop_sequence,
    validate_setpoint,
    zoh_sample,
)
from .kernels import backend_name

__version__ = "0.1.0"

__all__ = [
    "ControllerConfig",
    "ControllerState",
    "DomainSpec",
    "InitialData",
    "MaterialParams",
    "Profile",
    "Schedule",
    "TwoPhaseInitialData",
    "TwoPhaseParams",
    "backend_name",
    "decay_rate_bound",
    "derive_beta",
    "derive_diffusivity",
    "internal_energy",
    "make_schedule",
    "nominal_control",
    "open_loop_sequence",
    "validate_gain_vs_schedule",
    "validate_initial_data",
    "validate_setpoint",
    "zoh_sample",
]
