"""Gauge-invariant dissipative cavity-QED in the ultrastrong-coupling regime.

Units: omega0 = 1. ``ModelParams.from_g_units`` takes rates and drive
amplitudes in units of g = eta * omega0; spectra are sampled on
(omega - omega_L) / g and delays on tau * g.
"""

from ._core import (
    BathKind,
    DegenerateSteadyState,
    DimensionMismatch,
    Gauge,
    GaugeChoice,
    InvalidArgument,
    InvariantViolation,
    ModelParams,
    OutOfValidity,
    PseudoSteadyStateNotReached,
    PumpKind,
    PumpSpec,
    Simulation,
    UscQedError,
    bs_peak_area_ratio,
    bs_spectrum,
    eigenvalues,
    steady_n_cav,
    transition_strengths,
)

__all__ = [
    "BathKind",
    "DegenerateSteadyState",
    "DimensionMismatch",
    "Gauge",
    "GaugeChoice",
    "InvalidArgument",
    "InvariantViolation",
    "ModelParams",
    "OutOfValidity",
    "PseudoSteadyStateNotReached",
    "PumpKind",
    "PumpSpec",
    "Simulation",
    "UscQedError",
    "bs_peak_area_ratio",
    "bs_spectrum",
    "eigenvalues",
    "steady_n_cav",
    "transition_strengths",
]
