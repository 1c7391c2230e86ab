"""Heater calibration and phase-to-current translation."""

from .calibration import (
    CalibrationStore,
    FringeFit,
    HeaterCalibration,
    IvFit,
    current_table,
    fit_fringe,
    fit_iv,
    phase_at_power,
    phase_to_power,
    power_to_current,
)

__all__ = [
    "CalibrationStore",
    "FringeFit",
    "HeaterCalibration",
    "IvFit",
    "current_table",
    "fit_fringe",
    "fit_iv",
    "phase_at_power",
    "phase_to_power",
    "power_to_current",
]
