"""Sweep configuration, counting emulation and sweep evaluation."""

from .config import SweepConfig
from .sampling import (
    detector_pairs,
    normalize_counts,
    number_resolving_correction,
    outcome_efficiencies,
    sample_counts,
)
from .sweep import SweepResult, SweepRunner, analyze_sweep, run_sweep

__all__ = [
    "SweepConfig",
    "SweepResult",
    "SweepRunner",
    "analyze_sweep",
    "detector_pairs",
    "normalize_counts",
    "number_resolving_correction",
    "outcome_efficiencies",
    "run_sweep",
    "sample_counts",
]
