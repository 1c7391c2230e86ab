"""Utility modules."""

from .angles import TWO_PI, phase_distance, safe_angle, wrap_phase, wrap_signed
from .decorators import measure_time
from .serialization import config_hash, dumps, write_csv, write_json

__all__ = [
    "TWO_PI",
    "config_hash",
    "dumps",
    "measure_time",
    "phase_distance",
    "safe_angle",
    "wrap_phase",
    "wrap_signed",
    "write_csv",
    "write_json",
]
