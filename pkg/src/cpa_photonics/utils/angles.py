"""Phase wrapping helpers."""

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def wrap_phase(phase: float) -> float:
    """Reduce a phase to [0, 2pi)."""
    wrapped = math.fmod(phase, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    if wrapped >= TWO_PI:
        wrapped = 0.0
    return wrapped


def wrap_signed(phase: float) -> float:
    """Reduce a phase to (-pi, pi]."""
    wrapped = wrap_phase(phase)
    if wrapped > math.pi:
        wrapped -= TWO_PI
    return wrapped


def phase_distance(a: float, b: float) -> float:
    """Circular distance between two phases."""
    return abs(wrap_signed(a - b))


def safe_angle(z: complex) -> float:
    """Argument of z with arg(0) = 0."""
    if z == 0:
        return 0.0
    return float(np.angle(z))
