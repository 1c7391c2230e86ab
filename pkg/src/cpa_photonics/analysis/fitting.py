"""Fringe and HOM-dip fitting."""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from ..exceptions import DegenerateFitError, InvalidInputError
from ..utils.angles import TWO_PI, wrap_phase, wrap_signed
from .metrology import PhaseCurve, fisher_per_outcome

logger = logging.getLogger(__name__)

SPAN_TOL = 1e-9


@dataclass(frozen=True)
class SinusoidFit:
    """Model ``amplitude * cos(k phi + phase) + offset`` with amplitude >= 0."""

    amplitude: float
    k: int
    phase: float
    offset: float
    residual_rms: float

    @property
    def fringe_shift(self) -> float:
        """Phase offset in units of phi."""
        return self.phase / self.k

    def evaluate(self, phis) -> np.ndarray:
        return (
            self.amplitude * np.cos(self.k * np.asarray(phis) + self.phase)
            + self.offset
        )

    def derivative(self, phis) -> np.ndarray:
        return -self.amplitude * self.k * np.sin(self.k * np.asarray(phis) + self.phase)

    def curvature(self, phis) -> np.ndarray:
        angle = self.k * np.asarray(phis) + self.phase
        return -self.amplitude * self.k**2 * np.cos(angle)

    def to_curve(self, phis, label: str = "") -> PhaseCurve:
        """Model probabilities (clipped at zero) with exact derivatives."""
        phis = np.asarray(phis, dtype=float)
        return PhaseCurve(
            phis,
            np.clip(self.evaluate(phis), 0.0, None),
            label=label,
            derivatives=self.derivative(phis),
            curvatures=self.curvature(phis),
        )


def fit_sinusoid(curve: PhaseCurve, k: int) -> SinusoidFit:
    """Linear least-squares fit of a fixed-frequency sinusoid.

    Args:
        curve: Data over phase
        k: Angular frequency (1 for single photons, 2 for NOON states)

    Returns:
        SinusoidFit with phase in [0, 2pi)

    Raises:
        InvalidInputError: If there are fewer than 4 points or less than one period
    """
    if k < 1:
        raise InvalidInputError(f"fringe order must be >= 1, got {k}")
    phis, values = curve.phis, curve.values
    if phis.size < 4:
        raise InvalidInputError(
            f"need at least 4 points to fit a sinusoid, got {phis.size}"
        )
    period = TWO_PI / k
    span = phis[-1] - phis[0]
    if span < period * (1.0 - SPAN_TOL):
        raise InvalidInputError(
            f"phase span {span:.6g} shorter than one period {period:.6g}"
        )

    design = np.column_stack([np.cos(k * phis), np.sin(k * phis), np.ones_like(phis)])
    (p, q, d), *_ = np.linalg.lstsq(design, values, rcond=None)
    amplitude = math.hypot(p, q)
    phase = wrap_phase(math.atan2(-q, p)) if amplitude > 1e-15 else 0.0
    residual = values - design @ np.array([p, q, d])
    return SinusoidFit(
        amplitude=amplitude,
        k=k,
        phase=phase,
        offset=float(d),
        residual_rms=float(np.sqrt(np.mean(residual**2))),
    )


def visibility_and_phase(
    s1_fit: SinusoidFit, s2_fit: SinusoidFit, literal: bool = False
) -> Tuple[float, float, float]:
    """Fringe visibilities of two ports and their relative phase.

    Visibility is ``a / d``; ``literal=True`` uses ``(a - d) / d`` instead.

    Returns:
        (visibility_s1, visibility_s2, relative_phase in (-pi, pi])

    Raises:
        DegenerateFitError: If either offset is not positive
    """
    for name, fit in (("S1", s1_fit), ("S2", s2_fit)):
        if fit.offset <= 0:
            raise DegenerateFitError(
                f"{name} fit offset {fit.offset:.3e} is not positive"
            )

    def vis(fit: SinusoidFit) -> float:
        if literal:
            return (fit.amplitude - fit.offset) / fit.offset
        return fit.amplitude / fit.offset

    return vis(s1_fit), vis(s2_fit), wrap_signed(s2_fit.phase - s1_fit.phase)


@dataclass(frozen=True)
class TriangularFit:
    """Model ``a - b |x - x0|`` with b >= 0."""

    a: float
    b: float
    x0: float
    residual_rms: float

    def evaluate(self, xs) -> np.ndarray:
        return self.a - self.b * np.abs(np.asarray(xs, dtype=float) - self.x0)


def _triangle_lstsq(
    xs: np.ndarray, ys: np.ndarray, x0: float
) -> Tuple[float, float, float]:
    design = np.column_stack([np.ones_like(xs), -np.abs(xs - x0)])
    (a, b), *_ = np.linalg.lstsq(design, ys, rcond=None)
    if b < 0:
        a, b = float(np.mean(ys)), 0.0
    sse = float(np.sum((ys - (a - b * np.abs(xs - x0))) ** 2))
    return float(a), float(b), sse


def fit_triangular(xs: Sequence[float], ys: Sequence[float]) -> TriangularFit:
    """Least-squares triangular fit.

    (a, b) are solved in closed form for each candidate centre; the centre is
    located by scanning the sample positions and refining with a bounded
    scalar search between the neighbors of the best sample.

    Raises:
        InvalidInputError: If fewer than 5 points are given
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise InvalidInputError("xs and ys must be 1-D and the same length")
    if xs.size < 5:
        raise InvalidInputError(
            f"need at least 5 points for a triangular fit, got {xs.size}"
        )

    grid = np.unique(xs)
    scores = [_triangle_lstsq(xs, ys, x0)[2] for x0 in grid]
    best = int(np.argmin(scores))
    best_x0, best_sse = float(grid[best]), scores[best]

    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, grid.size - 1)]
    if hi > lo:
        res = minimize_scalar(
            lambda x0: _triangle_lstsq(xs, ys, x0)[2],
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        if res.fun < best_sse:
            best_x0, best_sse = float(res.x), float(res.fun)

    a, b, sse = _triangle_lstsq(xs, ys, best_x0)
    logger.debug(f"Triangular fit a={a:.6g} b={b:.6g} x0={best_x0:.6g}")
    return TriangularFit(a=a, b=b, x0=best_x0, residual_rms=math.sqrt(sse / xs.size))


def fisher_from_fit(fit: SinusoidFit, phis) -> PhaseCurve:
    """Fisher information of a fitted fringe model on a grid."""
    return fisher_per_outcome(fit.to_curve(phis))


__all__ = [
    "SinusoidFit",
    "TriangularFit",
    "fisher_from_fit",
    "fit_sinusoid",
    "fit_triangular",
    "visibility_and_phase",
]
