"""Phase sensitivity and distribution similarity."""

import logging
from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import (
    DataError,
    GridMismatchError,
    InvalidInputError,
    UndefinedG2Error,
)
from ..quantum.fock import ProbabilityDistribution

logger = logging.getLogger(__name__)

NEGATIVE_TOL = 1e-12
SINGULAR_PROBABILITY = 1e-12
SINGULAR_SLOPE = 1e-9
NORMALIZATION_TOL = 1e-6


@dataclass
class PhaseCurve:
    """Values of one outcome over a phase grid.

    ``derivatives`` and ``curvatures`` hold exact first and second phase
    derivatives when the producer knows them.
    """

    phis: np.ndarray
    values: np.ndarray
    label: str = ""
    derivatives: Optional[np.ndarray] = None
    curvatures: Optional[np.ndarray] = None

    def __post_init__(self):
        self.phis = np.asarray(self.phis, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.phis.ndim != 1 or self.values.shape != self.phis.shape:
            raise DataError(
                f"curve {self.label!r}: {self.values.shape} values on a "
                f"{self.phis.shape} grid"
            )
        if self.phis.size < 2 or np.any(np.diff(self.phis) <= 0):
            raise DataError(
                f"curve {self.label!r}: phase grid must be strictly increasing"
            )
        for name in ("derivatives", "curvatures"):
            extra = getattr(self, name)
            if extra is not None:
                extra = np.asarray(extra, dtype=float)
                if extra.shape != self.phis.shape:
                    raise DataError(f"curve {self.label!r}: {name} shape mismatch")
                setattr(self, name, extra)

    @property
    def maximum(self) -> float:
        return float(np.max(self.values))

    @property
    def argmax_phi(self) -> float:
        return float(self.phis[int(np.argmax(self.values))])


def _extrapolate(
    phis: np.ndarray, fi: np.ndarray, regular: np.ndarray, i: int
) -> float:
    """Quadratic estimate at i from up to two regular neighbors per side."""
    left = [j for j in range(i - 1, -1, -1) if regular[j]][:2]
    right = [j for j in range(i + 1, len(phis)) if regular[j]][:2]
    points = sorted(left + right)
    if not points:
        return 0.0
    if len(points) < 3:
        return float(np.mean(fi[points]))
    coeffs = np.polyfit(phis[points] - phis[i], fi[points], 2)
    return float(max(coeffs[-1], 0.0))


def fisher_per_outcome(curve: PhaseCurve) -> PhaseCurve:
    """Classical Fisher information contribution of one outcome.

    ``FI = (dP/dphi)^2 / P``. Points with vanishing probability and slope take
    the finite limit: ``2 P''`` when curvatures are known, otherwise a
    quadratic extrapolation from neighboring grid points.

    Args:
        curve: Outcome probability over phase

    Returns:
        PhaseCurve of FI values on the same grid

    Raises:
        DataError: If a probability is negative beyond 1e-12
    """
    if np.any(curve.values < -NEGATIVE_TOL):
        raise DataError(
            f"curve {curve.label!r} has negative probability {curve.values.min():.3e}"
        )
    p = np.clip(curve.values, 0.0, None)
    if curve.derivatives is not None:
        dp = curve.derivatives
    else:
        dp = np.gradient(p, curve.phis, edge_order=2 if p.size > 2 else 1)

    singular = ((p < SINGULAR_PROBABILITY) & (np.abs(dp) < SINGULAR_SLOPE)) | (p == 0.0)
    regular = ~singular
    fi = np.zeros_like(p)
    fi[regular] = dp[regular] ** 2 / p[regular]

    for i in np.flatnonzero(singular):
        if curve.curvatures is not None:
            fi[i] = max(2.0 * curve.curvatures[i], 0.0)
        else:
            fi[i] = _extrapolate(curve.phis, fi, regular, i)
    return PhaseCurve(curve.phis, fi, label=curve.label)


def fisher_total(curves: Sequence[PhaseCurve]) -> PhaseCurve:
    """Sum of per-outcome Fisher information over all outcomes.

    Raises:
        GridMismatchError: If the curves use different phase grids
    """
    if not curves:
        raise DataError("no curves to sum")
    grid = curves[0].phis
    for c in curves[1:]:
        if c.phis.shape != grid.shape or not np.array_equal(c.phis, grid):
            raise GridMismatchError(
                f"curve {c.label!r} does not share the grid of {curves[0].label!r}"
            )
    total = np.sum([fisher_per_outcome(c).values for c in curves], axis=0)
    return PhaseCurve(grid, total, label="total")


def _normalized(values: np.ndarray, name: str) -> np.ndarray:
    if np.any(values < -NEGATIVE_TOL):
        raise DataError(f"{name} has negative entries")
    values = np.clip(values, 0.0, None)
    total = values.sum()
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise DataError(f"{name} sums to {total:.9g}, not 1")
    if total != 1.0:
        logger.debug(f"Renormalizing {name} (sum {total:.12g})")
        values = values / total
    return values


def bhattacharyya(p: ProbabilityDistribution, q: ProbabilityDistribution) -> float:
    """Bhattacharyya coefficient sum_i sqrt(p_i q_i).

    Raises:
        DataError: On basis mismatch or unnormalized input
    """
    if p.basis.states != q.basis.states:
        raise DataError("distributions are over different Fock bases")
    pv = _normalized(np.asarray(p.probabilities, dtype=float), "first distribution")
    qv = _normalized(np.asarray(q.probabilities, dtype=float), "second distribution")
    return float(min(1.0, np.sum(np.sqrt(pv * qv))))


def heralded_g2(r_abh: Any, r_ah: Any, r_bh: Any, r_h: Any) -> Any:
    """Heralded second-order correlation ``R_ABH R_H / (R_AH R_BH)``.

    Accepts scalars or arrays (e.g. rates versus delay).

    Raises:
        InvalidInputError: If any rate is negative
        UndefinedG2Error: If R_AH R_BH is zero
    """
    rates = [np.asarray(x, dtype=float) for x in (r_abh, r_ah, r_bh, r_h)]
    if any(np.any(x < 0) for x in rates):
        raise InvalidInputError("coincidence rates must be nonnegative")
    abh, ah, bh, h = rates
    denominator = ah * bh
    if np.any(denominator == 0):
        raise UndefinedG2Error("g2 undefined: R_AH * R_BH is zero")
    g2 = abh * h / denominator
    if g2.ndim == 0:
        return float(g2)
    return g2


def window_maximum(
    delays: Sequence[float], g2: Sequence[float], window: float
) -> Tuple[float, float]:
    """Largest g2 with |delay| <= window / 2.

    Returns:
        (delay, g2) at the maximum
    """
    delays = np.asarray(delays, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    inside = np.abs(delays) <= window / 2
    if not np.any(inside):
        raise DataError(f"no delays inside a {window} window")
    idx = np.flatnonzero(inside)[int(np.argmax(g2[inside]))]
    return float(delays[idx]), float(g2[idx])


__all__: List[str] = [
    "PhaseCurve",
    "bhattacharyya",
    "fisher_per_outcome",
    "fisher_total",
    "heralded_g2",
    "window_maximum",
]
