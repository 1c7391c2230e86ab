"""Phase-sensitivity analysis and curve fitting."""

from .fitting import (
    SinusoidFit,
    TriangularFit,
    fisher_from_fit,
    fit_sinusoid,
    fit_triangular,
    visibility_and_phase,
)
from .metrology import (
    PhaseCurve,
    bhattacharyya,
    fisher_per_outcome,
    fisher_total,
    heralded_g2,
    window_maximum,
)

__all__ = [
    "PhaseCurve",
    "SinusoidFit",
    "TriangularFit",
    "bhattacharyya",
    "fisher_from_fit",
    "fisher_per_outcome",
    "fisher_total",
    "fit_sinusoid",
    "fit_triangular",
    "heralded_g2",
    "visibility_and_phase",
    "window_maximum",
]
