"""Thermo-optic heater calibration.

A heater is described by its electrical response ``V(I) = R I + beta I^3``
and by the optical fringe it produces as a function of electrical power,
``optical_power(p) = A cos(b p + c) + d`` with p in milliwatts.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, Iterator, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.optimize import curve_fit, minimize_scalar

from ..circuits.clements import MeshProgram
from ..exceptions import (
    ConvergenceError,
    FitError,
    InvalidConfigError,
    InvalidInputError,
    OutOfRangeError,
)
from ..utils.angles import TWO_PI, wrap_phase
from ..utils.serialization import dumps

logger = logging.getLogger(__name__)

MAX_CURRENT_A = 0.024
MIN_IV_POINTS = 4
MIN_FRINGE_POINTS = 6
PERIOD_CANDIDATES = 400
SPAN_TOL = 1e-9


@dataclass(frozen=True)
class IvFit:
    resistance: float
    cubic_coeff: float
    residual_rms: float


@dataclass(frozen=True)
class FringeFit:
    """Fitted ``A cos(b p + c) + d`` with A >= 0 and c in [0, 2pi)."""

    amplitude: float
    modulation: float
    offset: float
    baseline: float
    residual_rms: float

    @property
    def period_mw(self) -> float:
        return TWO_PI / self.modulation

    @property
    def visibility(self) -> float:
        return self.amplitude / self.baseline


@dataclass(frozen=True)
class HeaterCalibration:
    """Electrical and optical response of one heater.

    Attributes:
        resistance: Linear resistance R, ohms
        cubic_coeff: Nonlinear coefficient beta, ohms per ampere squared
        amplitude: Fringe amplitude A, optical power units
        modulation: Fringe modulation b, radians per milliwatt
        offset: Fringe phase c at zero power, radians
        baseline: Fringe baseline d, optical power units
    """

    resistance: float
    cubic_coeff: float
    amplitude: float
    modulation: float
    offset: float
    baseline: float

    def __post_init__(self):
        if self.resistance <= 0:
            raise InvalidInputError(
                f"resistance must be positive, got {self.resistance}"
            )
        if self.cubic_coeff < 0:
            raise InvalidInputError(
                f"cubic coefficient must be >= 0, got {self.cubic_coeff}"
            )
        if self.modulation <= 0:
            raise InvalidInputError(
                f"modulation must be positive, got {self.modulation}"
            )
        if self.baseline <= 0:
            raise InvalidInputError(
                f"fringe baseline must be positive, got {self.baseline}"
            )

    @classmethod
    def from_fits(cls, iv: IvFit, fringe: FringeFit) -> "HeaterCalibration":
        return cls(
            resistance=iv.resistance,
            cubic_coeff=iv.cubic_coeff,
            amplitude=fringe.amplitude,
            modulation=fringe.modulation,
            offset=fringe.offset,
            baseline=fringe.baseline,
        )

    @property
    def period_mw(self) -> float:
        return TWO_PI / self.modulation

    @property
    def visibility(self) -> float:
        return self.amplitude / self.baseline

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def fit_iv(currents: Sequence[float], voltages: Sequence[float]) -> IvFit:
    """Least-squares fit of ``V = R I + beta I^3``.

    Args:
        currents: Drive currents, amperes
        voltages: Measured voltages, volts

    Returns:
        IvFit with R and beta

    Raises:
        FitError: On fewer than 4 points or a rank-deficient design
    """
    i = np.asarray(currents, dtype=float)
    v = np.asarray(voltages, dtype=float)
    if i.shape != v.shape or i.ndim != 1:
        raise InvalidInputError("currents and voltages must be 1-D and the same length")
    if i.size < MIN_IV_POINTS:
        raise FitError(f"I-V fit needs at least {MIN_IV_POINTS} points, got {i.size}")
    design = np.column_stack([i, i**3])
    if np.linalg.matrix_rank(design) < 2:
        raise FitError("I-V design is rank deficient (currents not distinct enough)")
    (r, beta), *_ = np.linalg.lstsq(design, v, rcond=None)
    residual = v - design @ np.array([r, beta])
    return IvFit(float(r), float(beta), float(np.sqrt(np.mean(residual**2))))


def fringe_model(
    powers, amplitude: float, modulation: float, offset: float, baseline: float
):
    return amplitude * np.cos(modulation * np.asarray(powers) + offset) + baseline


def _linear_fringe(p: np.ndarray, y: np.ndarray, b: float) -> Tuple[np.ndarray, float]:
    design = np.column_stack([np.cos(b * p), np.sin(b * p), np.ones_like(p)])
    coeffs, *_ = np.linalg.lstsq(design, y, rcond=None)
    return coeffs, float(np.sum((y - design @ coeffs) ** 2))


def fit_fringe(powers: Sequence[float], optical: Sequence[float]) -> FringeFit:
    """Fit a cosine fringe in electrical power.

    The modulation is seeded by a grid search over candidate periods between
    the sampling limit and the full span, then polished by a bounded scalar
    search and a nonlinear least-squares refinement of all four parameters.

    Args:
        powers: Electrical heater powers, milliwatts
        optical: Measured optical powers

    Returns:
        FringeFit

    Raises:
        FitError: On too few points, a flat signal or a span shorter than
            one fitted period
        ConvergenceError: If the nonlinear refinement does not converge
    """
    p = np.asarray(powers, dtype=float)
    y = np.asarray(optical, dtype=float)
    if p.shape != y.shape or p.ndim != 1:
        raise InvalidInputError(
            "powers and optical data must be 1-D and the same length"
        )
    if p.size < MIN_FRINGE_POINTS:
        raise FitError(
            f"fringe fit needs at least {MIN_FRINGE_POINTS} points, got {p.size}"
        )
    order = np.argsort(p)
    p, y = p[order], y[order]
    span = p[-1] - p[0]
    if span <= 0:
        raise FitError("fringe powers do not span a range")
    if np.ptp(y) <= 1e-12 * max(1.0, float(np.max(np.abs(y)))):
        raise FitError("optical signal is flat; no fringe to fit")

    step = float(np.median(np.diff(p)))
    shortest = max(2.0 * step, span / p.size)
    periods = np.geomspace(shortest, span, PERIOD_CANDIDATES)
    moduls = TWO_PI / periods
    scores = [_linear_fringe(p, y, b)[1] for b in moduls]
    best = int(np.argmin(scores))
    lo = moduls[min(best + 1, moduls.size - 1)]
    hi = moduls[max(best - 1, 0)]
    b0 = float(moduls[best])
    if hi > lo:
        res = minimize_scalar(
            lambda b: _linear_fringe(p, y, b)[1],
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        if res.fun <= scores[best]:
            b0 = float(res.x)

    (cq, sq, d0), _ = _linear_fringe(p, y, b0)
    a0 = math.hypot(cq, sq)
    c0 = math.atan2(-sq, cq)
    try:
        popt, _ = curve_fit(fringe_model, p, y, p0=[a0, b0, c0, d0], maxfev=20000)
    except RuntimeError as e:
        raise ConvergenceError(f"fringe refinement did not converge: {e}") from e
    amplitude, modulation, offset, baseline = (float(x) for x in popt)
    if amplitude < 0:
        amplitude, offset = -amplitude, offset + math.pi
    if modulation <= 0:
        raise FitError(
            f"fringe refinement gave non-positive modulation {modulation:.3e}"
        )
    if TWO_PI / modulation > span * (1.0 + SPAN_TOL):
        raise FitError(
            f"power span {span:.6g} mW is shorter than the fitted period "
            f"{TWO_PI / modulation:.6g} mW"
        )

    residual = y - fringe_model(p, amplitude, modulation, offset, baseline)
    fit = FringeFit(
        amplitude=amplitude,
        modulation=modulation,
        offset=offset,
        baseline=baseline,
        residual_rms=float(np.sqrt(np.mean(residual**2))),
    )
    logger.info(
        f"Fringe fit: period {fit.period_mw:.6g} mW, visibility {fit.visibility:.6g}"
    )
    return fit


def phase_at_power(power_mw, cal: HeaterCalibration):
    """Unwrapped fringe phase ``b p + c`` at an electrical power."""
    phase = cal.modulation * np.asarray(power_mw, dtype=float) + cal.offset
    return float(phase) if phase.ndim == 0 else phase


def phase_to_power(
    target_phase: float, cal: HeaterCalibration, wrap: bool = False
) -> float:
    """Electrical power at which the fringe phase reaches a target.

    By default the target is taken as an unwrapped phase, so ``c + 2pi`` maps
    to one full period. Targets below ``c`` and ``wrap=True`` both fall back to
    the smallest nonnegative power modulo 2pi.
    """
    delta = target_phase - cal.offset
    if wrap or delta < 0:
        delta = wrap_phase(delta)
    return delta / cal.modulation


def power_to_current(power_mw: float, cal: HeaterCalibration) -> float:
    """Drive current delivering an electrical power.

    Solves ``beta I^4 + R I^2 - p = 0`` for the nonnegative root.

    Returns:
        Current in amperes

    Raises:
        InvalidInputError: If the power is negative
        OutOfRangeError: If the current exceeds the 24 mA driver limit
    """
    if power_mw < 0:
        raise InvalidInputError(f"electrical power must be >= 0, got {power_mw}")
    p_w = power_mw * 1e-3
    r, beta = cal.resistance, cal.cubic_coeff
    squared = 2.0 * p_w / (r + math.sqrt(r * r + 4.0 * beta * p_w))
    current = math.sqrt(squared)
    if current > MAX_CURRENT_A:
        raise OutOfRangeError(
            f"{power_mw:.6g} mW needs {current * 1e3:.6g} mA, above the "
            f"{MAX_CURRENT_A * 1e3:.0f} mA driver limit"
        )
    return current


class CalibrationStore:
    """Heater calibrations keyed by heater id."""

    def __init__(self, calibrations: Optional[Dict[str, HeaterCalibration]] = None):
        self._calibrations: Dict[str, HeaterCalibration] = dict(calibrations or {})

    def __contains__(self, heater_id: str) -> bool:
        return heater_id in self._calibrations

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self._calibrations))

    def __len__(self) -> int:
        return len(self._calibrations)

    def get(self, heater_id: str) -> HeaterCalibration:
        try:
            return self._calibrations[heater_id]
        except KeyError:
            raise InvalidConfigError(
                f"no calibration for heater '{heater_id}'"
            ) from None

    def set(self, heater_id: str, cal: HeaterCalibration) -> None:
        self._calibrations[heater_id] = cal

    def to_dict(self) -> Dict[str, Dict[str, float]]:
        return {k: self._calibrations[k].to_dict() for k in self}

    @classmethod
    def load(cls, path: Union[str, Path]) -> "CalibrationStore":
        try:
            with open(path, encoding="utf-8") as f:
                payload = json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidConfigError(f"{path}: invalid JSON ({e})") from e
        except OSError as e:
            raise InvalidConfigError(f"{path}: {e}") from e
        if not isinstance(payload, dict):
            raise InvalidConfigError(f"{path}: calibration store must be a JSON object")
        store = cls()
        for heater_id, fields in payload.items():
            try:
                store.set(heater_id, HeaterCalibration(**fields))
            except (TypeError, InvalidInputError) as e:
                raise InvalidConfigError(f"{path}: heater '{heater_id}': {e}") from e
        logger.info(f"Loaded {len(store)} heater calibrations from {path}")
        return store

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps(self.to_dict()), encoding="utf-8")
        logger.info(f"Saved {len(self)} heater calibrations to {path}")
        return path


def heater_ids(program: MeshProgram) -> Iterator[Tuple[str, float]]:
    """(heater id, programmed phase) pairs in mesh order, MZIs numbered from 1."""
    for k, setting in enumerate(program.settings, start=1):
        yield f"mzi{k}_theta", setting.theta
        yield f"mzi{k}_phi", setting.phi


def current_table(program: MeshProgram, store: CalibrationStore) -> pd.DataFrame:
    """Drive currents for every heater of a compiled mesh.

    Each phase is mapped to the smallest nonnegative heater power that
    produces it modulo 2pi.

    Raises:
        InvalidConfigError: If a heater has no calibration
        OutOfRangeError: If a heater would exceed the driver limit
    """
    rows = []
    for heater_id, phase in heater_ids(program):
        cal = store.get(heater_id)
        power = phase_to_power(phase, cal, wrap=True)
        rows.append(
            {
                "heater_id": heater_id,
                "theta_or_phi": phase,
                "power_mW": power,
                "current_mA": power_to_current(power, cal) * 1e3,
            }
        )
    return pd.DataFrame(
        rows, columns=["heater_id", "theta_or_phi", "power_mW", "current_mA"]
    )


__all__ = [
    "CalibrationStore",
    "FringeFit",
    "HeaterCalibration",
    "IvFit",
    "current_table",
    "fit_fringe",
    "fit_iv",
    "fringe_model",
    "heater_ids",
    "phase_at_power",
    "phase_to_power",
    "power_to_current",
]
