"""Port-symmetric lossy beam splitters.

A lossy beam splitter has scattering matrix ``[[t, r], [r, t]]`` with
``|t|^2 + |r|^2 = 1 - |A|^2``. Physical devices satisfy the phase relation
``2|t||r|cos(phi_rt) = -|A|^2`` (minus branch), which bounds the absorption
coefficient to ``|A|^2 <= 0.5``.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from ..exceptions import DomainError
from ..utils.angles import safe_angle, wrap_phase
from ..utils.serialization import complex_to_pair

logger = logging.getLogger(__name__)

MAX_ABSORPTION = 0.5
BOUND_TOL = 1e-12


class BeamSplitterKind(str, Enum):
    TYPE1 = "type1"
    TYPE2 = "type2"
    CUSTOM = "custom"


class Constraint(str, Enum):
    """Physicality constraints a lossy beam splitter must satisfy."""

    ENERGY_CONSERVATION = "energy_conservation"
    PHASE_RELATION = "phase_relation"
    ABSORPTION_BOUND = "absorption_bound"


@dataclass(frozen=True)
class LossyBeamSplitter:
    """Port-symmetric lossy beam splitter.

    Attributes:
        t: Complex transmission amplitude
        r: Complex reflection amplitude
        absorption: Intrinsic absorption coefficient |A|^2
        internal_phase: arg(r) - arg(t) in [0, 2pi)
        kind: Construction recipe
    """

    t: complex
    r: complex
    absorption: float
    internal_phase: float
    kind: BeamSplitterKind

    @classmethod
    def custom(cls, t: complex, r: complex) -> "LossyBeamSplitter":
        """Wrap user-supplied amplitudes; absorption is the energy deficit."""
        t, r = complex(t), complex(r)
        return cls(
            t=t,
            r=r,
            absorption=1.0 - abs(t) ** 2 - abs(r) ** 2,
            internal_phase=wrap_phase(safe_angle(r) - safe_angle(t)),
            kind=BeamSplitterKind.CUSTOM,
        )

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.t, self.r], [self.r, self.t]], dtype=np.complex128)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "t": complex_to_pair(self.t),
            "r": complex_to_pair(self.r),
            "t_abs": abs(self.t),
            "r_abs": abs(self.r),
            "absorption": self.absorption,
            "internal_phase": self.internal_phase,
        }


def _check_absorption(absorption: float) -> float:
    if not math.isfinite(absorption) or not (
        -BOUND_TOL <= absorption <= MAX_ABSORPTION + BOUND_TOL
    ):
        raise DomainError(
            f"absorption {absorption} outside [0, 0.5]: exceeds the port-symmetric "
            f"absorption bound |A|^2 <= 0.5"
        )
    return min(max(absorption, 0.0), MAX_ABSORPTION)


def solve_type1(absorption: float, mirror: bool = False) -> LossyBeamSplitter:
    """Type 1 device: real amplitudes with phi_rt = pi.

    With ``x = |t|^2`` the constraints reduce to
    ``x = ((1 - a) +/- sqrt(1 - 2a)) / 2``. The default root gives |t| -> 1
    as the absorption goes to zero; ``mirror`` selects the other root.

    Args:
        absorption: Target |A|^2 in [0, 0.5]
        mirror: Use the mirror root (|r| -> 1 as absorption -> 0)

    Returns:
        LossyBeamSplitter of kind TYPE1

    Raises:
        DomainError: If absorption is outside [0, 0.5]
    """
    alpha = _check_absorption(absorption)
    root = math.sqrt(max(1.0 - 2.0 * alpha, 0.0))
    t = math.sqrt(0.5 * ((1.0 - alpha) + root))
    # 2 t |r| = alpha exactly; avoids cancellation in 1 - alpha - t^2
    r = -alpha / (2.0 * t)
    if mirror:
        t, r = -r, -t
    return LossyBeamSplitter(
        t=complex(t),
        r=complex(r),
        absorption=alpha,
        internal_phase=math.pi,
        kind=BeamSplitterKind.TYPE1,
    )


def solve_type2(absorption: float) -> LossyBeamSplitter:
    """Type 2 device: |t| = |r| with absorption-dependent internal phase.

    Args:
        absorption: Target |A|^2 in [0, 0.5]

    Returns:
        LossyBeamSplitter of kind TYPE2

    Raises:
        DomainError: If absorption is outside [0, 0.5]
    """
    alpha = _check_absorption(absorption)
    mag = math.sqrt((1.0 - alpha) / 2.0)
    phase = math.acos(max(-1.0, -alpha / (1.0 - alpha)))
    return LossyBeamSplitter(
        t=complex(mag),
        r=complex(mag * np.exp(1j * phase)),
        absorption=alpha,
        internal_phase=phase,
        kind=BeamSplitterKind.TYPE2,
    )


def solve_custom(
    absorption: float, t_magnitude: float, upper: bool = False
) -> LossyBeamSplitter:
    """Minus-branch device with a chosen transmission magnitude.

    Args:
        absorption: Target |A|^2 in [0, 0.5]
        t_magnitude: |t|; must leave 2|t||r| >= absorption
        upper: Place phi_rt in (pi, 2pi) instead of [0, pi]

    Returns:
        LossyBeamSplitter of kind CUSTOM

    Raises:
        DomainError: If no minus-branch device has this |t|
    """
    alpha = _check_absorption(absorption)
    r_sq = 1.0 - alpha - t_magnitude**2
    if t_magnitude < 0 or r_sq < -BOUND_TOL:
        raise DomainError(
            f"|t|={t_magnitude} incompatible with absorption {alpha}: "
            f"|t|^2 + |r|^2 must equal {1.0 - alpha}"
        )
    r_mag = math.sqrt(max(r_sq, 0.0))
    product = 2.0 * t_magnitude * r_mag
    if product < alpha - BOUND_TOL:
        raise DomainError(
            f"2|t||r|={product} below absorption {alpha}; the phase relation "
            f"has no solution"
        )
    cos_rt = -alpha / product if product > 0 else -1.0
    phase = math.acos(min(1.0, max(-1.0, cos_rt)))
    if upper:
        phase = wrap_phase(2.0 * math.pi - phase)
    return LossyBeamSplitter(
        t=complex(t_magnitude),
        r=complex(r_mag * np.exp(1j * phase)),
        absorption=alpha,
        internal_phase=phase,
        kind=BeamSplitterKind.CUSTOM,
    )


def solve(
    kind: Union[BeamSplitterKind, str],
    absorption: Optional[float] = None,
    t: Optional[complex] = None,
    r: Optional[complex] = None,
    mirror: bool = False,
) -> LossyBeamSplitter:
    """Build a device from a kind tag.

    Raises:
        DomainError: If the kind needs parameters that were not supplied
    """
    kind = BeamSplitterKind(kind)
    if kind is BeamSplitterKind.CUSTOM:
        if t is None or r is None:
            raise DomainError("custom devices need both t and r")
        return LossyBeamSplitter.custom(t, r)
    if absorption is None:
        raise DomainError(f"{kind.value} devices need an absorption value")
    if kind is BeamSplitterKind.TYPE1:
        return solve_type1(absorption, mirror=mirror)
    return solve_type2(absorption)


def validate(
    bs: LossyBeamSplitter, tol: float = 1e-10, sign: int = -1
) -> List[Constraint]:
    """List the physicality constraints a device violates.

    The phase relation ``2|t||r|cos(phi_rt) = sign * |A|^2`` is only checked
    when energy conservation holds, since it is defined relative to the
    energy deficit.

    Args:
        bs: Device to check
        tol: Absolute tolerance
        sign: -1 for the minus branch, +1 for the plus branch

    Returns:
        Violated constraints, empty if the device is physical
    """
    violations = []
    energy = abs(bs.t) ** 2 + abs(bs.r) ** 2 + bs.absorption
    energy_ok = abs(energy - 1.0) <= tol
    if not energy_ok:
        violations.append(Constraint.ENERGY_CONSERVATION)
    if energy_ok:
        cross = 2.0 * float(np.real(np.conj(bs.t) * bs.r))
        if abs(cross - sign * bs.absorption) > tol:
            violations.append(Constraint.PHASE_RELATION)
    if bs.absorption > MAX_ABSORPTION + tol or bs.absorption < -tol:
        violations.append(Constraint.ABSORPTION_BOUND)
    if violations:
        logger.debug(f"{bs.kind.value} device violates {[v.value for v in violations]}")
    return violations


def absorbed_intensity(bs: LossyBeamSplitter, phi: Any) -> Any:
    """Absorbed intensity for the single-photon input (e^{i phi}, -1)/sqrt(2).

    Equals ``|A|^2 + 2|t||r|cos(phi_rt)cos(phi)``, i.e. ``|A|^2 (1 - cos phi)``
    on the minus branch.

    Args:
        bs: Device
        phi: Phase or array of phases

    Returns:
        Absorbed probability, same shape as ``phi``
    """
    phis = np.asarray(phi, dtype=float)
    rot = np.exp(1j * phis)
    out = (
        1.0
        - 0.5 * np.abs(bs.t * rot - bs.r) ** 2
        - 0.5 * np.abs(bs.r * rot - bs.t) ** 2
    )
    if out.ndim == 0:
        return float(out)
    return out


def singular_value_pair(bs: LossyBeamSplitter) -> Tuple[float, float]:
    """Singular values ``|t - r|`` and ``|t + r|``, largest first."""
    a = abs(bs.t - bs.r)
    b = abs(bs.t + bs.r)
    return (a, b) if a >= b else (b, a)
