"""Rectangular MZI mesh compilation.

Every MZI uses the device transfer matrix

    T(theta, phi) = e^{i(theta/2 + pi/2)} [[e^{i phi} sin(theta/2),  cos(theta/2)],
                                           [e^{i phi} cos(theta/2), -sin(theta/2)]]

so theta = pi is the bar state and theta = 0 the cross state. ``decompose``
nulls the unitary in the rectangular (Clements) order and then pushes the
residual diagonal to the output side, giving
``U = diag(e^{i delta}) T_K ... T_1``.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from ..exceptions import DimensionError, InvalidConfigError, PreconditionError
from ..numerics import ArrayLike, as_matrix, unitarity_residual
from ..utils.angles import safe_angle, wrap_phase, wrap_signed
from .dilation import cpa_dilation
from .lossybs import LossyBeamSplitter

logger = logging.getLogger(__name__)

MAX_MESH_DIM = 16
UNITARITY_TOL = 1e-10
NULL_TOL = 1e-13

BAR = (math.pi, 0.0)
# CPA meshes keep MZI1 balanced with phi = pi when there is nothing to null.
CPA_IDLE = (math.pi / 2, math.pi)


@dataclass(frozen=True)
class MziSetting:
    """Phases and placement of one MZI."""

    theta: float
    phi: float
    modes: Tuple[int, int]
    layer: int = 0

    def __post_init__(self):
        i, j = self.modes
        if j != i + 1 or i < 0:
            raise DimensionError(f"MZI modes must be adjacent, got {self.modes}")
        object.__setattr__(self, "theta", wrap_phase(self.theta))
        object.__setattr__(self, "phi", wrap_phase(self.phi))

    def matrix(self) -> np.ndarray:
        return mzi_matrix(self.theta, self.phi)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "layer": self.layer,
            "modes": list(self.modes),
            "theta": self.theta,
            "phi": self.phi,
        }


@dataclass(frozen=True)
class MeshProgram:
    """Ordered MZI settings plus output phases.

    ``settings`` are stored in the order light traverses them.
    """

    n_modes: int
    settings: Tuple[MziSetting, ...] = ()
    output_phases: Tuple[float, ...] = ()

    def __post_init__(self):
        phases = self.output_phases or (0.0,) * self.n_modes
        if len(phases) != self.n_modes:
            raise DimensionError(
                f"{len(phases)} output phases for {self.n_modes} modes"
            )
        for s in self.settings:
            if s.modes[1] >= self.n_modes:
                raise DimensionError(f"MZI on modes {s.modes} outside {self.n_modes}")
        object.__setattr__(self, "output_phases", tuple(wrap_phase(p) for p in phases))
        object.__setattr__(self, "settings", tuple(self.settings))

    def with_phase_offset(self, index: int, offset: float) -> "MeshProgram":
        """Copy with ``offset`` added to the external phase of one MZI."""
        settings = list(self.settings)
        target = settings[index]
        settings[index] = replace(target, phi=target.phi + offset)
        return replace(self, settings=tuple(settings))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_modes": self.n_modes,
            "mzis": [s.to_dict() for s in self.settings],
            "output_phases": list(self.output_phases),
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "MeshProgram":
        try:
            settings = tuple(
                MziSetting(
                    theta=float(item["theta"]),
                    phi=float(item["phi"]),
                    modes=(int(item["modes"][0]), int(item["modes"][1])),
                    layer=int(item["layer"]),
                )
                for item in payload["mzis"]
            )
            return cls(
                n_modes=int(payload["n_modes"]),
                settings=settings,
                output_phases=tuple(float(p) for p in payload["output_phases"]),
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise InvalidConfigError(f"malformed mesh program: {exc}") from exc


def mzi_matrix(theta: float, phi: float) -> np.ndarray:
    """Transfer matrix of a single MZI, global phase included."""
    s = math.sin(theta / 2)
    c = math.cos(theta / 2)
    ep = np.exp(1j * phi)
    glob = np.exp(1j * (theta / 2 + math.pi / 2))
    return glob * np.array([[ep * s, c], [ep * c, -s]], dtype=np.complex128)


def _apply_right_inverse(u: np.ndarray, m: int, theta: float, phi: float) -> None:
    """u <- u @ T^{-1} on columns (m, m+1), in place."""
    t_inv = mzi_matrix(theta, phi).conj().T
    u[:, m : m + 2] = u[:, m : m + 2] @ t_inv


def _apply_left(u: np.ndarray, m: int, theta: float, phi: float) -> None:
    """u <- T @ u on rows (m, m+1), in place."""
    u[m : m + 2, :] = mzi_matrix(theta, phi) @ u[m : m + 2, :]


def _null_from_right(a: complex, b: complex, idle: Tuple[float, float]):
    """Setting that zeroes ``a`` in the row ``[a, b] @ T^{-1}``."""
    if abs(a) < NULL_TOL and abs(b) < NULL_TOL:
        return idle
    theta = 2.0 * math.atan2(abs(b), abs(a))
    phi = safe_angle(a) - safe_angle(b) + math.pi
    return theta, phi


def _null_from_left(a: complex, b: complex, idle: Tuple[float, float]):
    """Setting that zeroes ``b`` in the column ``T @ [a, b]``."""
    if abs(a) < NULL_TOL and abs(b) < NULL_TOL:
        return idle
    theta = 2.0 * math.atan2(abs(a), abs(b))
    phi = safe_angle(b) - safe_angle(a)
    return theta, phi


def _assign_layers(ops: Sequence[Tuple[int, float, float]], n: int) -> List[MziSetting]:
    depth = [0] * n
    settings = []
    for m, theta, phi in ops:
        layer = max(depth[m], depth[m + 1])
        depth[m] = depth[m + 1] = layer + 1
        settings.append(MziSetting(theta=theta, phi=phi, modes=(m, m + 1), layer=layer))
    return settings


def decompose(
    u: ArrayLike, *, idle: Tuple[float, float] = BAR
) -> MeshProgram:
    """Compile a unitary into a rectangular MZI mesh.

    Args:
        u: N x N unitary, N <= 16
        idle: Setting used when both entries to be nulled are already zero

    Returns:
        MeshProgram with N(N-1)/2 MZIs and output phases

    Raises:
        DimensionError: If u is not square or too large
        PreconditionError: If u is not unitary within 1e-10
    """
    arr = as_matrix(u, "mesh target")
    n = arr.shape[0]
    if arr.shape[1] != n or n > MAX_MESH_DIM or n == 0:
        raise DimensionError(
            f"mesh target must be square with 1..16 modes, got {arr.shape}"
        )
    residual = unitarity_residual(arr)
    if residual >= UNITARITY_TOL:
        raise PreconditionError(
            f"mesh target is not unitary (residual {residual:.3e})", residual=residual
        )

    work = arr.copy()
    right_ops = []
    left_ops = []
    for i in range(n - 1):
        if i % 2 == 0:
            for j in range(i + 1):
                m = i - j
                row = n - 1 - j
                theta, phi = _null_from_right(work[row, m], work[row, m + 1], idle)
                _apply_right_inverse(work, m, theta, phi)
                right_ops.append((m, theta, phi))
        else:
            for j in range(i + 1):
                m = n + j - i - 2
                theta, phi = _null_from_left(work[m, j], work[m + 1, j], idle)
                _apply_left(work, m, theta, phi)
                left_ops.append((m, theta, phi))

    # work = L_k ... L_1 U R_1^{-1} ... R_m^{-1} is diagonal; move each L to the output.
    diag = np.diag(work).copy()
    pushed = []
    for m, theta, phi in reversed(left_ops):
        d0, d1 = diag[m], diag[m + 1]
        new_phi = safe_angle(d0) - safe_angle(d1)
        k = np.exp(-1j * (theta + math.pi))
        diag[m] = np.exp(-1j * phi) * k * d1
        diag[m + 1] = k * d1
        pushed.append((m, theta, new_phi))

    settings = _assign_layers(right_ops + pushed, n)
    program = MeshProgram(
        n_modes=n,
        settings=tuple(settings),
        output_phases=tuple(safe_angle(d) for d in diag),
    )

    error = float(np.max(np.abs(reconstruct(program) - arr)))
    if error >= UNITARITY_TOL:
        raise PreconditionError(
            f"mesh reconstruction off by {error:.3e}", residual=error
        )
    logger.debug(
        f"Decomposed {n}x{n} unitary into {len(settings)} MZIs (error {error:.2e})"
    )
    return program


def reconstruct(p: MeshProgram) -> np.ndarray:
    """Evaluate a mesh program to its unitary."""
    u = np.eye(p.n_modes, dtype=np.complex128)
    ordered = sorted(
        enumerate(p.settings), key=lambda item: (item[1].layer, item[0])
    )
    for _, s in ordered:
        m = s.modes[0]
        u[m : m + 2, :] = s.matrix() @ u[m : m + 2, :]
    return np.exp(1j * np.asarray(p.output_phases))[:, None] * u


def cpa_phases(
    bs: LossyBeamSplitter, literal: bool = False
) -> Tuple[float, float]:
    """Closed-form MZI2 split angle and MZI3 - MZI2 external phase difference.

    With MZI1 and MZI3 balanced and ``phi_MZI1 = pi`` the CPA unitary fixes

        theta2 = 2 arccos(sqrt(2 |A|^2))
        phi3 - phi2 = theta2/2 + pi/2 - arg((t + r)/(t - r))

    ``literal=True`` returns the variant with ``+arg(...)``, which agrees for
    Type 1 devices and is off by pi for Type 2.

    Args:
        bs: Lossy beam splitter
        literal: Use the ``+arg`` form

    Returns:
        (theta2, phi3 - phi2), both in [0, 2pi)
    """
    alpha = min(max(bs.absorption, 0.0), 0.5)
    theta2 = 2.0 * math.acos(math.sqrt(2.0 * alpha))
    t_abs, r_abs = abs(bs.t), abs(bs.r)
    rel = bs.internal_phase
    arg_ratio = math.atan2(2.0 * t_abs * r_abs * math.sin(rel), t_abs**2 - r_abs**2)
    if abs(bs.t + bs.r) < NULL_TOL:
        arg_ratio = 0.0
    sign = 1.0 if literal else -1.0
    return wrap_phase(theta2), wrap_phase(theta2 / 2 + math.pi / 2 + sign * arg_ratio)


def compile_cpa(bs: LossyBeamSplitter) -> MeshProgram:
    """Compile the 3-mode CPA mesh for a lossy beam splitter.

    Returns:
        MeshProgram with MZI1 on (0, 1), MZI2 on (1, 2), MZI3 on (0, 1)
    """
    dilated = cpa_dilation(bs)
    program = decompose(dilated.matrix, idle=CPA_IDLE)
    logger.info(
        f"Compiled {bs.kind.value} device (|A|^2={bs.absorption:.6g}) into "
        f"{len(program.settings)} MZIs"
    )
    return program


def output_phase_relation(p: MeshProgram) -> float:
    """Output phase difference delta_2 - delta_1 of a 3-mode CPA mesh.

    Returns 0.0 with a warning when the mesh has no coupled ancilla, since the
    relation only concerns absorbing devices.

    Returns:
        delta_2 - delta_1 in (-pi, pi]
    """
    if p.n_modes != 3:
        logger.warning(f"output phase relation needs a 3-mode mesh, got {p.n_modes}")
        return 0.0
    u = reconstruct(p)
    coupling = max(np.max(np.abs(u[2, :2])), np.max(np.abs(u[:2, 2])))
    if coupling < 1e-12:
        logger.warning("ancilla decoupled: output phase relation does not apply")
        return 0.0
    return wrap_signed(p.output_phases[1] - p.output_phases[0])


__all__ = [
    "BAR",
    "CPA_IDLE",
    "MeshProgram",
    "MziSetting",
    "compile_cpa",
    "cpa_phases",
    "decompose",
    "mzi_matrix",
    "output_phase_relation",
    "reconstruct",
]
