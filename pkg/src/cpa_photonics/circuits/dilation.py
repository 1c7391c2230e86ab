"""Quasi-unitary dilation of lossy transformations.

A sub-unitary M x M matrix ``T = U diag(sigma) W`` is embedded into an
(M + k)-mode unitary ``S_U S_D S_W``: every lossy singular mode is coupled to
its own vacuum ancilla by a real rotation block
``[[sigma, sqrt(1 - sigma^2)], [sqrt(1 - sigma^2), -sigma]]``.
"""

import logging
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from ..exceptions import GainUnsupportedError, NumericalError
from ..numerics import ArrayLike, as_matrix, embed, svd, unitarity_residual
from .lossybs import LossyBeamSplitter

logger = logging.getLogger(__name__)

LOSSY_THRESHOLD = 1e-9
GAIN_TOL = 1e-12
UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class DilatedUnitary:
    """Unitary embedding of a lossy transformation.

    Attributes:
        matrix: N x N unitary
        signal_modes: Modes carrying the original transformation
        ancilla_modes: Vacuum environment modes
        source: The original M x M matrix
        singular_values: Singular values of the source, nonincreasing
    """

    matrix: np.ndarray
    signal_modes: Tuple[int, ...]
    ancilla_modes: Tuple[int, ...]
    source: np.ndarray
    singular_values: Tuple[float, ...] = ()

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_ancillas(self) -> int:
        return len(self.ancilla_modes)

    def signal_block(self) -> np.ndarray:
        idx = np.asarray(self.signal_modes, dtype=int)
        return self.matrix[np.ix_(idx, idx)]

    def ancilla_coupling(self) -> float:
        """Largest amplitude between any signal mode and any ancilla mode."""
        if not self.ancilla_modes:
            return 0.0
        sig = np.asarray(self.signal_modes, dtype=int)
        anc = np.asarray(self.ancilla_modes, dtype=int)
        return float(
            max(
                np.max(np.abs(self.matrix[np.ix_(anc, sig)])),
                np.max(np.abs(self.matrix[np.ix_(sig, anc)])),
            )
        )


def dilate(
    m: ArrayLike,
    *,
    threshold: float = LOSSY_THRESHOLD,
    min_ancillas: int = 0,
) -> DilatedUnitary:
    """Embed a sub-unitary matrix into a larger unitary.

    Singular values below ``1 - threshold`` get one ancilla each, appended
    after the signal modes in singular-value order. ``min_ancillas`` forces
    extra ancillas onto the weakest remaining singular modes; when such a mode
    is lossless its block is diag(1, -1).

    Args:
        m: Square source matrix with singular values <= 1
        threshold: Lossy-mode detection threshold
        min_ancillas: Lower bound on the ancilla count

    Returns:
        DilatedUnitary

    Raises:
        GainUnsupportedError: If a singular value exceeds one
        NumericalError: If the embedding fails its unitarity check
    """
    source = as_matrix(m, "dilation source")
    result = svd(source)
    sigmas = result.singular_values
    size = source.shape[0]

    if np.any(sigmas > 1.0 + GAIN_TOL):
        raise GainUnsupportedError(
            f"singular value {sigmas.max():.12g} > 1: gain dilation is not supported"
        )

    coupled = [i for i in range(size) if sigmas[i] < 1.0 - threshold]
    extra = max(0, min(min_ancillas, size) - len(coupled))
    for i in reversed(range(size)):
        if extra == 0:
            break
        if i not in coupled:
            coupled.append(i)
            extra -= 1
    coupled.sort()

    n = size + len(coupled)
    s_d = np.eye(n, dtype=np.complex128)
    for j, i in enumerate(coupled):
        a = size + j
        sigma = 1.0 if sigmas[i] >= 1.0 - threshold else float(sigmas[i])
        leak = np.sqrt(max(0.0, 1.0 - sigma**2))
        s_d[i, i] = sigma
        s_d[i, a] = leak
        s_d[a, i] = leak
        s_d[a, a] = -sigma

    signal = list(range(size))
    s_u = embed(result.left, n, signal)
    s_w = embed(result.right_conjugate, n, signal)
    matrix = s_u @ s_d @ s_w

    residual = unitarity_residual(matrix)
    if residual >= UNITARITY_TOL:
        raise NumericalError(f"dilated matrix not unitary (residual {residual:.3e})")
    block_error = float(np.max(np.abs(matrix[:size, :size] - source))) if size else 0.0
    if block_error >= threshold + UNITARITY_TOL:
        raise NumericalError(f"dilated signal block off by {block_error:.3e}")

    logger.debug(
        f"Dilated {size}x{size} matrix with {len(coupled)} ancilla(s), "
        f"sigma={np.round(sigmas, 12).tolist()}"
    )
    return DilatedUnitary(
        matrix=matrix,
        signal_modes=tuple(signal),
        ancilla_modes=tuple(range(size, n)),
        source=source,
        singular_values=tuple(float(s) for s in sigmas),
    )


def reduce_ancillas(d: DilatedUnitary, tol: float = 1e-10) -> DilatedUnitary:
    """Drop ancilla modes that do not couple to any other mode.

    Args:
        d: Dilated unitary
        tol: Coupling tolerance

    Returns:
        DilatedUnitary without decoupled ancillas (``d`` itself if none)
    """
    keep = []
    removed = []
    for a in d.ancilla_modes:
        row = np.abs(np.delete(d.matrix[a, :], a))
        col = np.abs(np.delete(d.matrix[:, a], a))
        diag = abs(d.matrix[a, a])
        decoupled = np.all(row < tol) and np.all(col < tol)
        if decoupled and 1.0 - tol <= diag <= 1.0 + tol:
            removed.append(a)
        else:
            keep.append(a)
    if not removed:
        return d

    modes = list(d.signal_modes) + keep
    idx = np.asarray(modes, dtype=int)
    matrix = d.matrix[np.ix_(idx, idx)]
    n_signal = len(d.signal_modes)
    logger.info(f"Removed {len(removed)} decoupled ancilla(s), {len(keep)} kept")
    return replace(
        d,
        matrix=matrix,
        signal_modes=tuple(range(n_signal)),
        ancilla_modes=tuple(range(n_signal, len(modes))),
    )


def cpa_dilation(bs: LossyBeamSplitter) -> DilatedUnitary:
    """Three-mode embedding of a lossy beam splitter.

    Modes 0 and 1 are the signal ports and mode 2 the ancilla. The ancilla is
    kept for lossless devices too, so CPA meshes have a fixed shape.
    """
    return dilate(bs.matrix, min_ancillas=1)
