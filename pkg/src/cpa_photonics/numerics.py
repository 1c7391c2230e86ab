"""Dense complex linear algebra and combinatorial kernels.

All matrices are ``numpy`` complex arrays. The helpers here fix the
conventions the rest of the package relies on: the singular value ordering
and phase convention, the permanent, and unitarity checks.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.stats import unitary_group

from .exceptions import DimensionError

logger = logging.getLogger(__name__)

MAX_SVD_DIM = 16
MAX_PERMANENT_DIM = 10

# Magnitudes within this of the largest entry count as ties for the phase convention.
PHASE_TIE_TOL = 1e-12
# Singular values below this get a completed left vector instead of M v / sigma.
NULL_SINGULAR_VALUE = 1e-13

ArrayLike = Union[np.ndarray, Sequence[Sequence[complex]]]


def as_matrix(m: ArrayLike, name: str = "matrix") -> np.ndarray:
    """Convert input to a finite 2-D complex array.

    Args:
        m: Matrix-like input
        name: Name used in error messages

    Returns:
        complex128 array

    Raises:
        DimensionError: If input is not 2-D or has non-finite entries
    """
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError(f"{name} has non-finite entries")
    return arr


def _require_square(arr: np.ndarray, limit: int, name: str) -> None:
    rows, cols = arr.shape
    if rows != cols:
        raise DimensionError(f"{name} must be square, got {rows}x{cols}")
    if rows > limit:
        raise DimensionError(f"{name} dimension {rows} exceeds limit {limit}")


@dataclass(frozen=True)
class SvdResult:
    """Singular value decomposition ``m = left @ diag(s) @ right_conjugate``."""

    left: np.ndarray
    singular_values: np.ndarray
    right_conjugate: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.left @ np.diag(self.singular_values) @ self.right_conjugate


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    """Make the first largest-magnitude element real and nonnegative."""
    mags = np.abs(vec)
    top = mags.max()
    if top == 0.0:
        return vec
    k = int(np.argmax(mags >= top - PHASE_TIE_TOL))
    return vec * (np.conj(vec[k]) / mags[k])


def _complete_basis(columns: np.ndarray, filled: list, candidates: np.ndarray) -> None:
    """Fill missing columns by Gram-Schmidt over candidate vectors, in place."""
    n = columns.shape[0]
    for i in range(n):
        if i in filled:
            continue
        pool = [candidates[:, i]] + [np.eye(n)[:, j] for j in range(n)]
        for cand in pool:
            vec = cand.astype(np.complex128).copy()
            for j in filled:
                vec = vec - (np.vdot(columns[:, j], vec)) * columns[:, j]
            norm = np.linalg.norm(vec)
            if norm > 1e-8:
                columns[:, i] = vec / norm
                filled.append(i)
                break


def svd(m: ArrayLike) -> SvdResult:
    """Deterministic SVD of a small square complex matrix.

    Right singular vectors come from the Hermitian eigenproblem of ``M^H M``.
    Each singular value is then measured as ``|M v|`` so that small values
    keep full absolute accuracy. Singular values are sorted nonincreasing
    (stable on ties); in every right singular vector the first element of
    largest magnitude is real and nonnegative.

    Args:
        m: Square matrix of dimension at most 16

    Returns:
        SvdResult with unitary factors

    Raises:
        DimensionError: If input is non-square, too large or non-finite
    """
    arr = as_matrix(m)
    _require_square(arr, MAX_SVD_DIM, "svd input")
    n = arr.shape[0]
    if n == 0:
        empty = np.zeros((0, 0), dtype=np.complex128)
        return SvdResult(empty, np.zeros(0), empty)

    gram = arr.conj().T @ arr
    gram = 0.5 * (gram + gram.conj().T)
    _, vecs = np.linalg.eigh(gram)

    images = arr @ vecs
    sigmas = np.linalg.norm(images, axis=0)
    order = np.argsort(-sigmas, kind="stable")
    sigmas = sigmas[order]
    right = np.column_stack([_fix_phase(vecs[:, k]) for k in order])

    left = np.zeros((n, n), dtype=np.complex128)
    filled = []
    for i in range(n):
        if sigmas[i] > NULL_SINGULAR_VALUE:
            vec = arr @ right[:, i]
            for j in filled:
                vec = vec - np.vdot(left[:, j], vec) * left[:, j]
            left[:, i] = vec / np.linalg.norm(vec)
            filled.append(i)
    _complete_basis(left, filled, right)

    logger.debug(f"svd singular values: {sigmas}")
    return SvdResult(left=left, singular_values=sigmas, right_conjugate=right.conj().T)


def _permanent_expansion(arr: np.ndarray) -> complex:
    n = arr.shape[0]
    total = 0j
    for perm in itertools.permutations(range(n)):
        prod = 1 + 0j
        for i, j in enumerate(perm):
            prod *= arr[i, j]
        total += prod
    return complex(total)


def _permanent_ryser(arr: np.ndarray) -> complex:
    """Ryser formula with Gray-code column subset ordering."""
    n = arr.shape[0]
    row_sums = np.zeros(n, dtype=np.complex128)
    total = 0j
    gray_prev = 0
    for k in range(1, 2**n):
        gray = k ^ (k >> 1)
        changed = (gray ^ gray_prev).bit_length() - 1
        if gray & (1 << changed):
            row_sums += arr[:, changed]
        else:
            row_sums -= arr[:, changed]
        gray_prev = gray
        sign = -1 if bin(gray).count("1") % 2 else 1
        total += sign * np.prod(row_sums)
    return complex((-1) ** n * total)


def permanent(m: ArrayLike) -> complex:
    """Permanent of a square matrix.

    Direct expansion for dimension up to 3, Ryser with Gray-code ordering above.

    Args:
        m: Square matrix of dimension at most 10

    Returns:
        Complex permanent; the empty matrix has permanent 1

    Raises:
        DimensionError: If input is non-square or too large
    """
    arr = as_matrix(m) if np.size(m) else np.zeros((0, 0), dtype=np.complex128)
    _require_square(arr, MAX_PERMANENT_DIM, "permanent input")
    if arr.shape[0] == 0:
        return 1 + 0j
    if arr.shape[0] <= 3:
        return _permanent_expansion(arr)
    return _permanent_ryser(arr)


def unitarity_residual(m: ArrayLike) -> float:
    """Max-abs entry of ``m^H m - I``."""
    arr = as_matrix(m)
    _require_square(arr, arr.shape[0], "matrix")
    n = arr.shape[0]
    if n == 0:
        return 0.0
    return float(np.max(np.abs(arr.conj().T @ arr - np.eye(n))))


def is_unitary(m: ArrayLike, tol: float = 1e-10) -> bool:
    """True if every entry of ``m^H m - I`` is below ``tol`` in magnitude."""
    return unitarity_residual(m) < tol


def embed(block: np.ndarray, n: int, modes: Sequence[int]) -> np.ndarray:
    """Embed a k x k block acting on ``modes`` into an n x n identity.

    Args:
        block: Square block
        n: Full dimension
        modes: Mode indices the block acts on

    Returns:
        n x n complex array
    """
    full = np.eye(n, dtype=np.complex128)
    idx = np.asarray(modes, dtype=int)
    full[np.ix_(idx, idx)] = block
    return full


def haar_unitary(n: int, seed: Optional[int] = None) -> np.ndarray:
    """Haar-random unitary of dimension n."""
    if n == 1:
        rng = np.random.default_rng(seed)
        return np.array([[np.exp(1j * rng.uniform(0, 2 * np.pi))]])
    return np.asarray(
        unitary_group.rvs(n, random_state=np.random.default_rng(seed)),
        dtype=np.complex128,
    )
