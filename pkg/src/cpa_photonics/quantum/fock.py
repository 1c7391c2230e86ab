"""Fock-space lifting of linear-optical transformations.

Mode matrices act as ``u[i, j]``: amplitude from input mode j to output
mode i. The n-photon transition amplitude between occupations m (input) and
n (output) is ``per(u[n|m]) / sqrt(prod n_i! prod m_j!)``.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import CapacityError, DimensionError, PreconditionError
from ..numerics import ArrayLike, as_matrix, permanent, unitarity_residual

logger = logging.getLogger(__name__)

MAX_BASIS_SIZE = 10_000
UNITARITY_TOL = 1e-10

Occupation = Tuple[int, ...]


def _compositions(n_photons: int, n_modes: int) -> List[Occupation]:
    if n_modes == 1:
        return [(n_photons,)]
    states = []
    for first in range(n_photons, -1, -1):
        for rest in _compositions(n_photons - first, n_modes - 1):
            states.append((first,) + rest)
    return states


def occupation_label(state: Sequence[int]) -> str:
    """Compact label such as ``"101"``; separated by ``-`` above 9 photons."""
    if all(n < 10 for n in state):
        return "".join(str(n) for n in state)
    return "-".join(str(n) for n in state)


@dataclass(frozen=True)
class FockBasis:
    """All occupations of ``n_photons`` over ``n_modes``, in decreasing order."""

    n_modes: int
    n_photons: int
    states: Tuple[Occupation, ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.states)

    def index(self, state: Sequence[int]) -> int:
        return self._lookup()[tuple(state)]

    def labels(self) -> List[str]:
        return [occupation_label(s) for s in self.states]

    def _lookup(self) -> Dict[Occupation, int]:
        return _basis_lookup(self.states)


@lru_cache(maxsize=64)
def _basis_lookup(states: Tuple[Occupation, ...]) -> Dict[Occupation, int]:
    return {s: i for i, s in enumerate(states)}


@lru_cache(maxsize=64)
def enumerate_basis(n_modes: int, n_photons: int) -> FockBasis:
    """Canonical Fock basis.

    Args:
        n_modes: Number of modes, >= 1
        n_photons: Number of photons, >= 0

    Returns:
        FockBasis with C(n_photons + n_modes - 1, n_modes - 1) states

    Raises:
        DimensionError: If n_modes < 1 or n_photons < 0
        CapacityError: If the basis would exceed 10,000 states
    """
    if n_modes < 1 or n_photons < 0:
        raise DimensionError(f"invalid basis ({n_modes} modes, {n_photons} photons)")
    size = math.comb(n_photons + n_modes - 1, n_modes - 1)
    if size > MAX_BASIS_SIZE:
        raise CapacityError(f"Fock basis of {size} states exceeds {MAX_BASIS_SIZE}")
    return FockBasis(n_modes, n_photons, tuple(_compositions(n_photons, n_modes)))


@dataclass
class StateVector:
    basis: FockBasis
    amplitudes: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class ProbabilityDistribution:
    """Outcome probabilities over a Fock basis, optionally with standard deviations."""

    basis: FockBasis
    probabilities: np.ndarray
    sigmas: Optional[np.ndarray] = None

    @property
    def total(self) -> float:
        return float(np.sum(self.probabilities))

    def as_dict(self) -> Dict[str, float]:
        return {
            label: float(p) for label, p in zip(self.basis.labels(), self.probabilities)
        }

    def __getitem__(self, state: Sequence[int]) -> float:
        return float(self.probabilities[self.basis.index(state)])


class InputState(str, Enum):
    """Phase-encoded input states on two signal modes plus vacuum ancilla."""

    SINGLE_PHOTON = "single_photon"
    NOON = "noon"

    @property
    def n_photons(self) -> int:
        return 1 if self is InputState.SINGLE_PHOTON else 2

    @property
    def fringe_order(self) -> int:
        return self.n_photons

    def amplitudes(
        self, phis: ArrayLike, order: int = 0, n_modes: int = 3
    ) -> np.ndarray:
        """Amplitudes or their phase derivatives on a grid.

        Args:
            phis: Phase grid
            order: Derivative order (0, 1 or 2)
            n_modes: Total modes; modes beyond the first two are vacuum

        Returns:
            Array of shape (basis size, len(phis))
        """
        phis = np.atleast_1d(np.asarray(phis, dtype=float))
        basis = enumerate_basis(n_modes, self.n_photons)
        k = self.n_photons
        out = np.zeros((len(basis), phis.size), dtype=np.complex128)
        loaded = [0] * n_modes
        loaded[0] = k
        empty = [0] * n_modes
        empty[1] = k
        phase = np.exp(1j * k * phis) / math.sqrt(2)
        out[basis.index(loaded)] = (1j * k) ** order * phase
        if order == 0:
            out[basis.index(empty)] = -1.0 / math.sqrt(2)
        return out


def prepare_single_photon(phi: float, n_modes: int = 3) -> StateVector:
    """(e^{i phi}|1,0> - |0,1>)/sqrt(2) with vacuum on extra modes."""
    basis = enumerate_basis(n_modes, 1)
    amplitudes = InputState.SINGLE_PHOTON.amplitudes(phi, n_modes=n_modes)
    return StateVector(basis, amplitudes[:, 0])


def prepare_noon(phi: float, n_modes: int = 3) -> StateVector:
    """(e^{2i phi}|2,0> - |0,2>)/sqrt(2) with vacuum on extra modes."""
    basis = enumerate_basis(n_modes, 2)
    return StateVector(basis, InputState.NOON.amplitudes(phi, n_modes=n_modes)[:, 0])


def _check_unitary(u: np.ndarray) -> None:
    residual = unitarity_residual(u)
    if residual >= UNITARITY_TOL:
        raise PreconditionError(
            f"mode matrix is not unitary (residual {residual:.3e})", residual=residual
        )


def photon_unitary(u: ArrayLike, n_photons: int) -> np.ndarray:
    """Lift a mode unitary to the n-photon Fock space.

    Args:
        u: Mode unitary
        n_photons: Photon number

    Returns:
        Square matrix over ``enumerate_basis(len(u), n_photons)``

    Raises:
        PreconditionError: If u is not unitary within 1e-10
    """
    arr = as_matrix(u, "mode matrix")
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"mode matrix must be square, got {arr.shape}")
    _check_unitary(arr)
    basis = enumerate_basis(arr.shape[0], n_photons)
    modes = np.arange(arr.shape[0])
    expanded = [np.repeat(modes, s) for s in basis.states]
    norms = [math.prod(math.factorial(n) for n in s) for s in basis.states]

    size = len(basis)
    out = np.empty((size, size), dtype=np.complex128)
    for a in range(size):
        for b in range(size):
            sub = arr[np.ix_(expanded[a], expanded[b])]
            out[a, b] = permanent(sub) / math.sqrt(norms[a] * norms[b])
    return out


def output_probabilities(u: ArrayLike, state: StateVector) -> ProbabilityDistribution:
    """Outcome distribution of a state after a mode unitary.

    Raises:
        DimensionError: If u does not match the state's mode count
    """
    arr = as_matrix(u, "mode matrix")
    if arr.shape[0] != state.basis.n_modes:
        raise DimensionError(
            f"{arr.shape[0]}-mode matrix applied to a {state.basis.n_modes}-mode state"
        )
    fock = photon_unitary(arr, state.basis.n_photons)
    probs = np.abs(fock @ state.amplitudes) ** 2
    return ProbabilityDistribution(state.basis, probs)


@dataclass
class PhaseResponse:
    """Outcome probabilities and their first two phase derivatives.

    Arrays have shape (len(phis), basis size).
    """

    basis: FockBasis
    phis: np.ndarray
    probabilities: np.ndarray
    first: np.ndarray
    second: np.ndarray


def phase_response(
    fock_matrix: np.ndarray,
    input_state: InputState,
    phis: ArrayLike,
    n_modes: int = 3,
) -> PhaseResponse:
    """Evaluate probabilities and exact derivatives over a phase grid.

    With ``a = F s(phi)``: ``P = |a|^2``, ``P' = 2 Re(conj(a) a')`` and
    ``P'' = 2 (|a'|^2 + Re(conj(a) a''))``.
    """
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    basis = enumerate_basis(n_modes, input_state.n_photons)
    if fock_matrix.shape != (len(basis), len(basis)):
        raise DimensionError(
            f"Fock matrix {fock_matrix.shape} does not match a {len(basis)}-state basis"
        )
    amp = fock_matrix @ input_state.amplitudes(phis, 0, n_modes)
    d1 = fock_matrix @ input_state.amplitudes(phis, 1, n_modes)
    d2 = fock_matrix @ input_state.amplitudes(phis, 2, n_modes)
    probs = np.abs(amp) ** 2
    first = 2.0 * np.real(np.conj(amp) * d1)
    second = 2.0 * (np.abs(d1) ** 2 + np.real(np.conj(amp) * d2))
    return PhaseResponse(basis, phis, probs.T, first.T, second.T)
