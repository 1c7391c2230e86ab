"""Counting emulation and count corrections.

Single-photon runs place one detector on every output mode. Two-photon runs
split every output mode 50:50 onto two threshold detectors (mode i feeds
detectors 2i and 2i+1), so two photons in the same mode register a
coincidence only when they leave through different detectors.
"""

import logging
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import DimensionError, EmptyDataError, InvalidInputError
from ..quantum.fock import (
    FockBasis,
    Occupation,
    ProbabilityDistribution,
    enumerate_basis,
)

logger = logging.getLogger(__name__)

Counts = Dict[Occupation, int]
SeedLike = Union[int, np.random.SeedSequence]


def detector_count(basis: FockBasis) -> int:
    """Number of detectors for a basis (one per mode, two per mode for pairs)."""
    if basis.n_photons == 1:
        return basis.n_modes
    if basis.n_photons == 2:
        return 2 * basis.n_modes
    raise DimensionError(f"no detector model for {basis.n_photons}-photon outcomes")


def _efficiency_vector(
    basis: FockBasis, efficiencies: Optional[Sequence[float]]
) -> np.ndarray:
    n_detectors = detector_count(basis)
    if efficiencies is None:
        return np.ones(n_detectors)
    eta = np.asarray(efficiencies, dtype=float)
    if eta.shape != (n_detectors,):
        raise DimensionError(
            f"{basis.n_photons}-photon outcomes over {basis.n_modes} modes need "
            f"{n_detectors} detector efficiencies, got {eta.size}"
        )
    if np.any((eta < 0) | (eta > 1)):
        raise InvalidInputError("detector efficiencies must lie in [0, 1]")
    return eta


def detector_pairs(n_modes: int) -> List[Tuple[int, int]]:
    """All coincidence pairs of the two-detectors-per-mode layout."""
    return list(combinations(range(2 * n_modes), 2))


def _pair_outcome(pair: Tuple[int, int], n_modes: int) -> Occupation:
    state = [0] * n_modes
    for detector in pair:
        state[detector // 2] += 1
    return tuple(state)


def outcome_efficiencies(
    basis: FockBasis, efficiencies: Optional[Sequence[float]] = None
) -> np.ndarray:
    """Detection efficiency of every outcome once bunched counts are doubled.

    Single photon: ``eta_i``. Two photons in modes i != j: the product of the
    mean efficiencies of the two detector pairs. Two photons in mode i:
    ``eta_2i * eta_2i+1``.
    """
    eta = _efficiency_vector(basis, efficiencies)
    if basis.n_photons == 1:
        return np.array([eta[s.index(1)] for s in basis.states])
    mean = 0.5 * (eta[0::2] + eta[1::2])
    out = np.empty(len(basis))
    for k, state in enumerate(basis.states):
        occupied = [i for i, n in enumerate(state) for _ in range(n)]
        i, j = occupied
        out[k] = eta[2 * i] * eta[2 * i + 1] if i == j else mean[i] * mean[j]
    return out


def sample_counts(
    dist: ProbabilityDistribution,
    shots: int,
    efficiencies: Optional[Sequence[float]] = None,
    seed: SeedLike = 0,
) -> Counts:
    """Emulate heralded counting of an outcome distribution.

    Every shot produces at most one registered event; shots lost to detector
    inefficiency or to bunched photons hitting one detector fall into an
    unrecorded remainder.

    Args:
        dist: Outcome distribution over a 1- or 2-photon basis
        shots: Heralded trials
        efficiencies: Per-detector efficiencies, all 1 when omitted
        seed: Integer seed or SeedSequence

    Returns:
        Raw counts per outcome, bunched outcomes not yet corrected

    Raises:
        InvalidInputError: If shots < 1 or efficiencies are malformed
    """
    if shots < 1:
        raise InvalidInputError(f"shots must be >= 1, got {shots}")
    basis = dist.basis
    eta = _efficiency_vector(basis, efficiencies)
    probs = np.clip(np.asarray(dist.probabilities, dtype=float), 0.0, None)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)

    if basis.n_photons == 1:
        events = [
            (state, probs[k] * eta[state.index(1)])
            for k, state in enumerate(basis.states)
        ]
    else:
        events = []
        for pair in detector_pairs(basis.n_modes):
            state = _pair_outcome(pair, basis.n_modes)
            branch = 0.5 if max(state) == 2 else 0.25
            weight = branch * eta[pair[0]] * eta[pair[1]]
            events.append((state, probs[basis.index(state)] * weight))

    pvals = np.array([p for _, p in events])
    pvals = np.append(pvals, max(0.0, 1.0 - pvals.sum()))
    draws = rng.multinomial(shots, pvals / pvals.sum())

    counts: Counts = {state: 0 for state in basis.states}
    for (state, _), n in zip(events, draws[:-1]):
        counts[state] += int(n)
    logger.debug(f"Sampled {shots} shots, {shots - int(draws[-1])} registered")
    return counts


def number_resolving_correction(raw_counts: Counts) -> Counts:
    """Double the counts of outcomes with both photons in one mode.

    Raises:
        InvalidInputError: If any outcome does not hold exactly two photons
    """
    corrected: Counts = {}
    for state, n in raw_counts.items():
        if sum(state) != 2:
            raise InvalidInputError(
                "number-resolving correction applies to two-photon outcomes, "
                f"got {state}"
            )
        corrected[tuple(state)] = 2 * n if max(state) == 2 else n
    return corrected


def normalize_counts(
    counts: Counts, efficiencies: Optional[Sequence[float]] = None
) -> ProbabilityDistribution:
    """Efficiency-correct and normalize counts with propagated Poisson errors.

    Two-photon counts must already carry the number-resolving correction.

    Returns:
        ProbabilityDistribution with ``sigmas`` set

    Raises:
        EmptyDataError: If no counts survive the correction
    """
    if not counts:
        raise EmptyDataError("no counts to normalize")
    first = next(iter(counts))
    basis = enumerate_basis(len(first), sum(first))
    raw = np.zeros(len(basis))
    for state, n in counts.items():
        raw[basis.index(state)] = n
    if np.any(raw < 0):
        raise InvalidInputError("counts must be nonnegative")

    eta = outcome_efficiencies(basis, efficiencies)
    blind = eta <= 0
    if np.any(blind & (raw > 0)):
        labels = [basis.labels()[k] for k in np.flatnonzero(blind & (raw > 0))]
        logger.warning(f"Counts on zero-efficiency outcomes {labels} are discarded")
    safe = np.where(blind, 1.0, eta)
    corrected = np.where(blind, 0.0, raw / safe)
    sigma = np.where(blind, 0.0, np.sqrt(raw) / safe)

    total = corrected.sum()
    if total <= 0:
        raise EmptyDataError("total corrected count is zero")
    probabilities = corrected / total
    sigma_sum = np.sum(sigma**2)
    variance = (
        (total - corrected) ** 2 * sigma**2
        + corrected**2 * (sigma_sum - sigma**2)
    ) / total**4
    return ProbabilityDistribution(
        basis, probabilities, np.sqrt(np.clip(variance, 0.0, None))
    )


__all__ = [
    "Counts",
    "detector_count",
    "detector_pairs",
    "normalize_counts",
    "number_resolving_correction",
    "outcome_efficiencies",
    "sample_counts",
]
