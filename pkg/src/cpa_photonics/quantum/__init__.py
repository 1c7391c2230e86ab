"""Multi-photon Fock-space simulation."""

from .fock import (
    FockBasis,
    InputState,
    PhaseResponse,
    ProbabilityDistribution,
    StateVector,
    enumerate_basis,
    occupation_label,
    output_probabilities,
    phase_response,
    photon_unitary,
    prepare_noon,
    prepare_single_photon,
)

__all__ = [
    "FockBasis",
    "InputState",
    "PhaseResponse",
    "ProbabilityDistribution",
    "StateVector",
    "enumerate_basis",
    "occupation_label",
    "output_probabilities",
    "phase_response",
    "photon_unitary",
    "prepare_noon",
    "prepare_single_photon",
]
