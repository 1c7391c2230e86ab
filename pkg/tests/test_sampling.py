"""Tests for counting emulation and count corrections."""

import numpy as np
import pytest

from cpa_photonics.exceptions import DimensionError, EmptyDataError, InvalidInputError
from cpa_photonics.experiment.sampling import (
    detector_count,
    detector_pairs,
    normalize_counts,
    number_resolving_correction,
    outcome_efficiencies,
    sample_counts,
)
from cpa_photonics.quantum.fock import ProbabilityDistribution, enumerate_basis

SINGLE = enumerate_basis(3, 1)
PAIRS = enumerate_basis(3, 2)


def _single(probabilities):
    return ProbabilityDistribution(SINGLE, np.asarray(probabilities, dtype=float))


def _pairs(probabilities):
    return ProbabilityDistribution(PAIRS, np.asarray(probabilities, dtype=float))


class TestDetectorModel:
    """Test detector layout and outcome efficiencies."""

    def test_counts(self):
        """Test one detector per mode for singles and two for pairs."""
        assert detector_count(SINGLE) == 3
        assert detector_count(PAIRS) == 6
        with pytest.raises(DimensionError):
            detector_count(enumerate_basis(3, 3))

    def test_pairs(self):
        """Test fifteen coincidence pairs over six detectors."""
        pairs = detector_pairs(3)
        assert len(pairs) == 15
        assert pairs[0] == (0, 1)

    def test_single_photon_efficiencies(self):
        """Test outcome efficiency is the detector efficiency."""
        eta = outcome_efficiencies(SINGLE, [0.9, 0.8, 0.7])
        np.testing.assert_allclose(eta, [0.9, 0.8, 0.7])

    def test_pair_efficiencies(self):
        """Test distinct-mode and bunched outcome efficiencies."""
        eta = outcome_efficiencies(PAIRS, [0.9, 0.7, 0.6, 0.4, 1.0, 0.5])
        expected = {
            "200": 0.9 * 0.7,
            "110": 0.8 * 0.5,
            "101": 0.8 * 0.75,
            "020": 0.6 * 0.4,
            "011": 0.5 * 0.75,
            "002": 1.0 * 0.5,
        }
        for label, value in zip(PAIRS.labels(), eta):
            assert value == pytest.approx(expected[label])

    def test_efficiency_validation(self):
        """Test length and range of efficiencies."""
        with pytest.raises(DimensionError, match="6 detector"):
            outcome_efficiencies(PAIRS, [1.0, 1.0, 1.0])
        with pytest.raises(InvalidInputError):
            outcome_efficiencies(SINGLE, [1.2, 1.0, 1.0])


class TestSampleCounts:
    """Test multinomial counting."""

    def test_reproducible(self):
        """Test identical seeds give identical counts."""
        dist = _single([0.5, 0.3, 0.2])
        assert sample_counts(dist, 1000, seed=4) == sample_counts(dist, 1000, seed=4)
        assert sample_counts(dist, 1000, seed=4) != sample_counts(dist, 1000, seed=5)

    def test_seed_sequence(self):
        """Test SeedSequence input."""
        dist = _single([0.5, 0.3, 0.2])
        seq = np.random.SeedSequence(entropy=7, spawn_key=(1, 2))
        counts = sample_counts(dist, 100, seed=seq)
        fresh = np.random.SeedSequence(7, spawn_key=(1, 2))
        again = sample_counts(dist, 100, seed=fresh)
        assert counts == again

    def test_ideal_single_photon(self):
        """Test every shot registers with perfect detectors."""
        counts = sample_counts(_single([0.5, 0.3, 0.2]), 10_000, seed=1)
        assert sum(counts.values()) == 10_000
        assert set(counts) == set(SINGLE.states)

    def test_lossy_detectors(self):
        """Test inefficient detectors lose shots."""
        dist = _single([0.0, 0.0, 1.0])
        counts = sample_counts(dist, 100_000, [1.0, 1.0, 0.5], seed=2)
        assert counts[(0, 0, 1)] == pytest.approx(50_000, abs=1_000)
        assert counts[(1, 0, 0)] == 0

    def test_bunched_pairs_halved(self):
        """Test only half of the bunched pairs register a coincidence."""
        probabilities = np.zeros(len(PAIRS))
        probabilities[PAIRS.index((2, 0, 0))] = 1.0
        counts = sample_counts(_pairs(probabilities), 100_000, seed=3)
        assert counts[(2, 0, 0)] == pytest.approx(50_000, abs=1_000)

    def test_distinct_pairs_complete(self):
        """Test pairs in different modes always register."""
        probabilities = np.zeros(len(PAIRS))
        probabilities[PAIRS.index((1, 0, 1))] = 1.0
        counts = sample_counts(_pairs(probabilities), 1_000, seed=3)
        assert counts[(1, 0, 1)] == 1_000

    def test_invalid_shots(self):
        """Test the shot count must be positive."""
        with pytest.raises(InvalidInputError):
            sample_counts(_single([1.0, 0.0, 0.0]), 0)


class TestCorrections:
    """Test number-resolving correction and normalization."""

    def test_number_resolving_correction(self):
        """Test bunched outcomes are doubled."""
        corrected = number_resolving_correction({(2, 0, 0): 10, (1, 1, 0): 7})
        assert corrected == {(2, 0, 0): 20, (1, 1, 0): 7}

    def test_correction_needs_pairs(self):
        """Test the correction rejects single-photon outcomes."""
        with pytest.raises(InvalidInputError):
            number_resolving_correction({(1, 0, 0): 3})

    def test_normalize(self):
        """Test efficiency correction, normalization and error propagation."""
        counts = {(1, 0, 0): 400, (0, 1, 0): 300, (0, 0, 1): 150}
        dist = normalize_counts(counts, [1.0, 1.0, 0.5])
        np.testing.assert_allclose(dist.probabilities, [0.4, 0.3, 0.3])
        sigma = np.array([20.0, np.sqrt(300), np.sqrt(150) / 0.5])
        corrected = np.array([400.0, 300.0, 300.0])
        total = corrected.sum()
        variance = (
            (total - corrected) ** 2 * sigma**2
            + corrected**2 * (np.sum(sigma**2) - sigma**2)
        ) / total**4
        np.testing.assert_allclose(dist.sigmas, np.sqrt(variance))

    def test_zero_efficiency_outcome(self, caplog):
        """Test counts on a blind outcome are dropped with a warning."""
        counts = {(1, 0, 0): 10, (0, 1, 0): 10, (0, 0, 1): 5}
        with caplog.at_level("WARNING"):
            dist = normalize_counts(counts, [1.0, 1.0, 0.0])
        assert dist[(0, 0, 1)] == 0.0
        assert dist[(1, 0, 0)] == pytest.approx(0.5)
        assert "zero-efficiency" in caplog.text

    def test_empty(self):
        """Test empty and all-zero counts."""
        with pytest.raises(EmptyDataError):
            normalize_counts({})
        with pytest.raises(EmptyDataError):
            normalize_counts({(1, 0, 0): 0, (0, 1, 0): 0, (0, 0, 1): 0})

    def test_recovers_distribution(self):
        """Test sampling then correcting recovers a two-photon distribution."""
        dist = _pairs([0.3, 0.1, 0.2, 0.15, 0.05, 0.2])
        eta = [0.9, 0.8, 0.85, 0.95, 0.7, 0.75]
        raw = sample_counts(dist, 1_000_000, eta, seed=11)
        measured = normalize_counts(number_resolving_correction(raw), eta)
        deviation = np.abs(measured.probabilities - dist.probabilities)
        assert np.all(deviation < 6 * measured.sigmas)

    def test_error_scaling(self):
        """Test standard deviations fall as one over the square root of shots."""
        dist = _single([0.5, 0.3, 0.2])
        shots = [1_000, 10_000, 100_000]
        sigmas = [
            normalize_counts(sample_counts(dist, n, seed=0)).sigmas[0] for n in shots
        ]
        slope = np.polyfit(np.log10(shots), np.log10(sigmas), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.05)
