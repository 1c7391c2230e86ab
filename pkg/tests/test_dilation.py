"""Tests for quasi-unitary dilation."""

import numpy as np
import pytest

from cpa_photonics.circuits.dilation import cpa_dilation, dilate, reduce_ancillas
from cpa_photonics.circuits.lossybs import solve_type1, solve_type2
from cpa_photonics.exceptions import GainUnsupportedError
from cpa_photonics.numerics import haar_unitary, is_unitary


class TestDilate:
    """Test embedding of lossy matrices."""

    @pytest.mark.parametrize("alpha", [0.1, 0.3, 0.5])
    def test_beam_splitter(self, alpha):
        """Test one ancilla per lossy singular mode and an exact signal block."""
        for bs in (solve_type1(alpha), solve_type2(alpha)):
            d = dilate(bs.matrix)
            assert d.n_modes == 3
            assert d.ancilla_modes == (2,)
            assert is_unitary(d.matrix)
            np.testing.assert_allclose(d.signal_block(), bs.matrix, atol=1e-12)

    def test_random_contraction(self):
        """Test a dense 4x4 contraction with four lossy modes."""
        rng = np.random.default_rng(7)
        m = haar_unitary(4, 1) @ np.diag(rng.uniform(0.1, 0.9, 4)) @ haar_unitary(4, 2)
        d = dilate(m)
        assert d.n_ancillas == 4
        assert is_unitary(d.matrix)
        np.testing.assert_allclose(d.signal_block(), m, atol=1e-12)

    def test_zero_matrix(self):
        """Test a fully absorbing transformation."""
        d = dilate(np.zeros((2, 2)))
        assert d.n_modes == 4
        assert is_unitary(d.matrix)
        np.testing.assert_allclose(d.signal_block(), 0.0, atol=1e-12)

    def test_unitary_needs_no_ancilla(self):
        """Test a lossless input is returned without ancillas."""
        u = haar_unitary(3, 9)
        d = dilate(u)
        assert d.n_ancillas == 0
        np.testing.assert_allclose(d.matrix, u, atol=1e-12)
        assert d.ancilla_coupling() == 0.0

    def test_gain_rejected(self):
        """Test singular values above one."""
        with pytest.raises(GainUnsupportedError, match="gain"):
            dilate(1.1 * np.eye(2))

    def test_singular_values_recorded(self):
        """Test the stored singular values."""
        d = dilate(solve_type1(0.3).matrix)
        assert d.singular_values == pytest.approx((1.0, np.sqrt(0.4)), abs=1e-12)

    @pytest.mark.parametrize("alpha", [1e-8, 1e-7, 1e-6])
    def test_small_absorption(self, alpha):
        """Test weakly absorbing devices still get exactly one coupled ancilla."""
        for bs in (solve_type1(alpha), solve_type2(alpha)):
            d = dilate(bs.matrix)
            assert d.n_ancillas == 1
            assert d.singular_values == pytest.approx(
                (1.0, np.sqrt(1 - 2 * alpha)), abs=1e-12
            )
            assert is_unitary(d.matrix)
            np.testing.assert_allclose(d.signal_block(), bs.matrix, atol=1e-12)


class TestCpaDilation:
    """Test the fixed three-mode embedding of beam splitters."""

    def test_lossless_device_keeps_ancilla(self):
        """Test a decoupled ancilla is present and removable."""
        d = cpa_dilation(solve_type1(0.0))
        assert d.n_modes == 3
        assert d.ancilla_coupling() < 1e-12
        reduced = reduce_ancillas(d)
        assert reduced.n_modes == 2
        assert reduced.ancilla_modes == ()

    def test_perfect_absorber_couples_fully(self):
        """Test the ancilla takes all light of the dark singular mode."""
        d = cpa_dilation(solve_type1(0.5))
        assert np.linalg.norm(d.matrix[2, :2]) == pytest.approx(1.0, abs=1e-12)
        assert abs(d.matrix[2, 2]) < 1e-12

    def test_reduce_keeps_coupled_ancilla(self):
        """Test reduce_ancillas is a no-op when every ancilla couples."""
        d = cpa_dilation(solve_type2(0.2))
        assert reduce_ancillas(d) is d
