"""Tests for MZI mesh compilation."""

import math

import numpy as np
import pytest

from cpa_photonics.circuits.clements import (
    MeshProgram,
    MziSetting,
    compile_cpa,
    cpa_phases,
    decompose,
    mzi_matrix,
    output_phase_relation,
    reconstruct,
)
from cpa_photonics.circuits.dilation import cpa_dilation
from cpa_photonics.circuits.lossybs import solve_type1, solve_type2
from cpa_photonics.exceptions import (
    DimensionError,
    InvalidConfigError,
    PreconditionError,
)
from cpa_photonics.numerics import haar_unitary, is_unitary
from cpa_photonics.utils.angles import phase_distance

CPA_ALPHAS = [0.05, 0.1, 0.25, 0.4, 0.45]


def _devices():
    for alpha in CPA_ALPHAS:
        yield solve_type1(alpha)
        yield solve_type2(alpha)


class TestMzi:
    """Test the single-MZI transfer matrix."""

    def test_bar_and_cross(self):
        """Test theta = pi is bar and theta = 0 is cross."""
        bar = np.abs(mzi_matrix(math.pi, 0.0))
        np.testing.assert_allclose(bar, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(
            np.abs(mzi_matrix(0.0, 0.0)), [[0, 1], [1, 0]], atol=1e-15
        )

    def test_unitary(self):
        """Test unitarity over a grid of settings."""
        for theta in np.linspace(0, 2 * math.pi, 9):
            for phi in np.linspace(0, 2 * math.pi, 9):
                assert is_unitary(mzi_matrix(theta, phi))

    def test_setting_validation(self):
        """Test modes must be adjacent and phases are wrapped."""
        with pytest.raises(DimensionError, match="adjacent"):
            MziSetting(theta=0.0, phi=0.0, modes=(0, 2))
        s = MziSetting(theta=-math.pi / 2, phi=3 * math.pi, modes=(0, 1))
        assert s.theta == pytest.approx(3 * math.pi / 2)
        assert s.phi == pytest.approx(math.pi)


class TestDecompose:
    """Test rectangular decomposition of arbitrary unitaries."""

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 6, 8])
    def test_haar_round_trip(self, n):
        """Test reconstruction error and MZI count on Haar-random unitaries."""
        for seed in range(10):
            u = haar_unitary(n, seed)
            program = decompose(u)
            assert len(program.settings) == n * (n - 1) // 2
            assert np.max(np.abs(reconstruct(program) - u)) < 1e-10

    @pytest.mark.parametrize("n", [3, 8])
    def test_bulk_round_trip(self, n):
        """Test a thousand Haar-random unitaries reconstruct to 1e-10."""
        for seed in range(1000):
            u = haar_unitary(n, 10_000 + seed)
            assert np.max(np.abs(reconstruct(decompose(u)) - u)) < 1e-10

    def test_identity(self):
        """Test the identity compiles to bar-state MZIs."""
        program = decompose(np.eye(4))
        assert np.max(np.abs(reconstruct(program) - np.eye(4))) < 1e-12
        for s in program.settings:
            assert phase_distance(s.theta, math.pi) < 1e-9

    def test_non_unitary_rejected(self):
        """Test the unitarity precondition."""
        with pytest.raises(PreconditionError) as exc_info:
            decompose(0.9 * np.eye(3))
        assert exc_info.value.residual == pytest.approx(0.19)

    def test_oversized_rejected(self):
        """Test the mode limit."""
        with pytest.raises(DimensionError):
            decompose(np.eye(17))

    def test_program_serialization(self):
        """Test a program survives its dictionary form."""
        program = decompose(haar_unitary(4, 5))
        restored = MeshProgram.from_dict(program.to_dict())
        np.testing.assert_allclose(
            reconstruct(restored), reconstruct(program), atol=1e-12
        )
        with pytest.raises(InvalidConfigError):
            MeshProgram.from_dict({"n_modes": 2})


class TestCpaMesh:
    """Test the three-MZI CPA mesh against its closed form."""

    def test_layout(self):
        """Test MZI placement and traversal order."""
        program = compile_cpa(solve_type1(0.3))
        assert [s.modes for s in program.settings] == [(0, 1), (1, 2), (0, 1)]
        assert [s.layer for s in program.settings] == [0, 1, 2]

    def test_reproduces_dilation(self):
        """Test the mesh equals the dilated unitary for every device."""
        for bs in _devices():
            program = compile_cpa(bs)
            target = cpa_dilation(bs).matrix
            assert np.max(np.abs(reconstruct(program) - target)) < 1e-10
            signal = reconstruct(program)[:2, :2]
            np.testing.assert_allclose(signal, bs.matrix, atol=1e-10)

    def test_closed_form_phases(self):
        """Test balanced outer MZIs and the closed-form MZI2 settings."""
        for bs in _devices():
            mzi1, mzi2, mzi3 = compile_cpa(bs).settings
            theta2, delta_phi = cpa_phases(bs)
            assert phase_distance(mzi1.theta, math.pi / 2) < 1e-9
            assert phase_distance(mzi3.theta, math.pi / 2) < 1e-9
            assert phase_distance(mzi1.phi, math.pi) < 1e-9
            assert phase_distance(mzi2.theta, theta2) < 1e-9
            assert phase_distance(mzi3.phi - mzi2.phi, delta_phi) < 1e-9

    def test_theta2_values(self):
        """Test theta2 = 2 arccos(sqrt(2 alpha)) at reference points."""
        assert cpa_phases(solve_type1(0.5))[0] == pytest.approx(0.0, abs=1e-12)
        assert cpa_phases(solve_type1(0.3))[0] == pytest.approx(
            2 * math.acos(math.sqrt(0.6)), abs=1e-12
        )
        assert cpa_phases(solve_type2(0.125))[0] == pytest.approx(2 * math.pi / 3)

    def test_literal_variant(self):
        """Test the +arg form agrees for Type 1 and is off by pi for Type 2."""
        bs1, bs2 = solve_type1(0.3), solve_type2(0.3)
        assert phase_distance(cpa_phases(bs1, True)[1], cpa_phases(bs1)[1]) < 1e-12
        gap = phase_distance(cpa_phases(bs2, True)[1], cpa_phases(bs2)[1])
        assert gap == pytest.approx(math.pi)

    def test_perfect_absorbers(self):
        """Test MZI2 sits in the cross state at the absorption bound."""
        for bs in (solve_type1(0.5), solve_type2(0.5)):
            program = compile_cpa(bs)
            mzi1, mzi2, mzi3 = program.settings
            assert phase_distance(mzi2.theta, 0.0) < 1e-9
            assert phase_distance(mzi1.theta, math.pi / 2) < 1e-9
            assert phase_distance(mzi3.theta, math.pi / 2) < 1e-9
            signal = reconstruct(program)[:2, :2]
            np.testing.assert_allclose(signal, bs.matrix, atol=1e-10)

    def test_output_phase_relation(self):
        """Test delta_2 - delta_1 = pi for every absorbing device."""
        for bs in _devices():
            relation = output_phase_relation(compile_cpa(bs))
            assert abs(relation) == pytest.approx(math.pi, abs=1e-9)

    def test_output_phase_relation_random_devices(self, random_device):
        """Test delta_2 - delta_1 = +/-pi over 10,000 random lossy devices."""
        rng = np.random.default_rng(99)
        for _ in range(10_000):
            relation = output_phase_relation(compile_cpa(random_device(rng)))
            assert abs(relation) == pytest.approx(math.pi, abs=1e-8)

    def test_output_phase_relation_lossless(self, caplog):
        """Test the relation is reported as zero without a coupled ancilla."""
        with caplog.at_level("WARNING"):
            assert output_phase_relation(compile_cpa(solve_type1(0.0))) == 0.0
        assert "ancilla decoupled" in caplog.text

    def test_phase_offset(self):
        """Test the filter offset shifts only the chosen external phase."""
        program = compile_cpa(solve_type1(0.3))
        shifted = program.with_phase_offset(0, math.pi)
        assert phase_distance(shifted.settings[0].phi, 0.0) < 1e-9
        assert shifted.settings[1:] == program.settings[1:]
        assert shifted.output_phases == program.output_phases
