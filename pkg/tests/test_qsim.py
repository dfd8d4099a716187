import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgsqr.hamsim import ProjectorHamiltonian, evolve_exact
from qgsqr.linalg import random_unitary
from qgsqr.qsim import (DataState, SimulationError, StateVector, amplitude_encode, apply_controlled_unitary,
                        apply_flag_hadamard, apply_flag_sdg, branch_probability, measure_flag, padded_dim,
                        qpe_circuit_state, qpe_circuit_unitary, readout)

SQ2 = 1 / math.sqrt(2)


def random_orthonormal(n, k, rng):
    Z = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    Q, _ = np.linalg.qr(Z)
    return [Q[:, j] for j in range(k)]


class TestEncode:
    def test_basis_state(self):
        s = amplitude_encode([1, 0, 0, 0])
        assert s.amplitudes[0] == 1 and s.norm == pytest.approx(1.0)
        assert s.data_dim == 4

    def test_normalizes(self):
        np.testing.assert_allclose(amplitude_encode([3, 4]).flag0, [0.6, 0.8])

    def test_pads_to_power_of_two(self):
        s = amplitude_encode([1, 1, 1])
        np.testing.assert_allclose(s.flag0, np.array([1, 1, 1, 0]) / math.sqrt(3))
        assert s.orig_dim == 3

    def test_zero_vector(self):
        with pytest.raises(SimulationError):
            amplitude_encode([0, 0])

    def test_state_is_immutable(self):
        s = amplitude_encode([1, 0])
        with pytest.raises(ValueError):
            s.amplitudes[0] = 2

    @pytest.mark.parametrize("n,expected", [(1, 1), (2, 2), (3, 4), (8, 8), (9, 16)])
    def test_padded_dim(self, n, expected):
        assert padded_dim(n) == expected


class TestFlagGates:
    def test_hadamard_splits(self):
        s = apply_flag_hadamard(amplitude_encode([1, 0]))
        np.testing.assert_allclose(s.amplitudes, [SQ2, 0, SQ2, 0])

    def test_hadamard_squared(self):
        s = amplitude_encode([0.2, 0.5j, -0.1])
        np.testing.assert_allclose(apply_flag_hadamard(apply_flag_hadamard(s)).amplitudes, s.amplitudes,
                                   atol=1e-14)

    def test_minus_state_to_one(self):
        s = StateVector.from_branches([SQ2, 0], [-SQ2, 0])
        np.testing.assert_allclose(apply_flag_hadamard(s).amplitudes, [0, 0, 1, 0], atol=1e-15)

    def test_sdg_phase(self):
        s = StateVector.from_branches([0, 0], [1, 0])
        np.testing.assert_allclose(apply_flag_sdg(s).flag1, [-1j, 0])


class TestControlledUnitary:
    def test_identity(self):
        s = apply_flag_hadamard(amplitude_encode([0.3, 0.4]))
        np.testing.assert_allclose(apply_controlled_unitary(s, np.eye(2)).amplitudes, s.amplitudes)

    def test_phase_kickback(self):
        s = apply_flag_hadamard(amplitude_encode([1, 0]))
        out = apply_controlled_unitary(s, np.diag([-1, 1]))
        np.testing.assert_allclose(out.amplitudes, [SQ2, 0, -SQ2, 0])

    def test_non_unitary_rejected(self):
        with pytest.raises(SimulationError):
            apply_controlled_unitary(amplitude_encode([1, 0]), [[1, 1], [0, 1]])

    def test_lifts_onto_padding(self):
        s = apply_flag_hadamard(amplitude_encode([1, 1, 1]))
        out = apply_controlled_unitary(s, -np.eye(3))
        np.testing.assert_allclose(out.flag1[:3], -s.flag1[:3])

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 16), st.integers(0, 2 ** 31))
    def test_norm_preserved(self, n, seed):
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        s = apply_flag_hadamard(amplitude_encode(v))
        s = apply_controlled_unitary(s, random_unitary(n, rng))
        assert abs(s.norm - 1.0) <= 1e-13
        assert abs(apply_flag_sdg(s).norm - 1.0) <= 1e-13
        assert abs(apply_flag_hadamard(s).norm - 1.0) <= 1e-13


class TestMeasure:
    def test_impossible_branch(self):
        with pytest.raises(SimulationError):
            measure_flag(StateVector.from_branches([0, 0], [1, 0]), "analytic", bit=0)

    def test_even_split(self):
        s = StateVector.from_branches([SQ2, 0], [0, SQ2])
        m = measure_flag(s, "analytic", bit=0)
        assert m.probability == pytest.approx(0.5)
        np.testing.assert_allclose(m.collapsed.amplitudes, [1, 0])

    def test_sampled_frequency(self):
        s = StateVector.from_branches([0.5, 0], [0, math.sqrt(0.75)])
        rng = np.random.default_rng(0)
        zeros = sum(measure_flag(s, "sampled", rng).bit == 0 for _ in range(100_000))
        assert 0.24 <= zeros / 100_000 <= 0.26

    def test_sampled_needs_rng(self):
        with pytest.raises(SimulationError):
            measure_flag(amplitude_encode([1]), "sampled")


class TestReadout:
    def test_round_trip(self):
        s = amplitude_encode([3, 4])
        np.testing.assert_allclose(readout(DataState(s.flag0, s.orig_dim)), [0.6, 0.8])

    def test_phase_convention(self):
        np.testing.assert_allclose(readout(DataState(np.array([0, 1j]), 2)), [0, 1])

    def test_truncates_padding(self):
        s = amplitude_encode([1, 2, 3])
        assert readout(DataState(s.flag0, s.orig_dim)).shape == (3,)


class TestQpeCircuit:
    @pytest.mark.parametrize("seed", range(100))
    def test_pre_measurement_identity(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 17))
        k = int(rng.integers(1, n + 1))
        us = random_orthonormal(n, k, rng)
        a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        a /= np.linalg.norm(a)
        U = evolve_exact(ProjectorHamiltonian.from_vectors(us), math.pi)
        s = qpe_circuit_state(a, U)
        proj = sum(np.vdot(u, a) * u for u in us)
        m = padded_dim(n)
        np.testing.assert_allclose(s.flag1[:n], proj, atol=1e-12)
        np.testing.assert_allclose(s.flag0[:n], a - proj, atol=1e-12)
        assert np.all(np.abs(s.flag0[n:m]) <= 1e-12)
        if branch_probability(s, 0) > 1e-10:
            post = measure_flag(s, "analytic", bit=0).collapsed.amplitudes[:n]
            assert max(abs(np.vdot(u, post)) for u in us) <= 1e-12

    def test_circuit_matrix_matches_state(self):
        rng = np.random.default_rng(5)
        U = random_unitary(4, rng)
        a = np.array([0.5, 0.5, 0.5, 0.5])
        W = qpe_circuit_unitary(U)
        np.testing.assert_allclose(W @ np.concatenate([a, np.zeros(4)]), qpe_circuit_state(a, U).amplitudes,
                                   atol=1e-14)
