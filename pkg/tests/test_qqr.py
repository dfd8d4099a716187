import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgsqr.linalg import classical_qr, loss_of_orthogonality, random_matrix_with_condition, spectral_norm
from qgsqr.qgs import RunConfig
from qgsqr.qipe import IpeConfig
from qgsqr.qqr import RankDeficiencyError, qr_error, quantum_qr

ANALYTIC = IpeConfig(mode="analytic")


class TestQuantumQr:
    def test_identity(self):
        res = quantum_qr(np.eye(4), RunConfig(), ANALYTIC)
        np.testing.assert_allclose(res.Q, np.eye(4), atol=1e-15)
        np.testing.assert_allclose(res.R, np.eye(4), atol=1e-15)

    def test_hand_case(self):
        res = quantum_qr([[1, 1], [0, 1]], RunConfig(), ANALYTIC)
        np.testing.assert_allclose(res.Q, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(res.R, [[1, 1], [0, 1]], atol=1e-15)

    def test_random_kappa_100(self):
        A = random_matrix_with_condition(8, 8, 100.0, 4)
        res = quantum_qr(A, RunConfig(eps=1e-4), ANALYTIC)
        assert qr_error(A, res.Q, res.R) <= 1e-10
        assert loss_of_orthogonality(res.Q) <= 1e-10

    def test_matches_classical_factors(self):
        A = random_matrix_with_condition(6, 6, 10.0, 5)
        res = quantum_qr(A, RunConfig(), ANALYTIC)
        Q, R = classical_qr(A)
        np.testing.assert_allclose(res.R, R, atol=1e-12)
        np.testing.assert_allclose(res.Q, Q, atol=1e-12)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(2, 8), st.integers(0, 2 ** 31), st.sampled_from(["analytic", "sampled"]))
    def test_structure(self, n, seed, mode):
        A = random_matrix_with_condition(n + 1, n, 10.0, seed)
        res = quantum_qr(A, RunConfig(eps=0.05, mode=mode, seed=seed), IpeConfig(eps=0.2, mode=mode, seed=seed))
        assert np.all(np.tril(res.R, -1) == 0)
        assert np.all(np.diag(res.R).imag == 0) and np.all(np.diag(res.R).real >= 0)

    def test_dependent_raises(self):
        with pytest.raises(RankDeficiencyError) as exc:
            quantum_qr([[1, 1], [1, 1]], RunConfig(), ANALYTIC)
        assert exc.value.column == 1

    def test_dependent_drop(self):
        res = quantum_qr([[1, 1, 0], [1, 1, 0], [0, 0, 1]], RunConfig(), ANALYTIC, on_dependent="drop")
        assert res.dependent_indices == [1]
        assert not res.full_rank
        assert np.all(res.Q[:, 1] == 0) and np.all(res.R[1] == 0)
        A = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 1]])
        assert qr_error(A, res.Q, res.R) <= 1e-12

    def test_wide_rejected(self):
        with pytest.raises(ValueError):
            quantum_qr(np.ones((2, 3)), RunConfig(), ANALYTIC)

    def test_zero_column_rejected(self):
        with pytest.raises(ValueError):
            quantum_qr([[1, 0], [0, 0]], RunConfig(), ANALYTIC)

    def test_ledger_counts_ipe(self):
        A = random_matrix_with_condition(4, 4, 5.0, 0)
        res = quantum_qr(A, RunConfig(eps=0.1), IpeConfig(eps=0.2, delta=0.1, mode="sampled"))
        # 6 off-diagonal entries, each with two circuits
        assert res.ledger.ipe_shots > 0
        assert res.ledger.ipe_oracle_calls == 2 * res.ledger.ipe_shots


class TestEntryAccuracy:
    def test_sampled_entries_within_two_eps(self):
        eps, trials = 0.05, 100
        bad, total = 0, 0
        for t in range(trials):
            A = random_matrix_with_condition(8, 8, 10.0, 1000 + t)
            res = quantum_qr(A, RunConfig(eps=eps, seed=t), IpeConfig(eps=eps, delta=0.1, seed=t))
            _, R = classical_qr(A)
            norms = np.linalg.norm(A, axis=0)
            for j1 in range(8):
                for j2 in range(j1):
                    total += 1
                    bad += abs(res.R[j2, j1] - R[j2, j1]) >= 2 * eps * norms[j1]
        rate = bad / total
        sd = np.sqrt((eps / 2) * (1 - eps / 2) / total)
        assert rate <= eps / 2 + 3 * sd


class TestQrError:
    def test_exact_factors(self):
        A = random_matrix_with_condition(5, 5, 3.0, 1)
        Q, R = classical_qr(A)
        assert qr_error(A, Q, R) <= 1e-12

    def test_zero_r(self):
        assert qr_error(np.eye(3), np.eye(3), np.zeros((3, 3))) == pytest.approx(1.0)

    def test_matches_direct(self):
        rng = np.random.default_rng(0)
        A, Q, R = (rng.standard_normal((4, 4)) for _ in range(3))
        assert qr_error(A, Q, R) == pytest.approx(spectral_norm(A - Q @ R))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            qr_error(np.eye(3), np.eye(3), np.eye(2))
