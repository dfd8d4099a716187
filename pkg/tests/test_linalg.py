import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgsqr.linalg import (LinalgError, back_substitution, classical_gram_schmidt, classical_qr,
                          exact_eigensolve, is_hermitian, load_matrix, loss_of_orthogonality,
                          matrix_exponential, matrix_from_json, matrix_to_json, random_hermitian,
                          random_matrix_with_condition, save_matrix, spectral_norm)


def taylor_expm(H, t, terms=80, squarings=8):
    """exp(-iHt) by scaling and squaring a truncated power series."""
    X = -1j * t * np.asarray(H) / 2 ** squarings
    out = np.eye(X.shape[0], dtype=complex)
    term = np.eye(X.shape[0], dtype=complex)
    for n in range(1, terms):
        term = term @ X / n
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def charpoly_roots(H):
    """Eigenvalues from the characteristic polynomial, independent of eigh."""
    return np.sort(np.roots(np.poly(H)).real)


class TestGramSchmidt:
    def test_standard_basis_unchanged(self):
        out = classical_gram_schmidt([np.eye(2)[0], np.eye(2)[1]])
        np.testing.assert_allclose(np.column_stack(out), np.eye(2), atol=1e-15)

    def test_two_dim_hand_case(self):
        out = classical_gram_schmidt([[1, 0], [1, 1]])
        np.testing.assert_allclose(out[1], [0, 1], atol=1e-15)

    def test_exact_dependence_dropped(self):
        out = classical_gram_schmidt([[1, 0], [2, 0]], drop_tol=1e-12)
        assert len(out) == 1

    def test_rejects_empty(self):
        with pytest.raises(LinalgError):
            classical_gram_schmidt([])


class TestClassicalQr:
    def test_identity(self):
        Q, R = classical_qr(np.eye(2))
        np.testing.assert_allclose(Q, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(R, np.eye(2), atol=1e-15)

    def test_upper_triangular_input(self):
        Q, R = classical_qr([[1, 1], [0, 1]])
        np.testing.assert_allclose(Q, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(R, [[1, 1], [0, 1]], atol=1e-15)

    def test_random_reconstruction(self):
        A = random_matrix_with_condition(8, 8, 100.0, 3)
        Q, R = classical_qr(A)
        assert spectral_norm(A - Q @ R) <= 1e-12 * spectral_norm(A)
        assert loss_of_orthogonality(Q) <= 1e-12

    def test_rank_deficient_raises(self):
        with pytest.raises(LinalgError):
            classical_qr([[1, 2], [1, 2]])

    def test_wide_matrix_raises(self):
        with pytest.raises(LinalgError):
            classical_qr(np.ones((2, 3)))

    @pytest.mark.parametrize("kappa", [1.0, 1e3, 1e6])
    @pytest.mark.parametrize("n", [4, 16, 64])
    def test_round_trip_invariant(self, n, kappa):
        A = random_matrix_with_condition(n, n, kappa, n)
        Q, R = classical_qr(A)
        assert spectral_norm(A - Q @ R) <= 1e-11 * spectral_norm(A)
        assert loss_of_orthogonality(Q) <= 1e-11
        d = np.diag(R)
        assert np.all(d.real > 0) and np.all(d.imag == 0)


class TestRandomMatrix:
    @pytest.mark.parametrize("n,m,kappa", [(4, 4, 1.0), (8, 8, 100.0), (8, 4, 10.0)])
    def test_condition(self, n, m, kappa):
        A = random_matrix_with_condition(n, m, kappa, 11)
        s = np.linalg.svd(A, compute_uv=False)
        assert A.shape == (n, m)
        assert s[0] / s[-1] == pytest.approx(kappa, rel=0.01)

    def test_deterministic(self):
        a = random_matrix_with_condition(6, 6, 50.0, 2)
        b = random_matrix_with_condition(6, 6, 50.0, 2)
        assert a.tobytes() == b.tobytes()

    def test_bad_kappa(self):
        with pytest.raises(LinalgError):
            random_matrix_with_condition(4, 4, 0.5, 0)


class TestNorms:
    def test_loss_identity(self):
        assert loss_of_orthogonality(np.eye(3)) == 0.0

    def test_loss_scaled(self):
        assert loss_of_orthogonality(2 * np.eye(2)) == pytest.approx(3.0)

    def test_spectral_diag(self):
        assert spectral_norm(np.diag([3.0, -5.0])) == pytest.approx(5.0)
        assert spectral_norm(np.eye(4)) == pytest.approx(1.0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2 ** 31))
    def test_kronecker_multiplicativity(self, n, m, seed):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        B = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        assert abs(spectral_norm(np.kron(A, B)) - spectral_norm(A) * spectral_norm(B)) <= 1e-9


class TestEigensolve:
    def test_diag(self):
        vals, _ = exact_eigensolve(np.diag([2.0, -1.0]))
        np.testing.assert_allclose(vals, [-1, 2])

    def test_two_site_ising_vs_charpoly(self):
        from qgsqr.apps import ising_hamiltonian
        H = ising_hamiltonian(2)
        vals, _ = exact_eigensolve(H)
        np.testing.assert_allclose(vals, charpoly_roots(H), atol=1e-9)
        np.testing.assert_allclose(vals, [-math.sqrt(5), -1, 1, math.sqrt(5)], atol=1e-7)

    def test_two_site_heisenberg_vs_charpoly(self):
        from qgsqr.apps import heisenberg_hamiltonian
        vals, _ = exact_eigensolve(heisenberg_hamiltonian(2))
        np.testing.assert_allclose(vals, [-1, -1, -1, 3], atol=1e-7)

    def test_non_hermitian_raises(self):
        with pytest.raises(LinalgError):
            exact_eigensolve([[0, 1], [0, 0]])

    def test_hermitian_flag(self):
        assert is_hermitian(random_hermitian(5, np.random.default_rng(0)))
        assert not is_hermitian([[0, 1], [2, 0]])


class TestBackSubstitution:
    def test_identity(self):
        np.testing.assert_allclose(back_substitution(np.eye(2), [1, 2]), [1, 2])

    def test_hand_case(self):
        np.testing.assert_allclose(back_substitution([[1, 1], [0, 1]], [2, 1]), [1, 1])

    def test_singular_raises(self):
        with pytest.raises(LinalgError):
            back_substitution([[1, 1], [0, 0]], [1, 1])

    @pytest.mark.parametrize("seed", range(5))
    def test_random_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        R = np.triu(rng.standard_normal((8, 8))) + 4 * np.eye(8)
        x = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        got = back_substitution(R, R @ x)
        assert np.linalg.norm(R @ got - R @ x) <= 1e-12 * np.linalg.norm(R @ x)
        assert np.linalg.norm(got - x) <= 1e-12 * np.linalg.norm(x) * np.linalg.cond(R)


class TestMatrixExponential:
    def test_projector_at_pi(self):
        U = matrix_exponential(np.diag([1.0, 0.0]), math.pi)
        np.testing.assert_allclose(U, np.diag([-1, 1]), atol=1e-15)

    def test_zero(self):
        np.testing.assert_allclose(matrix_exponential(np.zeros((3, 3)), 2.3), np.eye(3))

    @pytest.mark.parametrize("seed", range(5))
    def test_taylor_oracle(self, seed):
        H = random_hermitian(4, np.random.default_rng(seed))
        np.testing.assert_allclose(matrix_exponential(H, 0.7), taylor_expm(H, 0.7), atol=1e-10)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 64), st.floats(-10, 10), st.integers(0, 2 ** 31))
    def test_unitarity(self, n, t, seed):
        U = matrix_exponential(random_hermitian(n, np.random.default_rng(seed)), t)
        assert spectral_norm(U.conj().T @ U - np.eye(n)) <= 1e-12


class TestJson:
    def test_round_trip(self, tmp_path):
        A = random_matrix_with_condition(3, 2, 5.0, 1)
        path = tmp_path / "a.json"
        save_matrix(path, A)
        assert load_matrix(path).tobytes() == A.tobytes()

    def test_schema(self):
        obj = matrix_to_json([[1, 2j]])
        assert obj == {"rows": 1, "cols": 2, "entries": [[1.0, 0.0], [0.0, 2.0]]}

    def test_bad_length(self):
        with pytest.raises(LinalgError):
            matrix_from_json({"rows": 2, "cols": 2, "entries": [[1, 0]]})

    def test_nan_rejected(self):
        with pytest.raises(LinalgError):
            matrix_to_json([[np.nan]])
