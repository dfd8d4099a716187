"""Dense complex linear algebra, classical Gram-Schmidt references and test-matrix generation.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``.
Vectors are 1-D arrays; matrices are 2-D arrays. Every routine here is a
pure function of its arguments.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

RANK_TOL = 1e-12
HERMITIAN_TOL = 1e-12


class LinalgError(ValueError):
    """Raised on shape mismatches, rank deficiency and invalid matrix inputs."""


def as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise LinalgError(f"expected a non-empty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise LinalgError("vector has non-finite entries")
    return arr


def as_matrix(M) -> np.ndarray:
    arr = np.asarray(M, dtype=complex)
    if arr.ndim != 2 or arr.size == 0:
        raise LinalgError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise LinalgError("matrix has non-finite entries")
    return arr


def is_hermitian(H, atol: float = HERMITIAN_TOL) -> bool:
    H = np.asarray(H)
    return H.ndim == 2 and H.shape[0] == H.shape[1] and bool(np.allclose(H, H.conj().T, rtol=0.0, atol=atol))


def _require_hermitian(H) -> np.ndarray:
    H = as_matrix(H)
    if not is_hermitian(H):
        raise LinalgError("matrix is not Hermitian")
    return H


def spectral_norm(M) -> float:
    """Largest singular value of ``M``."""
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return 0.0
    if M.ndim == 1:
        return float(np.linalg.norm(M))
    return float(np.linalg.norm(M, 2))


def loss_of_orthogonality(Q) -> float:
    """Spectral norm of ``Q^H Q - I``."""
    Q = as_matrix(Q)
    G = Q.conj().T @ Q
    return spectral_norm(G - np.eye(G.shape[0]))


def classical_gram_schmidt(vectors, drop_tol: float = RANK_TOL, passes: int = 1) -> list[np.ndarray]:
    """Orthonormalize a sequence of vectors with classical Gram-Schmidt.

    Parameters
    ----------
    vectors : sequence of array_like
        Input vectors, all of the same dimension.
    drop_tol : float
        Vectors whose residual norm after projection is ``<= drop_tol``
        (absolute) are treated as dependent and dropped.
    passes : int
        Number of projection sweeps per vector. ``passes=2`` is classical
        Gram-Schmidt with one re-orthogonalization.

    Returns
    -------
    list of ndarray
        Orthonormal vectors spanning the same space as the input.
    """
    if drop_tol < 0:
        raise LinalgError("drop_tol must be non-negative")
    vecs = [as_vector(v) for v in vectors]
    if not vecs:
        raise LinalgError("empty input")
    dim = vecs[0].size
    if any(v.size != dim for v in vecs):
        raise LinalgError("dimension mismatch among input vectors")

    basis: list[np.ndarray] = []
    for v in vecs:
        r = v.copy()
        for _ in range(passes):
            if basis:
                B = np.column_stack(basis)
                r = r - B @ (B.conj().T @ r)
        nrm = np.linalg.norm(r)
        if nrm > drop_tol:
            basis.append(r / nrm)
    return basis


def classical_qr(A, passes: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Gram-Schmidt QR factorization with real positive diagonal in ``R``.

    ``passes=1`` is textbook classical Gram-Schmidt; the default applies one
    re-orthogonalization sweep so ``Q`` stays orthonormal to working
    precision for ill-conditioned input.
    """
    A = as_matrix(A)
    n, m = A.shape
    if n < m:
        raise LinalgError(f"classical_qr needs rows >= cols, got {A.shape}")
    scale = spectral_norm(A)
    Q = np.zeros((n, m), dtype=complex)
    R = np.zeros((m, m), dtype=complex)
    for j in range(m):
        r = A[:, j].copy()
        for _ in range(passes):
            c = Q[:, :j].conj().T @ r
            r = r - Q[:, :j] @ c
            R[:j, j] += c
        d = np.linalg.norm(r)
        if d <= RANK_TOL * scale:
            raise LinalgError(f"matrix is rank deficient at column {j}")
        R[j, j] = d
        Q[:, j] = r / d
    return Q, R


def random_matrix_with_condition(n: int, m: int, kappa: float, seed: int) -> np.ndarray:
    """Random complex ``n x m`` matrix with 2-norm condition number ``kappa``.

    Built as ``U diag(s) V^H`` with Haar-distributed ``U``, ``V`` and singular
    values log-spaced from 1 down to ``1/kappa``.
    """
    if n < m:
        raise LinalgError("need n >= m")
    if m < 1:
        raise LinalgError("need m >= 1")
    if not kappa >= 1.0:
        raise LinalgError("kappa must be >= 1")
    rng = np.random.default_rng(seed)
    U = _haar_isometry(rng, n, m)
    V = _haar_isometry(rng, m, m)
    s = np.logspace(0.0, -np.log10(kappa), m)
    return (U * s) @ V.conj().T


def _haar_isometry(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    Z = (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random ``n x n`` unitary."""
    return _haar_isometry(rng, n, n)


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (Z + Z.conj().T) / 2.0


def exact_eigensolve(H) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    H = _require_hermitian(H)
    w, V = np.linalg.eigh((H + H.conj().T) / 2.0)
    return w, V


def back_substitution(R, y) -> np.ndarray:
    """Solve ``R x = y`` for square upper-triangular ``R``."""
    R = as_matrix(R)
    y = as_vector(y)
    n = R.shape[0]
    if R.shape != (n, n) or y.size != n:
        raise LinalgError(f"shape mismatch: R {R.shape}, y {y.shape}")
    diag = np.abs(np.diag(R))
    if np.any(diag <= 1e-14 * spectral_norm(R)):
        raise LinalgError("singular diagonal in back substitution")
    x = np.zeros(n, dtype=complex)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - R[i, i + 1:] @ x[i + 1:]) / R[i, i]
    return x


def matrix_exponential(H, t: float) -> np.ndarray:
    """``exp(-i H t)`` for Hermitian ``H`` via its eigendecomposition."""
    w, V = exact_eigensolve(H)
    return (V * np.exp(-1j * w * t)) @ V.conj().T


def matrix_to_json(M) -> dict:
    """Repo-wide JSON form; vectors are stored as ``dim x 1`` matrices."""
    arr = np.asarray(M)
    arr = as_vector(arr)[:, None] if arr.ndim == 1 else as_matrix(arr)
    rows, cols = arr.shape
    return {
        "rows": int(rows),
        "cols": int(cols),
        "entries": [[float(z.real), float(z.imag)] for z in arr.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    entries = obj["entries"]
    if len(entries) != rows * cols:
        raise LinalgError(f"expected {rows * cols} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries], dtype=complex)
    return flat.reshape(rows, cols)


def save_matrix(path, M) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(M)))


def load_matrix(path) -> np.ndarray:
    return matrix_from_json(json.loads(Path(path).read_text()))
