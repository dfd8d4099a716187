"""Spin-chain Hamiltonians and unshifted QR-iteration eigenvalues."""
from __future__ import annotations

from functools import reduce

import numpy as np

from ..linalg import as_matrix, classical_qr
from ..qgs import RunConfig
from ..qipe import IpeConfig
from ..qqr import quantum_qr

MAX_SITES = 10

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


class ConvergenceError(RuntimeError):
    pass


def site_operator(ops: dict, n_sites: int) -> np.ndarray:
    """Tensor product with ``ops[i]`` on site ``i`` (site 0 most significant)."""
    return reduce(np.kron, [ops.get(i, I2) for i in range(n_sites)])


def _check_sites(n_sites: int) -> None:
    if not 1 <= n_sites <= MAX_SITES:
        raise ValueError(f"n_sites must be in [1, {MAX_SITES}]")


def ising_hamiltonian(n_sites: int, h: float = 1.0, J: float = 1.0) -> np.ndarray:
    """Open transverse-field Ising chain ``-h sum X_i - J sum Z_i Z_{i+1}``."""
    _check_sites(n_sites)
    H = -h * sum(site_operator({i: SX}, n_sites) for i in range(n_sites))
    for i in range(n_sites - 1):
        H = H - J * site_operator({i: SZ, i + 1: SZ}, n_sites)
    return H


def heisenberg_hamiltonian(n_sites: int, J: float = 1.0) -> np.ndarray:
    """Open Heisenberg chain ``-J sum (XX + YY + ZZ)`` over nearest neighbours."""
    _check_sites(n_sites)
    H = np.zeros((2 ** n_sites, 2 ** n_sites), dtype=complex)
    for i in range(n_sites - 1):
        for P in (SX, SY, SZ):
            H -= J * site_operator({i: P, i + 1: P}, n_sites)
    return H


def total_sz(n_sites: int) -> np.ndarray:
    return sum(site_operator({i: SZ}, n_sites) for i in range(n_sites))


def _blocks(A: np.ndarray, tol: float) -> list[tuple[int, int]] | None:
    """Split ``A`` into decoupled diagonal blocks of size 1 or 2, or ``None``."""
    n = A.shape[0]
    scale = max(np.abs(A).max(), 1.0)
    cut = tol * scale
    blocks = []
    i = 0
    while i < n:
        size = 1
        if i + 1 < n and abs(A[i + 1, i]) >= cut:
            size = 2
        end = i + size
        below = np.abs(A[end:, i:end]).max() if end < n else 0.0
        if below >= cut:
            return None
        blocks.append((i, end))
        i = end
    return blocks


def _block_eigenvalues(B: np.ndarray) -> list[float]:
    if B.shape == (1, 1):
        return [float(B[0, 0].real)]
    tr = B[0, 0] + B[1, 1]
    det = B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]
    disc = np.sqrt(tr * tr / 4.0 - det + 0j)
    return [float((tr / 2.0 - disc).real), float((tr / 2.0 + disc).real)]


def _qr_step(A, backend, cfg, ipe, it):
    if backend == "classical":
        return classical_qr(A)
    step_cfg = RunConfig(eps=cfg.eps, eps0=cfg.eps0, t=cfg.t, mode=cfg.mode, seed=cfg.seed + it,
                         dep_threshold=cfg.dep_threshold, inject_error=cfg.inject_error)
    res = quantum_qr(A, step_cfg, ipe)
    return res.Q, res.R


def qr_iteration(A, max_iter: int = 1000, tol: float = 1e-10, backend: str = "classical",
                 cfg: RunConfig | None = None, ipe: IpeConfig | None = None):
    """Run ``A <- R Q`` until 1x1/2x2 blocks decouple.

    Returns ``(eigenvalues ascending, final iterate, iterations used,
    history of sorted diagonals)``.
    """
    if backend not in ("classical", "quantum"):
        raise ValueError("backend must be 'classical' or 'quantum'")
    cfg = RunConfig() if cfg is None else cfg
    ipe = IpeConfig(mode="analytic") if ipe is None else ipe
    Ak = as_matrix(A).copy()
    if Ak.shape[0] != Ak.shape[1]:
        raise ValueError("matrix must be square")
    history = []
    for it in range(max_iter + 1):
        blocks = _blocks(Ak, tol)
        if blocks is not None:
            vals = sorted(v for a, b in blocks for v in _block_eigenvalues(Ak[a:b, a:b]))
            return np.array(vals), Ak, it, history
        if it == max_iter:
            break
        Q, R = _qr_step(Ak, backend, cfg, ipe, it)
        Ak = R @ Q
        history.append(np.sort(np.diag(Ak).real))
    raise ConvergenceError(f"no 1x1/2x2 block structure after {max_iter} iterations")


def qr_iteration_eigenvalues(A, max_iter: int = 1000, tol: float = 1e-10, backend: str = "classical",
                             cfg: RunConfig | None = None, ipe: IpeConfig | None = None) -> np.ndarray:
    """Eigenvalues (ascending) of a full-rank Hermitian matrix by QR iteration."""
    return qr_iteration(A, max_iter, tol, backend, cfg, ipe)[0]
