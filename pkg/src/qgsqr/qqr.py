"""QR decomposition from quantum Gram-Schmidt plus inner-product estimation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, spectral_norm
from .qgs import CostLedger, RunConfig, StepKind, quantum_gram_schmidt
from .qipe import IpeConfig, estimate_inner_product


class RankDeficiencyError(ValueError):
    """A column was judged linearly dependent on the previous ones."""

    def __init__(self, column: int, result: "QrResult | None" = None):
        super().__init__(f"column {column} judged linearly dependent; matrix is not full column rank")
        self.column = column
        self.result = result


@dataclass
class QrResult:
    Q: np.ndarray
    R: np.ndarray
    ledger: CostLedger
    eps_used: float
    dependent_indices: list

    @property
    def full_rank(self) -> bool:
        return not self.dependent_indices


def quantum_qr(A, cfg: RunConfig, ipe: IpeConfig, on_dependent: str = "raise") -> QrResult:
    """Factor ``A ~ Q R`` with columns of ``Q`` from quantum Gram-Schmidt.

    Off-diagonal ``R[j, m] = ||a_m|| <q_j | a_m/||a_m||>`` is estimated with
    per-entry failure budget ``eps / M^2``; the diagonal is the norm of the
    classical residual ``a_m - sum_j R[j, m] q_j``. Read-out basis vectors
    carry an arbitrary global phase, so each ``q_m`` is rotated to make its
    overlap with that residual real and positive.

    A column judged dependent raises :class:`RankDeficiencyError` unless
    ``on_dependent="drop"``, in which case its ``Q`` column and ``R`` row are
    left at zero.
    """
    if on_dependent not in ("raise", "drop"):
        raise ValueError("on_dependent must be 'raise' or 'drop'")
    A = as_matrix(A)
    n, m = A.shape
    if n < m:
        raise ValueError(f"quantum_qr needs rows >= cols, got {A.shape}")
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0.0):
        raise ValueError("matrix has a zero column")

    gs = quantum_gram_schmidt([A[:, j] for j in range(m)], cfg)
    ledger = gs.ledger
    Q = np.zeros((n, m), dtype=complex)
    b = iter(gs.basis)
    for j, step in enumerate(gs.steps):
        if step.kind is StepKind.NEW_BASIS:
            Q[:, j] = next(b)
    if gs.dependent_indices and on_dependent == "raise":
        raise RankDeficiencyError(gs.dependent_indices[0])

    entry_ipe = IpeConfig(eps=ipe.eps, delta=min(ipe.delta, cfg.eps / m ** 2), mode=ipe.mode, seed=ipe.seed)
    rngs = np.random.default_rng(np.random.SeedSequence([ipe.seed, cfg.seed])).spawn(m)
    R = np.zeros((m, m), dtype=complex)
    for j1 in range(m):
        a = A[:, j1]
        a_unit = a / norms[j1]
        entry_rngs = rngs[j1].spawn(max(j1, 1))
        for j2 in range(j1):
            if j2 in gs.dependent_indices:
                continue
            val, shots = estimate_inner_product(Q[:, j2], a_unit, entry_ipe, entry_rngs[j2])
            R[j2, j1] = norms[j1] * val
            ledger.record_ipe(shots)
        if j1 in gs.dependent_indices:
            continue
        resid = a - Q[:, :j1] @ R[:j1, j1]
        overlap = np.vdot(Q[:, j1], resid)
        if abs(overlap) > 0.0:
            Q[:, j1] *= overlap / abs(overlap)
        R[j1, j1] = np.linalg.norm(resid)
    return QrResult(Q, R, ledger, cfg.eps, list(gs.dependent_indices))


def qr_error(A, Q, R) -> float:
    """Spectral norm of ``A - Q R``."""
    A, Q, R = as_matrix(A), as_matrix(Q), as_matrix(R)
    if Q.shape[1] != R.shape[0] or A.shape != (Q.shape[0], R.shape[1]):
        raise ValueError(f"shape mismatch: A {A.shape}, Q {Q.shape}, R {R.shape}")
    return spectral_norm(A - Q @ R)
