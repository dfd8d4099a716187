"""Gram-Schmidt orthonormalization and QR decomposition on a simulated quantum computer."""
from .hamsim import ProjectorHamiltonian, evolve_exact, evolve_with_error, lcu_query_cost
from .linalg import classical_gram_schmidt, classical_qr, loss_of_orthogonality, random_matrix_with_condition
from .qgs import CostLedger, RunConfig, StepKind, qgs_step, quantum_gram_schmidt
from .qipe import IpeConfig, estimate_inner_product, sample_count
from .qqr import QrResult, RankDeficiencyError, qr_error, quantum_qr

__version__ = "0.1.0"

__all__ = [
    "ProjectorHamiltonian", "evolve_exact", "evolve_with_error", "lcu_query_cost",
    "classical_gram_schmidt", "classical_qr", "loss_of_orthogonality", "random_matrix_with_condition",
    "CostLedger", "RunConfig", "StepKind", "qgs_step", "quantum_gram_schmidt",
    "IpeConfig", "estimate_inner_product", "sample_count",
    "QrResult", "RankDeficiencyError", "qr_error", "quantum_qr",
]
