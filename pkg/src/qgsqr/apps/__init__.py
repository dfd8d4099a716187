"""Application drivers built on the quantum QR pipeline."""
from .eigen import (ConvergenceError, heisenberg_hamiltonian, ising_hamiltonian, qr_iteration,
                    qr_iteration_eigenvalues, total_sz)
from .fitting import FitProblem, FitTrial, design_matrix, evaluate, fit_trial, polyfit_qr, relative_error
from .linsys import (PotentialGrid, SolutionKind, SystemClassification, classify_linear_system,
                     electric_field, exact_potential, laplace_dirichlet_solve, laplace_system,
                     membership_test, solve_dirichlet)

__all__ = [
    "ConvergenceError", "heisenberg_hamiltonian", "ising_hamiltonian", "qr_iteration",
    "qr_iteration_eigenvalues", "total_sz",
    "FitProblem", "FitTrial", "design_matrix", "evaluate", "fit_trial", "polyfit_qr", "relative_error",
    "PotentialGrid", "SolutionKind", "SystemClassification", "classify_linear_system",
    "electric_field", "exact_potential", "laplace_dirichlet_solve", "laplace_system",
    "membership_test", "solve_dirichlet",
]
