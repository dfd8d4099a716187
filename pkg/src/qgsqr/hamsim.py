"""Projector Hamiltonians, their time evolution, and qubitization cost accounting.

The evolution operator is computed exactly; imperfect qubitization is
emulated by left-multiplying a random unitary whose distance from the
identity is below the requested error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import as_vector, matrix_exponential, random_hermitian, spectral_norm

EXACT_ORTHO_TOL = 1e-12


class HamiltonianError(ValueError):
    pass


@dataclass(frozen=True)
class ProjectorHamiltonian:
    """``H = sum_n |u_n><u_n|`` over (near-)orthonormal unit vectors.

    Values are append-only: :meth:`extend` returns a new Hamiltonian and
    carries the accumulated projector along so each step costs ``O(N^2)``.
    """

    dim: int
    basis: tuple = ()
    tol_ortho: float = 1e-3
    _proj: np.ndarray | None = field(default=None, repr=False, compare=False)
    _max_overlap: float = field(default=0.0, repr=False, compare=False)

    @classmethod
    def from_vectors(cls, vectors, tol_ortho: float = 1e-3, dim: int | None = None) -> "ProjectorHamiltonian":
        vecs = [as_vector(v) for v in vectors]
        if dim is None:
            if not vecs:
                raise HamiltonianError("need a dimension for an empty basis")
            dim = vecs[0].size
        H = cls(dim=dim, tol_ortho=tol_ortho)
        for v in vecs:
            H = H.extend(v)
        return H

    def extend(self, u) -> "ProjectorHamiltonian":
        u = as_vector(u)
        if u.size != self.dim:
            raise HamiltonianError(f"vector of length {u.size} does not match dimension {self.dim}")
        if abs(np.linalg.norm(u) - 1.0) > 1e-12:
            raise HamiltonianError("basis vectors must have unit norm")
        overlap = 0.0
        if self.basis:
            overlap = float(np.max(np.abs(self.matrix_of_basis().conj().T @ u)))
            if overlap > self.tol_ortho:
                raise HamiltonianError(f"basis overlap {overlap:.3g} exceeds tol_ortho={self.tol_ortho:.3g}")
        proj = self.projector() + np.outer(u, u.conj())
        return ProjectorHamiltonian(self.dim, self.basis + (u,), self.tol_ortho, proj,
                                    max(self._max_overlap, overlap))

    @property
    def k(self) -> int:
        return len(self.basis)

    @property
    def max_overlap(self) -> float:
        return self._max_overlap

    @property
    def is_orthonormal(self) -> bool:
        """Whether the closed-form projector evolution applies."""
        return self._max_overlap <= EXACT_ORTHO_TOL

    def matrix_of_basis(self) -> np.ndarray:
        if not self.basis:
            return np.zeros((self.dim, 0), dtype=complex)
        return np.column_stack(self.basis)

    def projector(self) -> np.ndarray:
        if self._proj is None:
            return np.zeros((self.dim, self.dim), dtype=complex)
        return self._proj

    def matrix(self) -> np.ndarray:
        return self.projector()


@dataclass(frozen=True)
class LcuDecomposition:
    coefficients: tuple
    unitaries: tuple

    @property
    def alpha_sum(self) -> float:
        return float(sum(abs(a) for a in self.coefficients))

    def reconstruct(self) -> np.ndarray:
        return sum(a * V for a, V in zip(self.coefficients, self.unitaries))


def evolve_exact(H: ProjectorHamiltonian, t: float) -> np.ndarray:
    """``exp(-i H t)``.

    For an orthonormal basis this is ``I + (e^{-it} - 1) P``. If the basis is
    only approximately orthonormal the dense eigendecomposition is used
    instead; ``H.is_orthonormal`` reports which path applies.
    """
    if H.is_orthonormal:
        return np.eye(H.dim, dtype=complex) + (np.exp(-1j * t) - 1.0) * H.projector()
    return matrix_exponential(H.matrix(), t)


def evolve_with_error(H: ProjectorHamiltonian, t: float, eps0: float,
                      rng: np.random.Generator) -> np.ndarray:
    """Exact evolution perturbed to a unitary within ``eps0`` of it (spectral norm).

    Returns ``exp(-i theta K) exp(-i H t)`` with ``K`` a random Hermitian of
    unit norm and ``theta = 2 arcsin(eps0 * rho / 2)``, ``rho ~ U(0, 1]``; the
    distance to the exact evolution is then ``eps0 * rho``.
    """
    if not 0.0 < eps0 < 1.0:
        raise HamiltonianError("eps0 must lie in (0, 1)")
    K = random_hermitian(H.dim, rng)
    K /= spectral_norm(K)
    rho = 1.0 - rng.random()
    theta = 2.0 * math.asin(eps0 * rho / 2.0)
    return matrix_exponential(K, theta) @ evolve_exact(H, t)


def reflection_lcu(H: ProjectorHamiltonian) -> LcuDecomposition:
    """Write ``H`` as ``(k/2) I + sum_n (1/2)(2|u_n><u_n| - I)``."""
    if H.k == 0:
        raise HamiltonianError("empty basis")
    I = np.eye(H.dim, dtype=complex)
    coeffs = [H.k / 2.0] + [0.5] * H.k
    unitaries = [I] + [2.0 * np.outer(u, u.conj()) - I for u in H.basis]
    return LcuDecomposition(tuple(coeffs), tuple(unitaries))


@dataclass(frozen=True)
class QueryCost:
    queries: int
    gates: int
    qubits: int


def lcu_query_cost(k: int, t: float, eps: float, n_vectors: int = 1, dim: int = 2) -> QueryCost:
    """Oracle queries, extra two-qubit gates and qubits for one circuit run.

    ``queries = ceil(k t + 4 log2(1/eps))``: the qubitization cost with
    ``alpha = k`` and simulation accuracy ``eps**4``, constant factor one.
    ``n_vectors`` and ``dim`` size the qubit count.
    """
    if k < 1:
        raise HamiltonianError("k must be >= 1")
    if not 0.0 < eps < 1.0:
        raise HamiltonianError("eps must lie in (0, 1)")
    queries = math.ceil(k * t + 4.0 * math.log2(1.0 / eps))
    gates = math.ceil(math.log2(max(k, 2))) * queries
    qubits = math.ceil(math.log2(max(n_vectors, 1))) + math.ceil(math.log2(max(dim, 1))) + 3
    return QueryCost(queries, gates, qubits)
