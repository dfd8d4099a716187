"""Quantum Gram-Schmidt orthonormalization by flag post-selection.

Each new input vector is loaded into the data register and pushed through
H, controlled-``exp(-i pi P)``, H where ``P`` projects onto the basis found
so far. Flag outcome 0 leaves the data register in the normalized residual,
which becomes the next basis vector; if ``w`` consecutive runs all return 1
the input is declared linearly dependent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .hamsim import ProjectorHamiltonian, evolve_exact, evolve_with_error, lcu_query_cost
from .linalg import as_vector
from .qsim import (
    DataState,
    amplitude_encode,
    apply_controlled_unitary,
    apply_flag_hadamard,
    branch_probability,
    measure_flag,
    readout,
)

MODES = ("sampled", "analytic")


class QgsError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Knobs for one quantum Gram-Schmidt / QR run.

    ``eps0`` defaults to ``eps**4``, ``t`` to ``pi`` and ``dep_threshold``
    (analytic mode only) to ``eps**2``.
    """

    eps: float = 1e-4
    eps0: float | None = None
    t: float = math.pi
    mode: str = "analytic"
    seed: int = 0
    dep_threshold: float | None = None
    inject_error: bool = False

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise QgsError("eps must lie in (0, 1)")
        if self.mode not in MODES:
            raise QgsError(f"mode must be one of {MODES}")
        if self.eps0 is None:
            object.__setattr__(self, "eps0", self.eps ** 4)
        if self.dep_threshold is None:
            object.__setattr__(self, "dep_threshold", self.eps ** 2)
        if not 0.0 < self.eps0 < 1.0:
            raise QgsError("eps0 must lie in (0, 1)")

    @property
    def tol_ortho(self) -> float:
        return 10.0 * self.eps


@dataclass
class StepCost:
    k: int
    runs: int
    queries: int


@dataclass
class CostLedger:
    """Oracle-query and gate tallies.

    ``oracle_queries`` counts qubitization queries of the Gram-Schmidt
    circuits (one entry per step in ``per_step``); ``ipe_oracle_calls``
    counts state-preparation calls spent on inner-product estimation.
    """

    n_vectors: int = 1
    dim: int = 2
    oracle_queries: int = 0
    two_qubit_gates: int = 0
    circuit_runs: int = 0
    ipe_oracle_calls: int = 0
    ipe_shots: int = 0
    per_step: list = field(default_factory=list)

    def record_step(self, k: int, runs: int, eps: float, t: float) -> StepCost:
        cost = lcu_query_cost(k, t, eps, self.n_vectors, self.dim)
        step = StepCost(k, runs, runs * cost.queries)
        self.per_step.append(step)
        self.oracle_queries += step.queries
        self.two_qubit_gates += runs * cost.gates
        self.circuit_runs += runs
        return step

    def record_ipe(self, shots: int) -> None:
        self.ipe_shots += shots
        self.ipe_oracle_calls += 2 * shots

    @property
    def qubits(self) -> int:
        return lcu_query_cost(1, math.pi, 0.5, self.n_vectors, self.dim).qubits

    @property
    def total_queries(self) -> int:
        return self.oracle_queries + self.ipe_oracle_calls

    def to_dict(self) -> dict:
        return {
            "oracle_queries": self.oracle_queries,
            "two_qubit_gates": self.two_qubit_gates,
            "circuit_runs": self.circuit_runs,
            "ipe_oracle_calls": self.ipe_oracle_calls,
            "ipe_shots": self.ipe_shots,
            "qubits": self.qubits,
            "per_step": [[s.k, s.runs, s.queries] for s in self.per_step],
        }


class StepKind(Enum):
    NEW_BASIS = "new_basis"
    DEPENDENT = "dependent"


@dataclass(frozen=True)
class StepOutcome:
    kind: StepKind
    vector: np.ndarray | None
    p_zero: float
    runs_used: int
    raw_state: np.ndarray | None = None


def repetition_bound(eps: float) -> int:
    """Runs needed before declaring dependence: ``ceil(ln(1/eps) / eps)``."""
    if not 0.0 < eps < 1.0:
        raise QgsError("eps must lie in (0, 1)")
    return math.ceil(math.log(1.0 / eps) / eps)


def dependence_posterior_tail(eps: float, w: int) -> float:
    """Posterior mass on ``p < eps`` after ``w`` straight flag-1 outcomes.

    With a uniform prior the posterior density is ``(w+1)(1-p)^w``, whose
    integral over ``[0, eps]`` is ``1 - (1-eps)^(w+1)``.
    """
    if w < 0:
        raise QgsError("w must be non-negative")
    return -math.expm1((w + 1) * math.log1p(-eps))


def orthogonality_error_bound(eps0: float, p: float) -> float:
    """Bound ``2 eps0 / p^{3/2}`` on the overlap of a new basis vector with old ones."""
    if p <= 0.0:
        raise QgsError("p must be positive")
    return 2.0 * eps0 / p ** 1.5


def step_unitary(basis: ProjectorHamiltonian, cfg: RunConfig, rng: np.random.Generator) -> np.ndarray:
    if cfg.inject_error:
        return evolve_with_error(basis, cfg.t, cfg.eps0, rng)
    return evolve_exact(basis, cfg.t)


def qgs_step(basis: ProjectorHamiltonian, a, cfg: RunConfig, rng: np.random.Generator,
             ledger: CostLedger | None = None) -> StepOutcome:
    """Try to extend ``basis`` by the part of ``a`` orthogonal to it.

    One evolution operator is drawn per step and reused by every run of
    the step.
    """
    a = as_vector(a)
    if a.size != basis.dim:
        raise QgsError(f"vector of length {a.size} does not match basis dimension {basis.dim}")
    if np.linalg.norm(a) == 0.0:
        raise QgsError("zero input vector")

    U = step_unitary(basis, cfg, rng)
    s = amplitude_encode(a)
    s = apply_flag_hadamard(s)
    s = apply_controlled_unitary(s, U)
    s = apply_flag_hadamard(s)
    p_zero = branch_probability(s, 0) / (s.norm ** 2)
    w = repetition_bound(cfg.eps)

    if cfg.mode == "analytic":
        if p_zero < cfg.dep_threshold:
            outcome = StepOutcome(StepKind.DEPENDENT, None, p_zero, w)
        else:
            m = measure_flag(s, "analytic", bit=0)
            outcome = StepOutcome(StepKind.NEW_BASIS, readout(m.collapsed), p_zero, 1, m.collapsed.amplitudes)
    else:
        outcome = StepOutcome(StepKind.DEPENDENT, None, p_zero, w)
        for run in range(1, w + 1):
            m = measure_flag(s, "sampled", rng)
            if m.bit == 0:
                outcome = StepOutcome(StepKind.NEW_BASIS, readout(m.collapsed), p_zero, run,
                                      m.collapsed.amplitudes)
                break

    if ledger is not None and basis.k > 0:
        ledger.record_step(basis.k, outcome.runs_used, cfg.eps, cfg.t)
    return outcome


@dataclass
class QgsResult:
    basis: list
    ledger: CostLedger
    dependent_indices: list
    steps: list

    def __iter__(self):
        # unpacks as (basis, ledger, dependent_indices)
        return iter((self.basis, self.ledger, self.dependent_indices))

    def matrix(self) -> np.ndarray:
        return np.column_stack(self.basis)


def step_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """Independent per-step generators derived from one master seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def quantum_gram_schmidt(vectors, cfg: RunConfig) -> QgsResult:
    """Orthonormalize ``vectors`` in order, skipping those judged dependent."""
    vecs = [as_vector(v) for v in vectors]
    if not vecs:
        raise QgsError("empty input")
    dim = vecs[0].size
    if any(v.size != dim for v in vecs):
        raise QgsError("dimension mismatch among input vectors")
    if any(np.linalg.norm(v) == 0.0 for v in vecs):
        raise QgsError("zero vector in input")

    ledger = CostLedger(n_vectors=len(vecs), dim=dim)
    rngs = step_rngs(cfg.seed, len(vecs))
    u1 = readout(_encoded(vecs[0]))
    H = ProjectorHamiltonian.from_vectors([u1], tol_ortho=cfg.tol_ortho)
    basis = [u1]
    dependent: list[int] = []
    steps: list[StepOutcome] = [StepOutcome(StepKind.NEW_BASIS, u1, 1.0, 1)]
    for idx in range(1, len(vecs)):
        out = qgs_step(H, vecs[idx], cfg, rngs[idx], ledger)
        steps.append(out)
        if out.kind is StepKind.DEPENDENT:
            dependent.append(idx)
            continue
        u = out.vector / np.linalg.norm(out.vector)
        H = H.extend(u)
        basis.append(u)
    return QgsResult(basis, ledger, dependent, steps)


def _encoded(v) -> DataState:
    s = amplitude_encode(v)
    return DataState(s.flag0, s.orig_dim)
