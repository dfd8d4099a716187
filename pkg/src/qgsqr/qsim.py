"""Statevector simulation of the one-flag-qubit phase-estimation circuit.

The register layout is ``flag (x) data``: amplitude index ``f * N + n`` holds
flag bit ``f`` and data basis state ``n``, with ``N`` a power of two.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, as_vector, spectral_norm

_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
_SDG = np.array([[1.0, 0.0], [0.0, -1.0j]], dtype=complex)

NORM_TOL = 1e-12
UNITARY_TOL = 1e-10
IMPOSSIBLE_BRANCH = 1e-14


class SimulationError(ValueError):
    pass


def padded_dim(n: int) -> int:
    """Smallest power of two ``>= n``."""
    if n < 1:
        raise SimulationError("dimension must be positive")
    return 1 << (n - 1).bit_length()


@dataclass(frozen=True)
class StateVector:
    """Joint flag/data state.

    ``amplitudes`` has length ``2 * data_dim``; ``orig_dim`` remembers the
    unpadded vector length so :func:`readout` can truncate.
    """

    amplitudes: np.ndarray
    data_dim: int
    orig_dim: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2 * self.data_dim,):
            raise SimulationError(f"expected {2 * self.data_dim} amplitudes, got {amps.shape}")
        if self.data_dim & (self.data_dim - 1):
            raise SimulationError("data_dim must be a power of two")
        if not self.orig_dim <= self.data_dim:
            raise SimulationError("orig_dim exceeds data_dim")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def flag0(self) -> np.ndarray:
        return self.amplitudes[: self.data_dim]

    @property
    def flag1(self) -> np.ndarray:
        return self.amplitudes[self.data_dim:]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @classmethod
    def from_branches(cls, flag0, flag1, orig_dim: int | None = None) -> "StateVector":
        flag0 = np.asarray(flag0, dtype=complex)
        flag1 = np.asarray(flag1, dtype=complex)
        n = flag0.size
        return cls(np.concatenate([flag0, flag1]), n, n if orig_dim is None else orig_dim)


@dataclass(frozen=True)
class DataState:
    """Data register alone, after the flag has been measured."""

    amplitudes: np.ndarray
    orig_dim: int

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class MeasurementOutcome:
    bit: int
    probability: float
    collapsed: DataState


def pad(v, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=complex)
    out[: v.size] = v
    return out


def amplitude_encode(v, data_dim: int | None = None) -> StateVector:
    """Load ``v / ||v||`` into the data register with the flag in ``|0>``."""
    v = as_vector(v)
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise SimulationError("cannot encode the zero vector")
    n = padded_dim(v.size) if data_dim is None else data_dim
    if n < v.size or n != padded_dim(n):
        raise SimulationError(f"data_dim {n} cannot hold a length-{v.size} vector")
    return StateVector.from_branches(pad(v / nrm, n), np.zeros(n, dtype=complex), v.size)


def apply_flag_gate(s: StateVector, gate: np.ndarray) -> StateVector:
    a0, a1 = s.flag0, s.flag1
    return StateVector.from_branches(
        gate[0, 0] * a0 + gate[0, 1] * a1,
        gate[1, 0] * a0 + gate[1, 1] * a1,
        s.orig_dim,
    )


def apply_flag_hadamard(s: StateVector) -> StateVector:
    return apply_flag_gate(s, _H)


def apply_flag_sdg(s: StateVector) -> StateVector:
    return apply_flag_gate(s, _SDG)


def _check_unitary(U: np.ndarray, n: int) -> None:
    if U.shape != (n, n):
        raise SimulationError(f"unitary shape {U.shape} does not match data dimension {n}")
    D = U.conj().T @ U - np.eye(n)
    # Frobenius bounds the spectral norm; the SVD only runs when it is inconclusive
    if np.linalg.norm(D) > UNITARY_TOL and spectral_norm(D) > UNITARY_TOL:
        raise SimulationError("controlled operator is not unitary")


def lift_unitary(U, data_dim: int) -> np.ndarray:
    """Extend ``U`` acting on the unpadded space by the identity on padding."""
    U = as_matrix(U)
    if U.shape == (data_dim, data_dim):
        return U
    k = U.shape[0]
    if U.shape != (k, k) or k > data_dim:
        raise SimulationError(f"cannot lift {U.shape} onto data dimension {data_dim}")
    out = np.eye(data_dim, dtype=complex)
    out[:k, :k] = U
    return out


def apply_controlled_unitary(s: StateVector, U) -> StateVector:
    """Apply ``U`` to the data register on the flag-``|1>`` branch."""
    U = lift_unitary(U, s.data_dim)
    _check_unitary(U, s.data_dim)
    return StateVector.from_branches(s.flag0, U @ s.flag1, s.orig_dim)


def branch_probability(s: StateVector, bit: int) -> float:
    branch = s.flag0 if bit == 0 else s.flag1
    return float(np.vdot(branch, branch).real)


def measure_flag(s: StateVector, mode: str = "sampled", rng: np.random.Generator | None = None,
                 bit: int | None = None) -> MeasurementOutcome:
    """Measure the flag qubit.

    ``mode="sampled"`` draws the outcome with ``rng``; ``mode="analytic"``
    post-selects ``bit`` deterministically and raises when that branch has
    (numerically) zero probability.
    """
    p0 = branch_probability(s, 0)
    p1 = branch_probability(s, 1)
    total = p0 + p1
    p0, p1 = p0 / total, p1 / total
    if mode == "sampled":
        if rng is None:
            raise SimulationError("sampled measurement needs an rng")
        outcome = 0 if rng.random() < p0 else 1
    elif mode == "analytic":
        if bit not in (0, 1):
            raise SimulationError("analytic measurement needs bit=0 or bit=1")
        outcome = bit
        if (p0, p1)[outcome] < IMPOSSIBLE_BRANCH:
            raise SimulationError(f"post-selection on flag={outcome} has probability {(p0, p1)[outcome]:.3g}")
    else:
        raise SimulationError(f"unknown measurement mode {mode!r}")
    prob = (p0, p1)[outcome]
    branch = s.flag0 if outcome == 0 else s.flag1
    collapsed = DataState(branch / np.linalg.norm(branch), s.orig_dim)
    return MeasurementOutcome(outcome, prob, collapsed)


def readout(d: DataState) -> np.ndarray:
    """Classical copy of a data-register state, truncated to the unpadded length.

    Measurement cannot see a global phase, so the phase is fixed by making
    the first non-negligible entry real and positive.
    """
    v = np.array(d.amplitudes[: d.orig_dim], dtype=complex)
    mags = np.abs(v)
    idx = np.flatnonzero(mags > 1e-12 * mags.max()) if mags.max() > 0 else []
    if len(idx):
        v *= np.conj(v[idx[0]]) / mags[idx[0]]
    return v


def qpe_circuit_state(v, U) -> StateVector:
    """Pre-measurement state of H, controlled-U, H on ``|0>|v>``."""
    s = amplitude_encode(v)
    s = apply_flag_hadamard(s)
    s = apply_controlled_unitary(s, U)
    return apply_flag_hadamard(s)


def qpe_circuit_unitary(U) -> np.ndarray:
    """Full ``2N x 2N`` matrix of H, controlled-U, H (flag-major ordering)."""
    U = as_matrix(U)
    n = U.shape[0]
    I = np.eye(n, dtype=complex)
    Hf = np.kron(_H, I)
    CU = np.block([[I, np.zeros((n, n))], [np.zeros((n, n)), U]])
    return Hf @ CU @ Hf
