"""Linear-system classification and the Dirichlet Laplace solver built on it."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..hamsim import ProjectorHamiltonian
from ..linalg import as_matrix, as_vector, back_substitution
from ..qgs import RunConfig, StepKind, qgs_step, step_rngs
from ..qipe import IpeConfig
from ..qqr import quantum_qr


class SolutionKind(Enum):
    NO_SOLUTION = "no_solution"
    UNIQUE = "unique"
    INFINITE = "infinite"


@dataclass
class SystemClassification:
    kind: SolutionKind
    x: np.ndarray | None = None
    evidence: dict = field(default_factory=dict)


def membership_test(basis, b, cfg: RunConfig, rng: np.random.Generator | None = None) -> tuple[bool, float]:
    """Is ``b`` in the span of the orthonormal ``basis``?

    Runs the post-selection circuit with ``H`` the projector onto the
    basis. Returns ``(in_span, p_residual)`` where ``p_residual`` is the
    exact flag-0 probability ``1 - sum |<u_n|b>|^2``.
    """
    b = as_vector(b)
    if np.linalg.norm(b) == 0.0:
        raise ValueError("b must be nonzero")
    H = ProjectorHamiltonian.from_vectors(basis, tol_ortho=cfg.tol_ortho)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    out = qgs_step(H, b, cfg, rng)
    return out.kind is StepKind.DEPENDENT, out.p_zero


def classify_linear_system(A, b, cfg: RunConfig, ipe: IpeConfig) -> SystemClassification:
    """Decide between no, a unique, or infinitely many solutions of ``A x = b``.

    A unique solution is only reported when its residual is within
    ``10 eps ||b||``; otherwise the system is reported as unsolvable.
    """
    A = as_matrix(A)
    b = as_vector(b)
    if A.shape[0] != b.size:
        raise ValueError(f"shape mismatch: A {A.shape}, b {b.shape}")
    n, m = A.shape
    if n < m:
        # more unknowns than equations: pad with zero rows so the QR
        # pipeline applies; the padded rows never affect the span test
        A = np.vstack([A, np.zeros((m - n, m))])
        b = np.concatenate([b, np.zeros(m - n)])
    # zero columns span nothing; they only make the solution non-unique
    nonzero = [j for j in range(m) if np.linalg.norm(A[:, j]) > 0.0]
    zero = [j for j in range(m) if j not in nonzero]
    if not nonzero:
        return SystemClassification(SolutionKind.NO_SOLUTION, None, {"p_residual": 1.0, "rank": 0,
                                                                     "dependent_columns": zero})
    qr = quantum_qr(A[:, nonzero], cfg, ipe, on_dependent="drop")
    keep = [j for j in range(len(nonzero)) if j not in qr.dependent_indices]
    basis = [qr.Q[:, j] for j in keep]
    in_span, p_res = membership_test(basis, b, cfg, step_rngs(cfg.seed + 1, 1)[0])
    dependent = sorted(zero + [nonzero[j] for j in qr.dependent_indices])
    evidence = {"p_residual": p_res, "rank": len(keep), "dependent_columns": dependent}
    if not in_span:
        return SystemClassification(SolutionKind.NO_SOLUTION, None, evidence)
    if dependent:
        return SystemClassification(SolutionKind.INFINITE, None, evidence)
    x = back_substitution(qr.R, qr.Q.conj().T @ b)
    resid = float(np.linalg.norm(A @ x - b))
    evidence["residual"] = resid
    if resid > 10.0 * cfg.eps * np.linalg.norm(b):
        return SystemClassification(SolutionKind.NO_SOLUTION, None, evidence)
    return SystemClassification(SolutionKind.UNIQUE, x, evidence)


# ---------------------------------------------------------------- Laplace

CHARGES = {
    "monopole": [((2.0, 0.0), 1.0)],
    "dipole": [((2.0, 0.0), 1.0), ((-2.0, 0.0), -1.0)],
    "quadrupole": [((2.0, 0.0), 1.0), ((-2.0, 0.0), -1.0), ((0.0, 2.0), 1.0), ((0.0, -2.0), -1.0)],
}


def exact_potential(case: str, x, y):
    """Point-charge potential with ``k = q = 1``; accepts scalars or arrays."""
    if case not in CHARGES:
        raise ValueError(f"unknown case {case!r}; expected one of {sorted(CHARGES)}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    phi = np.zeros(np.broadcast(x, y).shape)
    for (cx, cy), q in CHARGES[case]:
        d = np.hypot(x - cx, y - cy)
        if np.any(d == 0.0):
            raise ValueError(f"potential is singular at the charge ({cx}, {cy})")
        phi = phi + q / d
    return float(phi) if phi.ndim == 0 else phi


@dataclass
class PotentialGrid:
    """Potential on a ``G x G`` grid over [-1, 1]^2; ``values[ix, iy]``."""

    grid_size: int
    values: np.ndarray
    case: str | None = None
    exact: np.ndarray | None = None

    @property
    def coords(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, self.grid_size)

    @property
    def spacing(self) -> float:
        return 2.0 / (self.grid_size - 1)

    def interior_error(self) -> float:
        """Relative L2 error against the exact potential on interior nodes."""
        if self.exact is None:
            raise ValueError("no exact solution attached")
        u, e = self.values[1:-1, 1:-1], self.exact[1:-1, 1:-1]
        return float(np.linalg.norm(u - e) / np.linalg.norm(e))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "value", "exact", "abs_error"])
        c = self.coords
        ex = self.exact if self.exact is not None else np.full_like(self.values, np.nan)
        for i in range(self.grid_size):
            for j in range(self.grid_size):
                w.writerow([repr(float(c[i])), repr(float(c[j])), repr(float(self.values[i, j])),
                            repr(float(ex[i, j])), repr(float(abs(self.values[i, j] - ex[i, j])))])
        return buf.getvalue()


def laplace_system(boundary: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """5-point-stencil system ``A u = b`` for the interior of a square grid.

    ``boundary`` is a ``G x G`` array whose edge entries hold the Dirichlet
    data; interior entries are ignored. Unknowns are ordered ``ix``-major.
    """
    G = boundary.shape[0]
    n = G - 2
    A = np.zeros((n * n, n * n))
    rhs = np.zeros(n * n)

    def idx(i, j):
        return (i - 1) * n + (j - 1)

    for i in range(1, G - 1):
        for j in range(1, G - 1):
            r = idx(i, j)
            A[r, r] = 4.0
            for ii, jj in ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)):
                if ii in (0, G - 1) or jj in (0, G - 1):
                    rhs[r] += boundary[ii, jj]
                else:
                    A[r, idx(ii, jj)] = -1.0
    return A, rhs


def solve_dirichlet(boundary_fn, G: int, cfg: RunConfig, ipe: IpeConfig) -> np.ndarray:
    """Grid values of the discrete harmonic function with edge data ``boundary_fn(x, y)``."""
    if G < 5:
        raise ValueError("grid size must be >= 5")
    c = np.linspace(-1.0, 1.0, G)
    X, Y = np.meshgrid(c, c, indexing="ij")
    full = np.asarray(boundary_fn(X, Y), dtype=float)
    grid = np.zeros((G, G))
    grid[0, :], grid[-1, :], grid[:, 0], grid[:, -1] = full[0, :], full[-1, :], full[:, 0], full[:, -1]
    A, rhs = laplace_system(grid)
    sol = classify_linear_system(A, rhs, cfg, ipe)
    if sol.kind is not SolutionKind.UNIQUE:
        raise RuntimeError(f"Laplace system classified as {sol.kind.value}: {sol.evidence}")
    grid[1:-1, 1:-1] = sol.x.real.reshape(G - 2, G - 2)
    return grid


def laplace_dirichlet_solve(case: str, G: int = 17, cfg: RunConfig | None = None,
                            ipe: IpeConfig | None = None) -> PotentialGrid:
    cfg = RunConfig() if cfg is None else cfg
    ipe = IpeConfig(mode="analytic") if ipe is None else ipe
    values = solve_dirichlet(lambda x, y: exact_potential(case, x, y), G, cfg, ipe)
    c = np.linspace(-1.0, 1.0, G)
    X, Y = np.meshgrid(c, c, indexing="ij")
    return PotentialGrid(G, values, case, exact_potential(case, X, Y))


def electric_field(grid: PotentialGrid) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference ``-grad(phi)`` on interior nodes as ``(Ex, Ey)``."""
    if grid.grid_size < 3:
        raise ValueError("grid size must be >= 3")
    u, h = grid.values, grid.spacing
    ex = -(u[2:, 1:-1] - u[:-2, 1:-1]) / (2.0 * h)
    ey = -(u[1:-1, 2:] - u[1:-1, :-2]) / (2.0 * h)
    return ex, ey
