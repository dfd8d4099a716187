"""Polynomial least squares through the quantum QR pipeline."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..linalg import back_substitution
from ..qgs import RunConfig
from ..qipe import IpeConfig
from ..qqr import quantum_qr


@dataclass(frozen=True)
class FitProblem:
    points: tuple
    degree: int

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.points)
        object.__setattr__(self, "points", pts)
        if self.degree < 0:
            raise ValueError("degree must be >= 0")
        if len(pts) < self.degree + 1:
            raise ValueError(f"need at least {self.degree + 1} points for degree {self.degree}")
        xs = [x for x, _ in pts]
        if len(set(xs)) != len(xs):
            raise ValueError("x values must be distinct")

    @property
    def x(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def y(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])


def design_matrix(x, degree: int) -> np.ndarray:
    """Rows ``(1, x_i, x_i^2, ..., x_i^degree)``."""
    return np.vander(np.asarray(x, dtype=float), degree + 1, increasing=True)


def polyfit_qr(problem: FitProblem, cfg: RunConfig, ipe: IpeConfig) -> np.ndarray:
    """Least-squares coefficients ``(m_0, ..., m_k)``, lowest order first."""
    X = design_matrix(problem.x, problem.degree)
    qr = quantum_qr(X, cfg, ipe)
    coeffs = back_substitution(qr.R, qr.Q.conj().T @ problem.y)
    return coeffs.real


def evaluate(coeffs, x) -> np.ndarray:
    return design_matrix(x, len(coeffs) - 1) @ np.asarray(coeffs, dtype=float)


def relative_error(pred, truth) -> float:
    return float(np.linalg.norm(np.asarray(pred) - truth) / np.linalg.norm(truth))


@dataclass(frozen=True)
class FitTrial:
    r: int
    k: int
    true_coeffs: np.ndarray
    coeffs: np.ndarray
    train_error: float
    test_error: float

    def to_json(self) -> dict:
        return {
            "degree": self.k,
            "coefficients": [float(c) for c in self.coeffs],
            "train_error": self.train_error,
            "test_error": self.test_error,
        }


def fit_trial(r: int, k: int, rng: np.random.Generator, cfg: RunConfig, ipe: IpeConfig,
              n_train: int = 10, n_test: int = 100, noise: float = 0.02, true_coeffs=None) -> FitTrial:
    """Fit a degree-``k`` polynomial to noisy samples of a random degree-``r`` one.

    Coefficients are uniform on [0.3, 1] unless given; train abscissae are
    uniform on [-1, 1] and the train ordinates carry Gaussian noise of
    standard deviation ``noise``. Test ordinates are noise-free.
    """
    g = rng.uniform(0.3, 1.0, r + 1) if true_coeffs is None else np.asarray(true_coeffs, dtype=float)
    x_train = rng.uniform(-1.0, 1.0, n_train)
    y_train = evaluate(g, x_train) + noise * rng.standard_normal(n_train)
    x_test = rng.uniform(-1.0, 1.0, n_test)
    y_test = evaluate(g, x_test)
    problem = FitProblem(tuple(zip(x_train, y_train)), k)
    m = polyfit_qr(problem, cfg, ipe)
    return FitTrial(r, k, g, m,
                    relative_error(evaluate(m, x_train), y_train),
                    relative_error(evaluate(m, x_test), y_test))
