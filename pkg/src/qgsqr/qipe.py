"""Inner-product estimation with single-ancilla Hadamard tests.

The real-part circuit prepares ``(|0>(|x>+|y>) + |1>(|x>-|y>)) / 2`` so the
flag reads 0 with probability ``(1 + Re<x|y>) / 2``. The imaginary-part
circuit inserts ``S^dagger`` on the flag before the closing Hadamard,
giving ``(1 + Im<x|y>) / 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_vector
from .qsim import StateVector, apply_flag_hadamard, apply_flag_sdg, branch_probability, pad, padded_dim

UNIT_TOL = 1e-10


class IpeError(ValueError):
    pass


@dataclass(frozen=True)
class IpeConfig:
    eps: float = 0.05
    delta: float = 0.1
    mode: str = "sampled"
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0 or not 0.0 < self.delta < 1.0:
            raise IpeError("eps and delta must lie in (0, 1)")
        if self.mode not in ("sampled", "analytic"):
            raise IpeError("mode must be 'sampled' or 'analytic'")


def sample_count(eps: float, delta: float) -> int:
    """Shots per circuit: ``ceil((16/eps^2) log2(4/delta))``."""
    if not 0.0 < eps < 1.0 or not 0.0 < delta < 1.0:
        raise IpeError("eps and delta must lie in (0, 1)")
    return math.ceil(16.0 / eps ** 2 * math.log2(4.0 / delta))


def _check_pair(x, y):
    x, y = as_vector(x), as_vector(y)
    if x.size != y.size:
        raise IpeError(f"dimension mismatch: {x.size} vs {y.size}")
    for v in (x, y):
        if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
            raise IpeError("inputs must be unit vectors")
    return x, y


def _prepared_state(x, y) -> StateVector:
    # H on the flag, then O_x on flag-0 and O_y on flag-1 (controlled preparations)
    n = padded_dim(x.size)
    return StateVector.from_branches(pad(x, n) / math.sqrt(2.0), pad(y, n) / math.sqrt(2.0), x.size)


def real_part_circuit(x, y) -> float:
    """Exact flag-0 probability of the real-part Hadamard test."""
    x, y = _check_pair(x, y)
    s = apply_flag_hadamard(_prepared_state(x, y))
    return branch_probability(s, 0)


def imag_part_circuit(x, y) -> float:
    """Exact flag-0 probability of the imaginary-part Hadamard test."""
    x, y = _check_pair(x, y)
    s = apply_flag_hadamard(apply_flag_sdg(_prepared_state(x, y)))
    return branch_probability(s, 0)


def estimate_inner_product(x, y, cfg: IpeConfig, rng: np.random.Generator | None = None) -> tuple[complex, int]:
    """Estimate ``<x|y>``; returns ``(estimate, shots_used)``.

    Sampled mode runs each circuit ``sample_count(eps, delta)`` times on its
    own random stream and maps the 0-frequency ``f`` to ``2 f - 1``. The
    estimate is not clipped to the unit disk.
    """
    p_re = real_part_circuit(x, y)
    p_im = imag_part_circuit(x, y)
    if cfg.mode == "analytic":
        return complex(2.0 * p_re - 1.0, 2.0 * p_im - 1.0), 0
    n_r = sample_count(cfg.eps, cfg.delta)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    rng_re, rng_im = rng.spawn(2)
    # counting zeros over n_r Bernoulli shots is one binomial draw
    zeros_re = rng_re.binomial(n_r, min(max(p_re, 0.0), 1.0))
    zeros_im = rng_im.binomial(n_r, min(max(p_im, 0.0), 1.0))
    est = complex(2.0 * zeros_re / n_r - 1.0, 2.0 * zeros_im / n_r - 1.0)
    return est, 2 * n_r
