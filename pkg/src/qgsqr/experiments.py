"""Parameter sweeps producing tabular rows; the CLI serializes these."""
from __future__ import annotations

import numpy as np

from .apps.eigen import heisenberg_hamiltonian, ising_hamiltonian, qr_iteration
from .apps.fitting import fit_trial
from .linalg import (classical_gram_schmidt, exact_eigensolve, loss_of_orthogonality,
                     random_matrix_with_condition)
from .qgs import RunConfig, quantum_gram_schmidt
from .qipe import IpeConfig, estimate_inner_product
from .qqr import qr_error, quantum_qr


def trial_seed(*keys: int) -> int:
    """Deterministic 32-bit seed from integer keys."""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def ortho_sweep(dims, kappa=100.0, eps=1e-4, trials=10, seed=0, mode="analytic", inject_error=False):
    rows = []
    for n in dims:
        for t in range(trials):
            s = trial_seed(seed, n, t)
            A = random_matrix_with_condition(n, n, kappa, s)
            cols = [A[:, j] for j in range(n)]
            cgs = np.column_stack(classical_gram_schmidt(cols))
            cfg = RunConfig(eps=eps, mode=mode, seed=s, inject_error=inject_error)
            res = quantum_gram_schmidt(cols, cfg)
            rows.append({"N": n, "trial": t, "eta_cgs": loss_of_orthogonality(cgs),
                         "eta_qgs": loss_of_orthogonality(res.matrix())})
    return rows


def qr_sweep(dims, kappa=100.0, eps=1e-4, trials=10, seed=0, mode="analytic", ipe_mode="analytic",
             delta=0.1, inject_error=False):
    rows = []
    for n in dims:
        for t in range(trials):
            s = trial_seed(seed, n, t)
            A = random_matrix_with_condition(n, n, kappa, s)
            cfg = RunConfig(eps=eps, mode=mode, seed=s, inject_error=inject_error)
            ipe = IpeConfig(eps=min(eps, 0.5), delta=delta, mode=ipe_mode, seed=s)
            res = quantum_qr(A, cfg, ipe, on_dependent="drop")
            rows.append({"N": n, "trial": t, "eta_qr": qr_error(A, res.Q, res.R),
                         "loss_q": loss_of_orthogonality(res.Q), "dependent": len(res.dependent_indices),
                         "queries": res.ledger.total_queries})
    return rows


def qr_kappa_sweep(eps_list, kappas, dim=8, trials=20, seed=0, mode="sampled", ipe_mode="analytic", delta=0.1):
    """QR error against condition number; dependent columns are dropped."""
    rows = []
    for eps in eps_list:
        for ki, kappa in enumerate(kappas):
            for t in range(trials):
                s = trial_seed(seed, ki, t, round(-np.log10(eps) * 1000))
                A = random_matrix_with_condition(dim, dim, float(kappa), s)
                cfg = RunConfig(eps=eps, mode=mode, seed=s)
                ipe = IpeConfig(eps=eps, delta=delta, mode=ipe_mode, seed=s)
                res = quantum_qr(A, cfg, ipe, on_dependent="drop")
                rows.append({"kappa": float(kappa), "eps": eps, "trial": t,
                             "eta": qr_error(A, res.Q, res.R), "dropped": len(res.dependent_indices)})
    return rows


def kappa_transition_pass_rates(rows, eps: float) -> dict:
    """Per-kappa fraction of trials meeting the low/high condition-number target."""
    out = {}
    for kappa in sorted({r["kappa"] for r in rows if r["eps"] == eps}):
        etas = [r["eta"] for r in rows if r["eps"] == eps and r["kappa"] == kappa]
        if kappa <= 1.0 / eps * (1 + 1e-12):
            ok = [e <= 1e-8 for e in etas]
        elif kappa >= 10.0 / eps * (1 - 1e-12):
            ok = [e < eps for e in etas]
        else:
            continue
        out[kappa] = float(np.mean(ok))
    return out


def random_unit_pair(dim: int, rng: np.random.Generator):
    x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    y = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return x / np.linalg.norm(x), y / np.linalg.norm(y)


def qipe_bench(dim=8, trials=200, eps=0.05, delta=0.1, seed=0, mode="sampled"):
    rows = []
    cfg = IpeConfig(eps=eps, delta=delta, mode=mode, seed=seed)
    for t, ss in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        rng = np.random.default_rng(ss)
        x, y = random_unit_pair(dim, rng)
        exact = np.vdot(x, y)
        est, shots = estimate_inner_product(x, y, cfg, rng)
        rows.append({"trial": t, "exact_re": exact.real, "exact_im": exact.imag, "est_re": est.real,
                     "est_im": est.imag, "abs_error": abs(est - exact), "shots": shots})
    return rows


def fit_grid(degrees=(1, 2, 3, 4), trials=20, seed=0, noise=0.02, eps=1e-4, ipe_mode="analytic"):
    """Train/test errors for every (r, k); each trial shares its data across k."""
    rows = []
    cfg = RunConfig(eps=eps)
    ipe = IpeConfig(mode=ipe_mode, seed=seed)
    for r in degrees:
        for t, ss in enumerate(np.random.SeedSequence([seed, r]).spawn(trials)):
            for k in degrees:
                tr = fit_trial(r, k, np.random.default_rng(ss), cfg, ipe, noise=noise)
                rows.append({"r": r, "k": k, "trial": t, "train_error": tr.train_error,
                             "test_error": tr.test_error})
    return rows


def fit_error_table(rows, degrees=(1, 2, 3, 4)) -> np.ndarray:
    """Mean test error, indexed ``[r - 1, k - 1]``."""
    out = np.zeros((len(degrees), len(degrees)))
    for i, r in enumerate(degrees):
        for j, k in enumerate(degrees):
            out[i, j] = np.mean([x["test_error"] for x in rows if x["r"] == r and x["k"] == k])
    return out


def bench_scaling(dims=(4, 8, 16, 32), eps=1e-2, kappa=10.0, seed=0, mode="analytic", ipe_mode="sampled"):
    rows = []
    for m in dims:
        s = trial_seed(seed, m)
        A = random_matrix_with_condition(m, m, kappa, s)
        gs = quantum_gram_schmidt([A[:, j] for j in range(m)], RunConfig(eps=eps, mode=mode, seed=s))
        qr = quantum_qr(A, RunConfig(eps=eps, mode=mode, seed=s),
                        IpeConfig(eps=eps, delta=0.1, mode=ipe_mode, seed=s), on_dependent="drop")
        led = gs.ledger
        rows.append({"M": m, "qgs_queries": led.oracle_queries, "qgs_gates": led.two_qubit_gates,
                     "qgs_runs": led.circuit_runs, "qubits": led.qubits,
                     "qr_queries": qr.ledger.total_queries})
    return rows


def build_model(model: str, sites: int) -> np.ndarray:
    if model == "ising":
        return ising_hamiltonian(sites)
    if model == "heisenberg":
        return heisenberg_hamiltonian(sites)
    raise ValueError(f"unknown model {model!r}")


def eigen_run(model="ising", sites=3, backend="quantum", eps=1e-4, mode="analytic", seed=0,
              max_iter=None, tol=1e-6):
    H = build_model(model, sites)
    max_iter = 10 * 2 ** sites if max_iter is None else max_iter
    vals, _, iters, history = qr_iteration(H, max_iter, tol, backend, RunConfig(eps=eps, mode=mode, seed=seed),
                                           IpeConfig(mode="analytic", seed=seed))
    exact = exact_eigensolve(H)[0]
    return {"model": model, "sites": sites, "backend": backend, "iterations": iters,
            "eigenvalues": [float(v) for v in vals], "exact": [float(v) for v in exact],
            "max_abs_error": float(np.max(np.abs(vals - exact)))}, history
