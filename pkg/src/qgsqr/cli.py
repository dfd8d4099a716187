"""Command-line experiment runner.

Every subcommand writes CSV/JSON files plus ``manifest.json`` (arguments,
seed, wall time, library version and a SHA-256 per output file) into the
output directory. Exit codes: 0 success, 1 invalid input, 2 a ``--check``
threshold was violated.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import experiments as ex
from .apps.eigen import ConvergenceError
from .apps.fitting import fit_trial
from .apps.linsys import CHARGES, classify_linear_system, laplace_dirichlet_solve
from .linalg import load_matrix, loss_of_orthogonality, random_matrix_with_condition
from .qgs import RunConfig, quantum_gram_schmidt
from .qipe import IpeConfig

OUT_ENV = "QGSQR_OUT"
DEFAULTS = {
    "dim": None, "count": None, "cond": None, "eps": None, "delta": 0.1, "mode": None,
    "inject_error": False, "seed": 0, "trials": None, "grid": 17, "model": "ising", "sites": 3,
    "backend": None, "case": "all", "matrix": None, "rhs": None, "out": None, "check": False,
}
# per-command overrides of DEFAULTS
COMMAND_DEFAULTS = {
    "qgs": {"dim": [8], "cond": [100.0], "eps": [1e-4], "mode": "analytic", "trials": 10},
    "qr": {"dim": [8], "cond": [100.0], "eps": [1e-4], "mode": "analytic", "trials": 10},
    "ortho-sweep": {"dim": [4, 8, 16, 32], "cond": [100.0], "eps": [1e-4], "mode": "analytic", "trials": 10},
    "qr-kappa-sweep": {"dim": [8], "cond": [float(k) for k in np.logspace(0, 6, 13)], "eps": [1e-2, 1e-3],
                       "mode": "sampled", "trials": 20},
    "qipe-bench": {"dim": [8], "eps": [0.05], "mode": "sampled", "trials": 200},
    "fit": {"eps": [1e-4], "mode": "analytic", "trials": 20},
    "linsolve": {"dim": [4], "cond": [10.0], "eps": [1e-4], "mode": "analytic"},
    "laplace": {"eps": [1e-4], "mode": "analytic"},
    "eigen": {"eps": [1e-4], "mode": "analytic", "backend": "quantum"},
    "bench-scaling": {"dim": [4, 8, 16, 32], "cond": [10.0], "eps": [1e-2], "mode": "analytic"},
}


class ValidationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qgsqr", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMAND_DEFAULTS:
        s = sub.add_parser(name)
        s.add_argument("--dim", type=int, nargs="+")
        s.add_argument("--count", type=int, help="number of vectors (qgs/qr); defaults to --dim")
        s.add_argument("--cond", type=float, nargs="+")
        s.add_argument("--eps", type=float, nargs="+")
        s.add_argument("--delta", type=float)
        s.add_argument("--mode", choices=["sampled", "analytic"])
        s.add_argument("--inject-error", dest="inject_error", action="store_const", const=True)
        s.add_argument("--seed", type=int)
        s.add_argument("--trials", type=int)
        s.add_argument("--grid", type=int)
        s.add_argument("--case", choices=["all", *CHARGES])
        s.add_argument("--model", choices=["ising", "heisenberg"])
        s.add_argument("--sites", type=int)
        s.add_argument("--backend", choices=["classical", "quantum"])
        s.add_argument("--matrix", help="JSON matrix file (linsolve)")
        s.add_argument("--rhs", help="JSON vector file (linsolve)")
        s.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./results)")
        s.add_argument("--config", help="JSON file mirroring the flags; flags take precedence")
        s.add_argument("--check", action="store_const", const=True,
                       help="exit 2 if the experiment misses its acceptance threshold")
    return p


def resolve_options(args: argparse.Namespace) -> dict:
    """Merge defaults, then the config file, then explicit flags."""
    opts = dict(DEFAULTS)
    opts.update(COMMAND_DEFAULTS[args.command])
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ValidationError(f"cannot read config: {e}") from e
        if not isinstance(cfg, dict):
            raise ValidationError("config must be a JSON object")
        for key, val in cfg.items():
            key = key.replace("-", "_")
            if key not in opts:
                raise ValidationError(f"unknown config key {key!r}")
            if key in ("dim", "cond", "eps") and not isinstance(val, list):
                val = [val]
            opts[key] = val
    for key, val in vars(args).items():
        if key in opts and val is not None:
            opts[key] = val
    if opts["out"] is None:
        opts["out"] = os.environ.get(OUT_ENV, "results")
    _validate(opts)
    return opts


def _validate(o: dict) -> None:
    for key in ("dim", "cond", "eps"):
        if o[key] is not None and any(not v > 0 for v in o[key]):
            raise ValidationError(f"--{key} values must be positive")
    for key in ("trials", "grid", "sites", "count"):
        if o[key] is not None and not o[key] > 0:
            raise ValidationError(f"--{key} must be positive")
    if any(not 0 < e < 1 for e in o["eps"]) or not 0 < o["delta"] < 1:
        raise ValidationError("--eps and --delta must lie in (0, 1)")
    if any(c < 1 for c in o["cond"] or []):
        raise ValidationError("--cond must be >= 1")
    if o["seed"] < 0:
        raise ValidationError("--seed must be non-negative")


# ---------------------------------------------------------------- output


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def rows_to_csv(rows: list[dict], columns: list[str] | None = None) -> str:
    columns = list(rows[0]) if columns is None else columns
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


class Output:
    def __init__(self, root: Path):
        self.root = root
        self.files: dict[str, str] = {}

    def write(self, name: str, text: str) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        data = text.encode("utf-8")
        (self.root / name).write_bytes(data)
        self.files[name] = hashlib.sha256(data).hexdigest()

    def manifest(self, command: str, opts: dict, wall: float, summary: dict) -> None:
        man = {"experiment": command, "options": opts, "seed": opts["seed"], "version": __version__,
               "wall_time_s": round(wall, 3), "summary": summary, "files": dict(sorted(self.files.items()))}
        (self.root / "manifest.json").write_text(_json_text(man), encoding="utf-8")


# ---------------------------------------------------------------- commands


def _cmd_gs(o, out, qr: bool):
    dims = o["dim"]
    eps, kappa = o["eps"][0], o["cond"][0]
    if o["count"] is not None and not qr:
        rows = []
        for n in dims:
            if o["count"] > n:
                raise ValidationError("--count must not exceed --dim")
            for t in range(o["trials"]):
                s = ex.trial_seed(o["seed"], n, t)
                A = random_matrix_with_condition(n, o["count"], kappa, s)
                res = quantum_gram_schmidt([A[:, j] for j in range(o["count"])],
                                           RunConfig(eps=eps, mode=o["mode"], seed=s,
                                                     inject_error=o["inject_error"]))
                rows.append({"N": n, "trial": t, "eta_qgs": loss_of_orthogonality(res.matrix()),
                             "queries": res.ledger.oracle_queries, "dependent": len(res.dependent_indices)})
    elif qr:
        rows = ex.qr_sweep(dims, kappa, eps, o["trials"], o["seed"], o["mode"], "analytic"
                           if o["mode"] == "analytic" else "sampled", o["delta"], o["inject_error"])
    else:
        rows = ex.ortho_sweep(dims, kappa, eps, o["trials"], o["seed"], o["mode"], o["inject_error"])
    key = "eta_qr" if qr else "eta_qgs"
    out.write("qr.csv" if qr else "qgs.csv", rows_to_csv(rows))
    worst = max(r[key] for r in rows)
    limit = 1e-10 if o["mode"] == "analytic" and not o["inject_error"] else 10 * eps
    return {"max_" + key: worst, "threshold": limit}, worst <= limit


def cmd_qgs(o, out):
    return _cmd_gs(o, out, qr=False)


def cmd_ortho_sweep(o, out):
    return _cmd_gs(o, out, qr=False)


def cmd_qr(o, out):
    return _cmd_gs(o, out, qr=True)


def cmd_qr_kappa_sweep(o, out):
    rows = ex.qr_kappa_sweep(o["eps"], o["cond"], o["dim"][0], o["trials"], o["seed"], o["mode"])
    out.write("qr_kappa_sweep.csv", rows_to_csv(rows, ["kappa", "eps", "trial", "eta", "dropped"]))
    rates = {str(e): {repr(k): v for k, v in ex.kappa_transition_pass_rates(rows, e).items()} for e in o["eps"]}
    ok = all(v >= 0.9 for per in rates.values() for v in per.values())
    return {"pass_rates": rates, "threshold": 0.9}, ok


def cmd_qipe_bench(o, out):
    eps = o["eps"][0]
    rows = ex.qipe_bench(o["dim"][0], o["trials"], eps, o["delta"], o["seed"], o["mode"])
    out.write("qipe_bench.csv", rows_to_csv(rows))
    n = len(rows)
    rate = float(np.mean([r["abs_error"] <= eps for r in rows]))
    floor = (1 - o["delta"]) - 3 * np.sqrt(o["delta"] * (1 - o["delta"]) / n)
    return {"success_rate": rate, "threshold": float(floor)}, rate >= floor


def cmd_fit(o, out):
    rows = ex.fit_grid(trials=o["trials"], seed=o["seed"], eps=o["eps"][0], ipe_mode=o["mode"])
    out.write("fit_grid.csv", rows_to_csv(rows))
    table = ex.fit_error_table(rows)
    inst = fit_trial(2, 2, np.random.default_rng(o["seed"]), RunConfig(eps=o["eps"][0]),
                     IpeConfig(mode=o["mode"], seed=o["seed"]),
                     true_coeffs=[0.86, 0.5, 0.43])
    out.write("fit.json", _json_text(inst.to_json()))
    diag = bool(np.all(table.argmin(axis=1) == np.arange(4)))
    ok = diag and table[1, 1] <= 0.1
    return {"mean_test_error": table.round(12).tolist(), "diagonal_minimum": diag}, ok


def cmd_linsolve(o, out):
    eps = o["eps"][0]
    if o["matrix"]:
        try:
            A = load_matrix(o["matrix"])
            b = load_matrix(o["rhs"]).ravel() if o["rhs"] else None
        except (OSError, ValueError, KeyError) as e:
            raise ValidationError(f"cannot load matrix: {e}") from e
        if b is None:
            raise ValidationError("--rhs is required with --matrix")
    else:
        n = o["dim"][0]
        A = random_matrix_with_condition(n, n, o["cond"][0], ex.trial_seed(o["seed"], n))
        b = A @ np.arange(1, n + 1, dtype=float)
    sol = classify_linear_system(A, b, RunConfig(eps=eps, mode=o["mode"], seed=o["seed"]),
                                 IpeConfig(mode="analytic", seed=o["seed"]))
    res = {"kind": sol.kind.value, "evidence": sol.evidence,
           "x": None if sol.x is None else [[float(v.real), float(v.imag)] for v in sol.x]}
    out.write("linsolve.json", _json_text(res))
    ok = sol.x is None or sol.evidence["residual"] <= 10 * eps * np.linalg.norm(b)
    return {"kind": sol.kind.value}, bool(ok)


def cmd_laplace(o, out):
    cases = list(CHARGES) if o["case"] == "all" else [o["case"]]
    summary = []
    for case in cases:
        g = laplace_dirichlet_solve(case, o["grid"], RunConfig(eps=o["eps"][0], mode=o["mode"], seed=o["seed"]),
                                    IpeConfig(mode="analytic", seed=o["seed"]))
        out.write(f"laplace_{case}.csv", g.to_csv())
        summary.append({"case": case, "G": o["grid"], "rel_error": g.interior_error()})
    out.write("laplace_summary.csv", rows_to_csv(summary))
    worst = max(s["rel_error"] for s in summary)
    return {"max_rel_error": worst, "threshold": 0.1}, worst <= 0.1


def cmd_eigen(o, out):
    try:
        res, history = ex.eigen_run(o["model"], o["sites"], o["backend"], o["eps"][0], o["mode"], o["seed"])
    except ConvergenceError as e:
        out.write("eigen.json", _json_text({"model": o["model"], "sites": o["sites"], "error": str(e)}))
        return {"error": str(e)}, False
    out.write("eigen.json", _json_text(res))
    if history:
        cols = ["iteration"] + [f"d{i}" for i in range(len(history[0]))]
        rows = [dict(zip(cols, [i + 1, *h])) for i, h in enumerate(history)]
        out.write("eigen_history.csv", rows_to_csv(rows, cols))
    limit = 1e-6 if o["backend"] == "quantum" else 1e-4
    return {"max_abs_error": res["max_abs_error"], "threshold": limit}, res["max_abs_error"] <= limit


def cmd_bench_scaling(o, out):
    rows = ex.bench_scaling(o["dim"], o["eps"][0], o["cond"][0], o["seed"], o["mode"])
    out.write("bench_scaling.csv", rows_to_csv(rows))
    ms = [r["M"] for r in rows]
    slope = ex.loglog_slope(ms, [r["qgs_queries"] for r in rows]) if len(rows) > 1 else float("nan")
    return {"qgs_query_slope": slope, "band": [1.8, 2.2]}, bool(1.8 <= slope <= 2.2)


COMMANDS = {
    "qgs": cmd_qgs, "qr": cmd_qr, "ortho-sweep": cmd_ortho_sweep, "qr-kappa-sweep": cmd_qr_kappa_sweep,
    "qipe-bench": cmd_qipe_bench, "fit": cmd_fit, "linsolve": cmd_linsolve, "laplace": cmd_laplace,
    "eigen": cmd_eigen, "bench-scaling": cmd_bench_scaling,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        opts = resolve_options(args)
        out = Output(Path(opts["out"]))
        start = time.perf_counter()
        summary, ok = COMMANDS[args.command](opts, out)
        out.manifest(args.command, opts, time.perf_counter() - start, summary)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    status = "ok" if ok else "threshold violated"
    print(f"{args.command}: {status} {json.dumps(summary, sort_keys=True)}")
    print(f"wrote {len(out.files) + 1} files to {out.root}")
    return 2 if opts["check"] and not ok else 0


if __name__ == "__main__":
    sys.exit(main())
