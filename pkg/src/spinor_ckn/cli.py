"""Command-line front end: ``spinor-ckn <command> [options]``.

Exit codes: 0 success, 2 invalid input, 3 verification failure,
4 solver non-convergence under ``--strict``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import closed_forms as cf
from . import regions as rg
from . import solver as sv
from .spinor_harmonics import delta_coeff, modes_for_k
from .verify import run_suite

SCHEMA_VERSION = 1
EXIT_OK, EXIT_DOMAIN, EXIT_VERIFY, EXIT_NONCONVERGED = 0, 2, 3, 4

MAP_COLUMNS = ["alpha", "p", "verdict", "witness", "C_star"]
SOLVE_COLUMNS = ["C_num", "gap", "symmetry_defect", "converged"]


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_DOMAIN):
        super().__init__(message)
        self.code = code


# -- serialization ------------------------------------------------------------

def fmt_float(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _json_value(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def render(kind: str, config: dict, columns: Sequence[str], rows: List[dict], fmt: str) -> str:
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "kind": kind, "config": config,
               "columns": list(columns), "rows": rows}
        return json.dumps(_json_value(doc), indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# spinor-ckn {kind}\n")
    buf.write(f"# schema_version: {SCHEMA_VERSION}\n")
    buf.write(f"# columns: {','.join(columns)}\n")
    buf.write(f"# config: {json.dumps(_json_value(config), sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt_float(row.get(c)) for c in columns])
    return buf.getvalue()


def emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}") from exc


# -- constants ----------------------------------------------------------------

def constants_row(alpha: float, p: Optional[float] = None, beta: Optional[float] = None) -> dict:
    if (p is None) == (beta is None):
        raise CliError("give exactly one of --p or --beta")
    if beta is not None:
        try:
            p = cf.p_of(alpha, beta)
        except ValueError as exc:
            raise CliError(str(exc)) from exc
    else:
        if not (2.0 <= p <= 6.0):
            raise CliError(f"p must lie in [2, 6], got {p}")
        beta = cf.beta_of(alpha, p)
    lam = cf.symmetric_mass(alpha)
    row = {
        "alpha": alpha, "beta": beta, "p": p,
        "lambda": lam,
        "in_Lambda": cf.in_lambda(alpha),
        "degenerate_symmetric": lam == 0.0,
        "hardy": cf.hardy_constant(alpha),
        "eps": cf.coercivity_eps(alpha),
        "C_star": None, "C_star_original": None, "m_alpha": None, "q_alpha": None,
    }
    if p > 2.0:
        row["C_star"] = cf.C_star_log(alpha, p)
        row["C_star_original"] = (4.0 * math.pi) ** ((p - 2.0) / p) * row["C_star"]
    if -0.5 < alpha < 1.0:
        row["m_alpha"] = cf.m_alpha(alpha)
        row["q_alpha"] = cf.q_threshold(alpha)
    return row


CONSTANT_COLUMNS = ["alpha", "beta", "p", "lambda", "in_Lambda", "degenerate_symmetric",
                    "hardy", "eps", "C_star", "C_star_original", "m_alpha", "q_alpha"]


def cmd_constants(args) -> int:
    row = constants_row(args.alpha, args.p, args.beta)
    config = {"alpha": args.alpha, "p": args.p, "beta": args.beta}
    emit(render("constants", config, CONSTANT_COLUMNS, [row], args.format), args.out)
    return EXIT_OK


# -- curves -------------------------------------------------------------------

def _safe(fn, *a):
    try:
        return fn(*a)
    except ValueError:
        return None


def cmd_curve(args) -> int:
    lo, hi, steps = args.range
    steps = int(steps)
    if steps < 1 or lo > hi:
        raise CliError("range must be MIN MAX STEPS with MIN <= MAX and STEPS >= 1")
    xs = np.linspace(lo, hi, steps)
    if args.kind == "alpha":
        columns = ["p"] + [f"alpha_{i}" for i in range(6)]
        rows = [dict({"p": x}, **{f"alpha_{i}": _safe(rg.alpha_curve, i, x) for i in range(6)})
                for x in xs]
    else:
        columns = ["alpha", "p_1", "p_2", "p_5"]
        rows = [dict({"alpha": x}, **{f"p_{j}": _safe(rg.p_curve, j, x) for j in (1, 2, 5)})
                for x in xs]
    config = {"kind": args.kind, "range": [lo, hi, steps]}
    emit(render("curve", config, columns, rows, args.format), args.out)
    return EXIT_OK


# -- stability table ----------------------------------------------------------

def cmd_stability(args) -> int:
    alpha = rg.reflect_alpha(args.alpha)
    try:
        rows = []
        for k in range(-args.kmax - 1, args.kmax):
            if k in (-1, 0):
                continue
            for md in modes_for_k(k):
                rows.append({"k": k, "m": md.m, "delta": delta_coeff(md),
                             "index": rg.stability_index(k, md.m, alpha, args.p)})
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    config = {"alpha": args.alpha, "alpha_reflected": alpha, "p": args.p, "kmax": args.kmax}
    emit(render("stability", config, ["k", "m", "delta", "index"], rows, args.format), args.out)
    return EXIT_OK


# -- solve --------------------------------------------------------------------

def _solver_config(args) -> sv.SolverConfig:
    return sv.SolverConfig(n_points=args.grid_n, half_length=args.half_length,
                           k_max=args.kmax, seed=args.seed)


def solve_report(alpha: float, p: float, config: sv.SolverConfig) -> dict:
    res = sv.cylinder_minimize(alpha, p, config)
    c_star = cf.C_star_log(alpha, p)
    return {
        "alpha": alpha, "p": p,
        "C_num": res.C_num, "C_star": c_star,
        "gap": (c_star - res.C_num) / c_star,
        "symmetry_defect": res.symmetry_defect,
        "converged": res.converged,
        "residual": res.residual,
        "iterations": res.iterations,
        "start": res.start,
        "per_mode_energy": {str(md): e for md, e in res.per_mode_energy.items()},
        "starts": [asdict(s) for s in res.starts],
    }


def cmd_solve(args) -> int:
    if cf.in_lambda(args.alpha):
        raise CliError(f"alpha in Lambda: alpha={args.alpha} is a half-integer k-1/2, k != 0")
    if not (2.0 < args.p < 6.0):
        raise CliError(f"p must lie in (2, 6), got {args.p}")
    config = _solver_config(args)
    report = solve_report(args.alpha, args.p, config)
    doc = {"schema_version": SCHEMA_VERSION, "kind": "solve",
           "config": asdict(config), "result": report}
    emit(json.dumps(_json_value(doc), indent=2) + "\n", args.out)
    if args.strict and not report["converged"]:
        return EXIT_NONCONVERGED
    return EXIT_OK


# -- phase map ----------------------------------------------------------------

@dataclass(frozen=True)
class SweepConfig:
    alpha_range: tuple
    p_range: tuple
    solve: bool = False
    solver: sv.SolverConfig = sv.SolverConfig()
    workers: int = 1

    def __post_init__(self):
        for name, (lo, hi, steps) in (("alpha", self.alpha_range), ("p", self.p_range)):
            if int(steps) < 1 or lo > hi:
                raise CliError(f"{name} range must satisfy MIN <= MAX and STEPS >= 1")
        if self.workers < 1:
            raise CliError("workers must be >= 1")

    def cells(self) -> List[tuple]:
        alphas = np.linspace(self.alpha_range[0], self.alpha_range[1], int(self.alpha_range[2]))
        ps = np.linspace(self.p_range[0], self.p_range[1], int(self.p_range[2]))
        return [(float(a), float(p)) for a in alphas for p in ps]

    def echo(self) -> dict:
        """Configuration echo; the worker count is left out so output does not depend on it."""
        out = {"alpha_range": list(self.alpha_range), "p_range": list(self.p_range),
               "solve": self.solve}
        if self.solve:
            out["solver"] = asdict(self.solver)
        return out


def map_cell(alpha: float, p: float, solve: bool, solver: sv.SolverConfig) -> dict:
    cls = rg.classify(alpha, p)
    row = {"alpha": alpha, "p": p, "verdict": cls.verdict.value, "witness": cls.witness or ""}
    row["C_star"] = cf.C_star_log(alpha, p) if 2.0 < p else None
    if solve:
        if cls.verdict is rg.Verdict.DEGENERATE:
            row.update({"C_num": None, "gap": None, "symmetry_defect": None, "converged": None})
        else:
            res = sv.cylinder_minimize(alpha, p, solver)
            row.update({"C_num": res.C_num,
                        "gap": (row["C_star"] - res.C_num) / row["C_star"] if row["C_star"] else None,
                        "symmetry_defect": res.symmetry_defect,
                        "converged": res.converged})
    return row


def _map_block(block: List[tuple], solve: bool, solver: sv.SolverConfig) -> List[dict]:
    return [map_cell(a, p, solve, solver) for a, p in block]


def run_map(cfg: SweepConfig) -> List[dict]:
    """Rows in alpha-major order; cells are split into contiguous blocks,
    one per worker, and reassembled in block order."""
    cells = cfg.cells()
    if cfg.workers == 1 or len(cells) < 2:
        return _map_block(cells, cfg.solve, cfg.solver)
    n_blocks = min(cfg.workers, len(cells))
    bounds = np.linspace(0, len(cells), n_blocks + 1).astype(int)
    blocks = [cells[bounds[i]:bounds[i + 1]] for i in range(n_blocks)]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        parts = list(pool.map(_map_block, blocks, [cfg.solve] * n_blocks, [cfg.solver] * n_blocks))
    return [row for part in parts for row in part]


def cmd_map(args) -> int:
    cfg = SweepConfig(tuple(args.alpha_range), tuple(args.p_range), args.solve,
                      _solver_config(args), args.workers)
    rows = run_map(cfg)
    columns = MAP_COLUMNS + (SOLVE_COLUMNS if cfg.solve else [])
    emit(render("map", cfg.echo(), columns, rows, args.format), args.out)
    if args.strict and cfg.solve and any(r.get("converged") is False for r in rows):
        return EXIT_NONCONVERGED
    return EXIT_OK


# -- verify -------------------------------------------------------------------

def cmd_verify(args) -> int:
    try:
        checks = run_suite(args.suite)
    except KeyError as exc:
        raise CliError(exc.args[0]) from exc
    failed = 0
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        failed += not c.passed
        print(f"{status}  {c.name}: measured {c.measured:.3e} (tolerance {c.tolerance:.1e})")
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


# -- argument parsing ---------------------------------------------------------

def _default_workers() -> int:
    env = os.environ.get("SPINOR_CKN_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinor-ckn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def output_flags(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", metavar="PATH", default=None)

    def solver_flags(p):
        p.add_argument("--grid-n", type=int, default=1024, help="radial grid points")
        p.add_argument("--half-length", type=float, default=None,
                       help="radial half-length L (default: from optimizer decay)")
        p.add_argument("--kmax", type=int, default=3, help="keep modes with |k+1| <= KMAX")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--strict", action="store_true",
                       help="exit with code 4 when the solver does not converge")

    p = sub.add_parser("constants", help="closed-form constants at one parameter point")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--beta", type=float)
    output_flags(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("curve", help="tabulate threshold curves")
    p.add_argument("--kind", choices=("alpha", "p"), default="alpha",
                   help="alpha_i(p) curves or p_j(alpha) curves")
    p.add_argument("--range", nargs=3, type=float, metavar=("MIN", "MAX", "STEPS"),
                   default=[2.05, 5.95, 40])
    output_flags(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("map", help="phase-diagram sweep over an (alpha, p) grid")
    p.add_argument("--alpha-range", nargs=3, type=float, metavar=("MIN", "MAX", "STEPS"),
                   default=[-1.5, 1.5, 31])
    p.add_argument("--p-range", nargs=3, type=float, metavar=("MIN", "MAX", "STEPS"),
                   default=[2.1, 5.9, 20])
    p.add_argument("--solve", action="store_true", help="run the cylinder solver per cell")
    p.add_argument("--workers", type=int, default=_default_workers())
    solver_flags(p)
    output_flags(p)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("solve", help="minimize the cylinder functional at one point")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    solver_flags(p)
    p.add_argument("--out", metavar="PATH", default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("stability", help="single-channel stability indices")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--kmax", type=int, default=3)
    output_flags(p)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("verify", help="run self-check suites")
    p.add_argument("suite", nargs="?", default="all")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
