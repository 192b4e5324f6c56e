"""
Command-line front end.

    fpcontrol solve --mode lqr-w -A a.txt -b b.txt --w 0.01 --N 5 --M 5 --c 1,4,5

Exit status: 0 when ||A·x - b|| <= 1e-8·max(1, ||b||), 2 when the run finished
without reaching that accuracy (the report is still written), 1 on errors.
"""
import argparse
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, SolverError
from .io import dump_report, parse_matrix_file, write_trace_csv
from .jacobi import build_iteration
from .linalg import as_square, as_vector
from .riccati import LqrParams, auto_output_vector
from .solver import SolveParams, scale_system, solve

EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2
CLI_MODES = ("jacobi", "deadbeat", "place", "lqr", "lqr-w")


@dataclass
class RunConfig:
    matrix_path: Path
    rhs_path: Path
    mode: str = "lqr-w"
    w: Optional[float] = None
    r: float = 0.5
    N: Optional[int] = None
    M: Optional[int] = None
    fp_tol: Optional[float] = None
    c_spec: str = "auto"
    targets: Optional[Sequence[float]] = None
    x0: Optional[Sequence[float]] = None
    seed: Optional[int] = None
    output: Optional[Path] = None
    trace_path: Optional[Path] = None


def _vector_arg(text):
    try:
        return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _optional_path(text):
    return Path(text) if text else None


def _c_arg(text):
    return "auto" if text.strip().lower() == "auto" else text


def build_parser():
    parser = argparse.ArgumentParser(prog="fpcontrol", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", help="solve A·x = b by a feedback-corrected fixed-point iteration")
    p.add_argument("--mode", choices=CLI_MODES, default="lqr-w")
    p.add_argument("-A", dest="matrix_path", type=Path, required=True, help="matrix file")
    p.add_argument("-b", dest="rhs_path", type=Path, required=True, help="right-hand side file")
    p.add_argument("--w", type=float, help="spectral radius bound for lqr-w (default 0.1)")
    p.add_argument("--N", type=int, help="Riccati horizon (default 10 for lqr-w, 100 for lqr)")
    p.add_argument("--M", type=int, help="fixed-point steps (default max(2n, 15/log10(1/w)) for lqr-w, 1000 otherwise)")
    p.add_argument("--fp-tol", dest="fp_tol", type=float,
                   help="relative stagnation tolerance for early exit; 0 disables "
                        "(default 0 when --M is given, 1e-14 otherwise)")
    p.add_argument("--r", type=float, default=0.5, help="control weight (default 0.5)")
    p.add_argument("--c", dest="c_spec", type=_c_arg, default="auto", help="output vector v1,v2,... or 'auto'")
    p.add_argument("--targets", type=_vector_arg, help="eigenvalue targets for --mode place")
    p.add_argument("--x0", type=_vector_arg, help="start vector (default zero)")
    p.add_argument("--seed", type=int, help="seed for --c auto (default 0)")
    p.add_argument("--out", dest="output", type=Path, help="JSON report path (default stdout)")
    p.add_argument("--trace", dest="trace_path", type=_optional_path, help="CSV trace of the iterates")
    return parser


def _resolve_c(cfg, A, b, w):
    sys_ = build_iteration(A, b)
    if cfg.mode == "lqr-w":
        sys_ = scale_system(sys_, 0.1 if w is None else w)
    if cfg.c_spec == "auto":
        return auto_output_vector(sys_, 0 if cfg.seed is None else cfg.seed)
    c = np.array(_vector_arg(cfg.c_spec))
    if c.shape[0] != sys_.n:
        raise DimensionMismatch(f"--c has {c.shape[0]} entries, system has n = {sys_.n}")
    return c


def build_params(cfg, A, b):
    mode = cfg.mode.replace("-", "_")
    n = A.shape[0]
    lqr = None
    if mode in ("lqr", "lqr_w"):
        c = _resolve_c(cfg, A, b, cfg.w)
        N = cfg.N if cfg.N is not None else (10 if mode == "lqr_w" else 100)
        lqr = LqrParams(c, r=cfg.r, N=N)
    x0 = None
    if cfg.x0 is not None:
        x0 = as_vector(cfg.x0, "x0")
        if x0.shape[0] != n:
            raise DimensionMismatch(f"--x0 has {x0.shape[0]} entries, system has n = {n}")
    fp_tol = cfg.fp_tol
    if fp_tol is None:
        # an explicit step count is honoured exactly
        fp_tol = 0.0 if cfg.M is not None else 1e-14
    if fp_tol < 0:
        raise ValueError("--fp-tol must be non-negative")
    return SolveParams(mode=mode, w=cfg.w, M=cfg.M, x0=x0, targets=cfg.targets, lqr=lqr,
                       fp_tol=fp_tol, seed=0 if cfg.seed is None else cfg.seed)


def converged(report, b):
    return report.residual_norm <= 1e-8 * max(1.0, float(np.linalg.norm(b)))


def run_solve_command(cfg, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        A = as_square(parse_matrix_file(cfg.matrix_path), "A")
        b = as_vector(parse_matrix_file(cfg.rhs_path), "b")
        if b.shape[0] != A.shape[0]:
            raise DimensionMismatch(f"b has length {b.shape[0]}, A is {A.shape[0]}x{A.shape[1]}")
        params = build_params(cfg, A, b)
        with warnings.catch_warnings():
            # surfaced below from report.warnings
            warnings.simplefilter("ignore", RuntimeWarning)
            report = solve(A, b, params)
        if cfg.output is not None:
            with open(cfg.output, "w") as fh:
                dump_report(report, fh)
        else:
            dump_report(report, stdout)
        if cfg.trace_path is not None:
            write_trace_csv(cfg.trace_path, report.trace)
    except (SolverError, ValueError, OSError) as exc:
        print(f"fpcontrol: error: {exc}", file=stderr)
        return EXIT_ERROR
    for note in report.warnings:
        print(f"fpcontrol: warning: {note}", file=stderr)
    if converged(report, b):
        return EXIT_OK
    msg = f"fpcontrol: not converged: residual norm {report.residual_norm:.3e} after {report.steps_used} steps"
    rho = report.diagnostics.get("spectral_radius_estimate")
    if rho is not None and rho >= 1:
        msg += f"; iteration matrix has spectral radius about {rho:.4g} >= 1, the iteration diverges"
    print(msg, file=stderr)
    return EXIT_NOT_CONVERGED


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k != "command"})
    return run_solve_command(cfg)


if __name__ == "__main__":
    sys.exit(main())
