"""Command-line front end.

Exit codes: 0 on success, 2 on usage errors (bad flags, unknown problem or
format), 1 on numerical failure. Diagnostics go to standard error only.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import oracle
from .assembly import assemble, export_matrix_market, rayleigh_quotient
from .eigensolve import smallest_eigenpairs
from .errors import CoercifyError, InvalidArgumentError
from .mesh import unit_mesh, write_json
from .problems import BUILTINS, load_problem
from .study import plot_study, run_study


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    problems = ", ".join(BUILTINS)
    p = _Parser(prog="coercify", description="Discrete coercivity constants of variational problems.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="assemble and solve one instance")
    s.add_argument("--problem", required=True, help=f"built-in ({problems}) or a problem .json file")
    s.add_argument("--n", type=_positive_int, default=16, help="subdivisions per side")
    s.add_argument("--degree", type=int, choices=(1, 2), default=1)
    s.add_argument("--k", type=_positive_int, default=3, help="number of eigenpairs")
    s.add_argument("--tol", type=_positive_float, default=1e-10, help="relative residual bound")
    s.add_argument("--method", choices=("auto", "dense", "sparse"), default="auto")
    s.add_argument("--seed", type=int, default=0, help="seed for solver start vectors")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.add_argument("--out", help="output file (default: stdout)")
    s.add_argument("--export-mtx", metavar="PREFIX", help="write PREFIX_A.mtx and PREFIX_B.mtx")
    s.add_argument("--mesh-json", metavar="PATH", help="write the mesh as JSON")

    t = sub.add_parser("study", help="convergence study over nested meshes")
    t.add_argument("--problem", required=True, help=f"built-in ({problems}) or a problem .json file")
    t.add_argument("--degree", type=int, choices=(1, 2), default=1)
    t.add_argument("--n0", type=_positive_int, default=None, help="coarsest subdivisions")
    t.add_argument("--levels", type=int, default=None, help="number of levels (>= 2)")
    t.add_argument("--k", type=_positive_int, default=3)
    t.add_argument("--tol", type=_positive_float, default=1e-10)
    t.add_argument("--format", choices=("json", "csv"), default="csv")
    t.add_argument("--out", help="output file (default: stdout)")
    t.add_argument("--plot", metavar="SVG", help="write a log-log error plot")
    t.add_argument("--timings", action="store_true", help="fill the seconds column")

    o = sub.add_parser("oracle", help="exact coercivity constant of a built-in problem")
    o.add_argument("--problem", required=True, choices=oracle.KNOWN_PROBLEMS, metavar="PROBLEM",
                   help=f"one of {problems}")
    o.add_argument("--max-mode", type=_positive_int, default=10,
                   help="modes enumerated for the spectral cross-check")
    o.add_argument("--format", choices=("text", "json"), default="text")
    o.add_argument("--out", help="output file (default: stdout)")
    return p


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt4(x) -> str:
    return f"{x:.4g}"


def _solve(args):
    spec = load_problem(args.problem)
    mesh = unit_mesh(spec.dim, args.n)
    system = assemble(spec, mesh, args.degree)
    eig = smallest_eigenpairs(system.A_hat, system.B, k=min(args.k, system.ndof), tol=args.tol,
                              method=args.method, seed=args.seed)
    alpha_h = rayleigh_quotient(system, eig.eigenvectors[:, 0])
    if args.export_mtx:
        export_matrix_market(system, args.export_mtx)
    if args.mesh_json:
        write_json(mesh, args.mesh_json)
    exact = spec.exact_alpha
    rec = {
        "problem": spec.name,
        "n": args.n,
        "degree": args.degree,
        "h": system.h,
        "ndof": system.ndof,
        "alpha_h": alpha_h,
        "exact_alpha": exact,
        "error": None if exact is None else alpha_h - exact,
        "eigenvalues": [float(v) for v in eig.eigenvalues],
        "residuals": [float(v) for v in eig.residuals],
        "method": eig.diagnostics["method"],
    }
    if args.format == "json":
        return json.dumps(rec, indent=2) + "\n"
    cols = ["problem", "n", "degree", "h", "ndof", "alpha_h", "exact_alpha", "error"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    w.writerow(["" if rec[c] is None else (repr(rec[c]) if isinstance(rec[c], float) else rec[c])
                for c in cols])
    return buf.getvalue()


def _study(args):
    res = run_study(args.problem, args.degree, args.n0, args.levels, k=args.k, tol=args.tol)
    if args.plot:
        plot_study(res, args.plot)
    return res.to_json(args.timings) if args.format == "json" else res.to_csv(args.timings)


def _oracle(args):
    exact = oracle.exact_alpha(args.problem)
    from_spec = oracle.alpha_from_branches(args.problem, args.max_mode)
    if args.format == "text":
        return _fmt4(exact.alpha) + "\n"
    rec = {
        "problem": args.problem,
        "alpha": exact.alpha,
        "alpha_rounded": _fmt4(exact.alpha),
        "alpha_from_spectrum": from_spec,
        "max_mode": args.max_mode,
        "eigenfunction": exact.eigenfunction,
        "formula": exact.provenance,
    }
    if args.problem in ("poisson-ls", "poisson-ls-rescaled"):
        rec["branches"] = [
            {"m": b.modes[0], "n": b.modes[1], "sign": "+" if b.sign > 0 else "-",
             "eigenvalue": b.eigenvalue, "kinv_eigenvalue": b.kinv_eigenvalue,
             "flux_multiplier": b.flux_multiplier, "residual": b.residual}
            for b in oracle.branch_table(args.problem, args.max_mode)
        ]
    return json.dumps(rec, indent=2) + "\n"


_COMMANDS = {"solve": _solve, "study": _study, "oracle": _oracle}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"coercify: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        text = _COMMANDS[args.command](args)
    except InvalidArgumentError as exc:
        print(f"coercify: error: {exc}", file=sys.stderr)
        return 2
    except CoercifyError as exc:
        print(f"coercify: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        diag = getattr(exc, "diagnostics", None)
        if diag:
            print(f"coercify: diagnostics: {diag}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"coercify: error: {exc}", file=sys.stderr)
        return 2
    _emit(text, getattr(args, "out", None))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
