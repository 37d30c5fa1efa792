"""Command-line front end: ``cbsolve {solve,gen,verify,bench}``.

Exit codes: 0 success, 1 format or input error, 2 numerical singularity,
64 usage error.
"""

import argparse
import csv
import sys
import time

from .cbx import KINDS, GenSpec, generate, read_cbx, save_cbx
from .cyclic import WoodburyParams, residual_inf
from .dense import dense_solve_operator
from .errors import CbsError, SingularError
from .solve import METHODS, relative_deviation, solve_operator

EXIT_OK = 0
EXIT_FORMAT = 1
EXIT_SINGULAR = 2
EXIT_USAGE = 64

VERIFY_TOL = 1e-8
DENSE_LIMIT = 600
BENCH_HEADER = ["n", "m", "method", "seconds", "matmuls", "lus", "solves"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _int_list(text):
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty n list")
    return values


def build_parser():
    parser = _Parser(prog="cbsolve", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve the system in a CBX1 file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", help="where to write the file with a SOL section (default: --input)")
    for name in ("alpha", "beta", "gamma", "delta"):
        p.add_argument(f"--{name}", type=float, default=1.0)
    p.add_argument("--method", choices=METHODS, default="woodbury")

    p = sub.add_parser("gen", help="write a random diagonally dominant system")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dominance", type=float, default=1.5)
    p.add_argument("--output", required=True)

    p = sub.add_parser("verify", help="check the SOL section of a CBX1 file")
    p.add_argument("--input", required=True)

    p = sub.add_parser("bench", help="time woodbury against dense, CSV on stdout")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    return parser


def cmd_solve(args, out):
    try:
        params = WoodburyParams(args.alpha, args.beta, args.gamma, args.delta)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    doc = read_cbx(args.input)
    if doc.rhs is None:
        print(f"{args.input}: no RHS section", file=sys.stderr)
        return EXIT_FORMAT
    report = solve_operator(doc.operator, doc.rhs, params, args.method)
    save_cbx(args.output or args.input, doc.operator, doc.rhs, report.x)
    c = report.counters
    print(f"method {args.method}", file=out)
    print(f"residual_inf {report.residual_inf:.6e}", file=out)
    print(f"matmuls {c.matmuls}", file=out)
    print(f"lus {c.lus}", file=out)
    print(f"solves {c.solves}", file=out)
    return EXIT_OK


def cmd_gen(args, out):
    try:
        spec = GenSpec(args.kind, args.n, args.m, args.seed, args.dominance)
    except CbsError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    op, rhs = generate(spec)
    save_cbx(args.output, op, rhs)
    print(f"wrote {args.kind} n={args.n} m={args.m} seed={args.seed} to {args.output}", file=out)
    return EXIT_OK


def cmd_verify(args, out):
    doc = read_cbx(args.input)
    if doc.rhs is None or doc.solution is None:
        print(f"{args.input}: verify needs both RHS and SOL sections", file=sys.stderr)
        return EXIT_FORMAT
    op = doc.operator
    res = residual_inf(op, doc.solution, doc.rhs)
    print(f"residual_inf {res:.6e}", file=out)
    if op.n * op.m <= DENSE_LIMIT:
        try:
            ref = dense_solve_operator(op, doc.rhs)
            print(f"dense_deviation {relative_deviation(doc.solution, ref):.6e}", file=out)
        except SingularError as exc:
            print(f"dense_deviation n/a ({exc})", file=out)
    ok = res <= VERIFY_TOL
    print("PASS" if ok else "FAIL", file=out)
    return EXIT_OK if ok else EXIT_FORMAT


def _timed(fn, repeat):
    best, result = None, None
    for _ in range(max(1, repeat)):
        t0 = time.perf_counter()
        result = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, result


def bench_rows(kind, m, n_list, repeat=1, seed=0):
    """Yield bench CSV rows (as lists) for each n, woodbury then dense."""
    for n in n_list:
        op, rhs = generate(GenSpec(kind, n, m, seed))
        secs, rep = _timed(lambda: solve_operator(op, rhs), repeat)
        c = rep.counters
        yield [n, m, "woodbury", f"{secs:.6f}", c.matmuls, c.lus, c.solves]
        if n * m <= DENSE_LIMIT:
            secs, _ = _timed(lambda: solve_operator(op, rhs, method="dense"), repeat)
            yield [n, m, "dense", f"{secs:.6f}", 0, 0, 0]


def cmd_bench(args, out):
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(BENCH_HEADER)
    for row in bench_rows(args.kind, args.m, args.n_list, args.repeat, args.seed):
        writer.writerow(row)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "gen": cmd_gen, "verify": cmd_verify, "bench": cmd_bench}


def main(argv=None, out=None):
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SingularError as exc:
        print(f"cbsolve: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (CbsError, OSError, UnicodeDecodeError) as exc:
        print(f"cbsolve: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
