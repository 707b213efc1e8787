"""Command line interface.

Exit codes: 0 on success, 1 when a verification fails, 2 on usage, input or
solvability errors.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import geninv, harness, perturbation
from .errors import NotSolvableError, OuterInverseError
from .io import format_matrix_csv, read_matrix_csv, read_subspace_csv
from .subspace import delta

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


def _emit(args, payload, csv_text=None):
    if args.format == "csv":
        text = csv_text if csv_text is not None else _dict_csv(payload)
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dict_csv(payload):
    flat = {k: v for k, v in payload.items() if not isinstance(v, (dict, list))}
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
    writer.writeheader()
    writer.writerow(flat)
    return buf.getvalue()


def _bounds_csv(reports):
    cols = ["name", "kappa", "delta_T", "delta_S", "e_product", "lhs", "rhs",
            "ratio", "hypothesis_ok", "satisfied"]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.to_dict())
    return buf.getvalue()


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise _UsageError(f"{args.command}: missing required option(s) {', '.join(missing)}")


# -- subcommands ------------------------------------------------------------------

def cmd_gap(args):
    _require(args, "m", "n")
    M = read_subspace_csv(args.m, args.tol)
    N = read_subspace_csv(args.n, args.tol)
    d_mn, d_nm = delta(M, N), delta(N, M)
    _emit(args, {"delta_mn": d_mn, "delta_nm": d_nm, "gap": max(d_mn, d_nm)})
    return EXIT_OK


def cmd_outer(args):
    _require(args, "a", "t", "s")
    A = read_matrix_csv(args.a)
    T = read_subspace_csv(args.t)
    S = read_subspace_csv(args.s)
    tol = geninv.EXIST_TOL if args.tol is None else args.tol
    sol = geninv.outer_inverse(A, T, S, tol=tol)
    payload = {
        "G2": sol.G2.tolist(),
        "kappa": sol.kappa,
        "residual_defining_eq": sol.residual_defining_eq,
        "range_gap": sol.range_gap,
        "kernel_gap": sol.kernel_gap,
        "factorization_diff": sol.factorization_diff,
    }
    _emit(args, payload, format_matrix_csv(sol.G2))
    return EXIT_OK


def cmd_group(args):
    _require(args, "m")
    Mg = geninv.group_inverse(read_matrix_csv(args.m), tol=args.tol)
    _emit(args, {"group_inverse": Mg.tolist()}, format_matrix_csv(Mg))
    return EXIT_OK


def cmd_classic(args):
    _require(args, "a")
    A = read_matrix_csv(args.a)
    kind = args.kind
    if kind == "mp":
        X = geninv.moore_penrose(A, args.tol)
    elif kind == "wmp":
        _require(args, "wm", "wn")
        X = geninv.weighted_moore_penrose(A, read_matrix_csv(args.wm),
                                          read_matrix_csv(args.wn), args.tol)
    elif kind == "drazin":
        X = geninv.drazin(A, args.tol)
    else:
        _require(args, "l")
        X = geninv.bott_duffin(A, read_subspace_csv(args.l, args.tol))
    _emit(args, {"kind": kind, "inverse": X.tolist()}, format_matrix_csv(X))
    return EXIT_OK


def cmd_perturb(args):
    _require(args, "a", "t", "s")
    A = read_matrix_csv(args.a)
    T = read_subspace_csv(args.t)
    S = read_subspace_csv(args.s)
    Tp = read_subspace_csv(args.tp) if args.tp else T
    Sp = read_subspace_csv(args.sp) if args.sp else S
    E = read_matrix_csv(args.e) if args.e else np.zeros_like(A)
    strict = args.strict
    kind = args.kind
    if kind == "t":
        _require(args, "tp")
        res = perturbation.perturb_t(A, T, S, Tp, strict=strict)
        bounds = [perturbation.image_gap_bound(A, T, S, Tp)[0]]
        bounds += perturbation.perturb_t_bounds(A, T, S, Tp)
    elif kind == "s":
        _require(args, "sp")
        res = perturbation.perturb_s(A, T, S, Sp, strict=strict)
        bounds = perturbation.perturb_s_bounds(A, T, S, Sp)
    elif kind == "ts":
        _require(args, "tp", "sp")
        res = perturbation.perturb_ts(A, T, S, Tp, Sp, strict=strict)
        bounds = perturbation.perturb_ts_bounds(A, T, S, Tp, Sp)
    elif kind == "a":
        _require(args, "e")
        res = perturbation.perturb_a(A, E, T, S, strict=strict)
        bounds = perturbation.perturb_a_bounds(A, E, T, S)
    else:
        sc = perturbation.PerturbationScenario(A, E, T, Tp, S, Sp)
        res = perturbation.perturb_full(sc, strict=strict)
        bounds = perturbation.perturb_full_bounds(sc)

    tol = 1e-8 if args.tol is None else args.tol
    ok = res.rel_error < tol and all(b.satisfied for b in bounds if b.hypothesis.satisfied)
    payload = {
        "formula": kind,
        "value": res.value.tolist(),
        "oracle": res.oracle.tolist(),
        "rel_error": res.rel_error,
        "checks": res.checks,
        "hypothesis_ok": res.hypothesis.satisfied,
        "bounds": [b.to_dict() for b in bounds],
        "passed": ok,
    }
    _emit(args, payload, _bounds_csv(bounds))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args):
    config = harness.TrialConfig(
        seed=args.seed if args.seed is not None else 42,
        trials=args.trials,
        n_x=args.nx,
        n_y=args.ny,
        t=args.t,
        gap_budget_T=args.budget_t,
        gap_budget_S=args.budget_s,
        e_budget=args.budget_e,
        formula_tol=1e-8 if args.tol is None else args.tol,
        independent_s=args.independent_s,
    )
    report = harness.run_suite(config, threads=args.threads)
    if args.format == "csv":
        text = report.to_csv()
    else:
        text = report.to_json() + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    agg = report.aggregates
    print(f"{agg['passed']}/{agg['n_trials']} trials passed", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


# -- parser ------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="tolerance (rank, existence or formula, per command)")
    common.add_argument("--out", default=None, help="write output to this file")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=None)

    parser = argparse.ArgumentParser(
        prog="outerinv", description="Outer inverses with prescribed range and kernel.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gap", parents=[common], help="gap between two subspaces")
    p.add_argument("--m")
    p.add_argument("--n")
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("outer", parents=[common], help="compute A^(2)_{T,S}")
    p.add_argument("--a")
    p.add_argument("--t")
    p.add_argument("--s")
    p.set_defaults(func=cmd_outer)

    p = sub.add_parser("group", parents=[common], help="group inverse")
    p.add_argument("--m")
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("classic", parents=[common], help="classical generalized inverses")
    p.add_argument("kind", choices=("mp", "wmp", "drazin", "bott-duffin"))
    p.add_argument("--a")
    p.add_argument("--wm", help="row weight M (weighted Moore-Penrose)")
    p.add_argument("--wn", help="column weight N (weighted Moore-Penrose)")
    p.add_argument("--l", help="subspace L (Bott-Duffin)")
    p.set_defaults(func=cmd_classic)

    p = sub.add_parser("perturb", parents=[common], help="perturbation formulas and bounds")
    p.add_argument("kind", choices=("t", "s", "a", "ts", "full"))
    p.add_argument("--a")
    p.add_argument("--t")
    p.add_argument("--s")
    p.add_argument("--tp", help="perturbed range T'")
    p.add_argument("--sp", help="perturbed kernel S'")
    p.add_argument("--e", help="operator perturbation E")
    p.add_argument("--strict", action="store_true",
                   help="fail when the hypothesis of the formula is violated")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("verify", parents=[common], help="randomized verification suite")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--nx", type=int, default=8)
    p.add_argument("--ny", type=int, default=8)
    p.add_argument("--t", type=int, default=3)
    p.add_argument("--budget-t", type=float, default=0.5)
    p.add_argument("--budget-s", type=float, default=0.5)
    p.add_argument("--budget-e", type=float, default=0.5)
    p.add_argument("--independent-s", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except NotSolvableError as exc:
        diag = exc.diagnostics.to_dict() if exc.diagnostics is not None else None
        _error(exc, diagnostics=diag)
    except (_UsageError, OuterInverseError, OSError, ValueError) as exc:
        _error(exc)
    return EXIT_USAGE


def _error(exc, **extra):
    payload = {"error": type(exc).__name__, "message": str(exc), **extra}
    print(json.dumps(payload, default=float), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
