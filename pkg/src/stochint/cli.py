"""Command-line frontend.

Subcommands: coeffs (coefficient tables), error (exact truncation
errors), select (truncation-order search), sample (seeded realizations
of catalog integrals), verify (the validation suite).  All outputs are
deterministic given the flags, including seeds, so reruns are
byte-identical.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys

from . import errors as err
from .coeffs import coeff_table
from .expansions import CATALOG_WEIGHTS, KINDS, catalog
from .mc import (
    VALIDATION_CATEGORIES,
    _chunk_ranges,
    _compile,
    _eval_monomials,
    _normal_rows,
    _ZETA_SALT,
    validate_suite,
)
from .orthopoly import BASES, LEGENDRE, Interval


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"{flag} expects comma-separated integers, got {text!r}") from None


def _interval(args) -> Interval:
    try:
        return Interval(args.t, args.T)
    except ValueError as e:
        raise ValueError(f"-t/-T: {e}") from None


def _weights(args, k: int) -> tuple[int, ...]:
    if args.weights is None:
        return (0,) * k
    w = _parse_int_list(args.weights, "-w/--weights")
    if len(w) != k:
        raise ValueError(f"-w/--weights must list k={k} exponents, got {len(w)}")
    return w


def _pattern(args):
    try:
        return err.IndexPattern.from_labels(args.pattern.split(","))
    except ValueError as e:
        raise ValueError(f"--pattern: {e}") from None


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def cmd_coeffs(args) -> int:
    iv = _interval(args)
    w = _weights(args, args.k)
    table = coeff_table(
        args.k, w, args.basis, args.p, iv,
        mode=args.mode, quad_order=args.quad_order,
    )
    summary = (
        f"entries={len(table.entries)} "
        f"parseval={table.parseval_sum():.17g} "
        f"norm={err.norm_squared(args.k, w, iv).value:.17g}"
    )
    if args.output:
        if args.format == "json":
            table.save_json(args.output)
        else:
            table.save_csv(args.output)
        print(summary)
        return 0
    if args.format == "json":
        json.dump(table.to_json_dict(), sys.stdout, indent=1)
        sys.stdout.write("\n")
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow([f"j_{l + 1}" for l in range(table.k)] + ["num", "den", "c"])
        for j, e in table.entries.items():
            num = str(e.cbar.numerator) if e.cbar is not None else ""
            den = str(e.cbar.denominator) if e.cbar is not None else ""
            writer.writerow([*j, num, den, f"{e.c:.17g}"])
    print(summary, file=sys.stderr)
    return 0


def cmd_error(args) -> int:
    iv = _interval(args)
    w = _weights(args, args.k)
    pattern = _pattern(args)
    table = coeff_table(args.k, w, args.basis, args.p, iv)
    if args.sweep:
        out, close = _open_out(args.output)
        try:
            writer = csv.writer(out)
            writer.writerow(["p", "exact", "bound", "ratio"])
            for p in range(args.p + 1):
                rep = err.exact_mse(table, pattern, p)
                writer.writerow(
                    [p, f"{rep.exact:.17g}", f"{rep.bound:.17g}", f"{rep.ratio:.17g}"]
                )
        finally:
            if close:
                out.close()
        return 0
    rep = err.exact_mse(table, pattern, args.p)
    out, close = _open_out(args.output)
    try:
        if args.format == "json":
            json.dump(rep.to_json_dict(), out, indent=1)
            out.write("\n")
        else:
            writer = csv.writer(out)
            writer.writerow(["exact", "bound", "norm", "ratio"])
            writer.writerow(
                [f"{rep.exact:.17g}", f"{rep.bound:.17g}",
                 f"{rep.norm:.17g}", f"{rep.ratio:.17g}"]
            )
    finally:
        if close:
            out.close()
    return 0


def cmd_select(args) -> int:
    iv = _interval(args)
    w = _weights(args, args.k)
    pattern = _pattern(args)
    p = err.select_p(args.k, w, pattern, args.eps, iv, p_max=args.p_max)
    table = coeff_table(args.k, w, LEGENDRE, p, iv)
    rep = err.exact_mse(table, pattern, p)
    print(f"p={p} ratio={rep.ratio:.17g}")
    return 0


def cmd_sample(args) -> int:
    iv = _interval(args)
    for name in args.names:
        if name not in CATALOG_WEIGHTS:
            raise ValueError(
                f"unknown catalog name {name!r}; expected one of "
                f"{', '.join(CATALOG_WEIGHTS)}"
            )
    pattern = None
    if args.pattern is not None:
        pattern = _parse_int_list(args.pattern, "--pattern")
        sizes = {len(CATALOG_WEIGHTS[n]) for n in args.names}
        if sizes != {len(pattern)}:
            raise ValueError(
                f"--pattern has {len(pattern)} labels but the requested names "
                f"need {sorted(sizes)}"
            )
        if any(i < 0 for i in pattern):
            raise ValueError("--pattern labels must be >= 0")

    expansions = []
    for name in args.names:
        ipat = pattern if pattern is not None else tuple(
            range(1, len(CATALOG_WEIGHTS[name]) + 1)
        )
        expansions.append(catalog(name, args.q, ipat, iv, kind=args.kind))
    m = max(max(e.spec.i_pattern, default=0) for e in expansions)
    m = max(m, 1)
    width = m * (args.q + 1)
    compiled = [_compile(e, m, 1.0) for e in expansions]

    rows = []
    for r0, r1 in _chunk_ranges(args.n):
        Z = _normal_rows(args.seed, _ZETA_SALT, r0, r1, width)
        cols = [_eval_monomials(monos, Z) for monos in compiled]
        for r in range(r1 - r0):
            rows.append([float(c[r]) for c in cols])

    out, close = _open_out(args.output)
    try:
        if args.format == "json":
            json.dump(
                {
                    "names": list(args.names),
                    "kind": args.kind,
                    "q": args.q,
                    "seed": args.seed,
                    "n": args.n,
                    "t": iv.t,
                    "T": iv.T,
                    "pattern": list(pattern) if pattern is not None else None,
                    "rows": rows,
                },
                out,
                indent=1,
            )
            out.write("\n")
        else:
            writer = csv.writer(out)
            writer.writerow(args.names)
            for row in rows:
                writer.writerow([f"{x:.17g}" for x in row])
    finally:
        if close:
            out.close()
    return 0


def cmd_verify(args) -> int:
    only = None
    if args.only:
        only = []
        for item in args.only:
            only.extend(x for x in item.split(",") if x)
    report = validate_suite(
        level="full" if args.full else "quick",
        only=only,
        seed=args.seed,
        workers=args.workers,
    )
    for c in report["checks"]:
        status = "PASS" if c["pass"] else "FAIL"
        print(
            f"{status}  {c['check']}: observed={c['observed']} "
            f"expected={c['expected']} tol={c['tolerance']}"
        )
    n_pass = sum(1 for c in report["checks"] if c["pass"])
    print(f"{n_pass}/{len(report['checks'])} checks passed ({report['level']})")
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(report, fh, indent=1)
            fh.write("\n")
    return 0 if report["passed"] else 1


def _add_interval_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("-t", type=float, default=0.0, help="interval start (default 0)")
    p.add_argument("-T", type=float, default=1.0, help="interval end (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stochint",
        description="Mean-square approximation of iterated stochastic integrals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="build and write a coefficient table")
    p.add_argument("-k", type=int, required=True, help="number of nesting levels")
    p.add_argument("-w", "--weights", help="comma-separated weight exponents (default all 0)")
    p.add_argument("-p", type=int, required=True, help="truncation order")
    p.add_argument("--basis", choices=BASES, default=LEGENDRE)
    p.add_argument("--mode", choices=("auto", "exact", "numeric"), default="auto")
    p.add_argument("--quad-order", type=int, default=None)
    _add_interval_opts(p)
    p.add_argument("-o", "--output", help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("error", help="exact mean-square truncation error")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-w", "--weights")
    p.add_argument("-p", type=int, required=True)
    p.add_argument(
        "--pattern", required=True,
        help="comma-separated component labels, e.g. 1,1,2 (equality classes)",
    )
    p.add_argument("--basis", choices=BASES, default=LEGENDRE)
    p.add_argument("--sweep", action="store_true", help="CSV sweep over p=0..P")
    _add_interval_opts(p)
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_error)

    p = sub.add_parser("select", help="smallest truncation order meeting a target")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-w", "--weights")
    p.add_argument("--pattern", required=True)
    p.add_argument("--eps", type=float, required=True, help="relative error target")
    p.add_argument("--p-max", type=int, default=8)
    _add_interval_opts(p)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("sample", help="seeded realizations of catalog integrals")
    p.add_argument("names", nargs="+", help="catalog names, e.g. I_(00) I_(10)")
    p.add_argument("-q", type=int, required=True, help="truncation order")
    p.add_argument("-n", type=int, default=1, help="number of samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pattern", help="comma-separated component indices (0 = time)")
    p.add_argument("--kind", choices=KINDS, default="ito")
    _add_interval_opts(p)
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", help="run the validation suite")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--quick", action="store_true", default=True)
    g.add_argument("--full", action="store_true", default=False)
    p.add_argument(
        "--only", action="append",
        help=f"restrict to categories: {', '.join(VALIDATION_CATEGORIES)}",
    )
    p.add_argument("--seed", type=int, default=20260815)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("-o", "--output", help="write the JSON report here")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
