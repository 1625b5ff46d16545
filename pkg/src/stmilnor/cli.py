"""Command line front end.

Subcommands: apply, dickson, bracket, verify, table.  Exit codes: 0 on
success (and on an all-pass verify), 1 when a verify case fails or a
computation errors out, 2 on usage errors (argparse's own convention).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .field import centered, validate_odd_prime
from .invariants import NotDivisibleError, dickson, dickson_decompose, bracket, exact_div, l_poly
from .milnor import act, op_from_text, st_ij
from .oracles import CASE_FAMILIES, reports_to_json, verify_suite
from .poly import ParseError, Polynomial, format_poly, parse

_FAMILY_GROUPS = {
    "all": list(CASE_FAMILIES),
    "L22": ["L22-L2", "L22-L20", "L22-L21"],
    "P31": ["P31-Q0", "P31-Q1"],
    "T32": ["T32-Q0", "T32-Q1"],
    "T33": ["T33-i", "T33-ii", "T33-iii", "T33-iv", "T33-v", "T33-vi"],
}


def _named_constants(p: int) -> dict[str, Polynomial]:
    return {
        "L2": l_poly(2, 2, p),
        "L20": l_poly(2, 0, p),
        "L21": l_poly(2, 1, p),
        "Q20": dickson(2, 0, p),
        "Q21": dickson(2, 1, p),
    }


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-p", type=int, default=3, help="odd prime (default 3)")
    common.add_argument("-n", type=int, default=2, help="number of generators (default 2)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--jobs", type=int, default=1, help="worker count for verify")
    common.add_argument("--seed", type=int, default=0,
                        help="reserved for randomized subcommands")
    common.add_argument("--timings", action="store_true",
                        help="include per-case ms in verify json output")

    ap = argparse.ArgumentParser(prog="stmilnor", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("apply", parents=[common],
                        help="apply an operation to a polynomial expression")
    sp.add_argument("op", help="operation, 'St(i,j)' or 'St{S=(...);R=(...)}'")
    sp.add_argument("expr", help="polynomial; names L2 L20 L21 Q20 Q21 allowed when n=2")

    sp = sub.add_parser("dickson", parents=[common], help="print a Dickson invariant")
    sp.add_argument("-s", type=int, required=True, help="index, 0 <= s < n")

    sp = sub.add_parser("bracket", parents=[common], help="print a bracket determinant")
    sp.add_argument("-k", type=int, default=0, help="number of x rows")
    sp.add_argument("--exps", default="", help="comma separated exponents e_{k+1}..e_n")

    sp = sub.add_parser("verify", parents=[common],
                        help="check the closed-form tables against the engine")
    sp.add_argument("families", nargs="*", default=["all"],
                    help="case families or groups (default: all)")
    sp.add_argument("--rect", type=int, default=None,
                    help="inclusive (i,j) bound for the L22 sweep")

    sp = sub.add_parser("table", parents=[common],
                        help="tabulate nonzero St(i,j) values on a target")
    sp.add_argument("--target", choices=("L2", "L20", "L21", "Q20", "Q21"),
                    default="L2")
    sp.add_argument("--max", type=int, default=None, dest="bound",
                    help="inclusive (i,j) bound (default p^2+p+2)")
    return ap


def _emit_poly(f: Polynomial, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(f.to_json_dict(), sort_keys=True, separators=(",", ":")))
    else:
        print(format_poly(f))


def _factored(value: Polynomial, target: str, p: int) -> str:
    """Render a table value through the Dickson generators when possible."""
    try:
        if target.startswith("L"):
            combo = dickson_decompose(exact_div(value, l_poly(2, 2, p)))
            prefix = "L2"
        else:
            combo = dickson_decompose(value)
            prefix = ""
    except (ValueError, NotDivisibleError):
        return format_poly(value)
    parts = []
    for (a, b), c in sorted(combo.items(), reverse=True):
        factors = ([prefix] if prefix else [])
        if a:
            factors.append(f"Q20^{a}" if a > 1 else "Q20")
        if b:
            factors.append(f"Q21^{b}" if b > 1 else "Q21")
        body = "*".join(factors) if factors else "1"
        cc = centered(c, p)
        if abs(cc) != 1 or body == "1":
            body = f"{abs(cc)}*{body}" if body != "1" else str(abs(cc))
        if not parts:
            parts.append(f"-{body}" if cc < 0 else body)
        else:
            parts.append(f"{'-' if cc < 0 else '+'} {body}")
    return " ".join(parts) if parts else "0"


def _cmd_apply(args) -> int:
    op = op_from_text(args.op)
    names = _named_constants(args.p) if args.n == 2 else None
    f = parse(args.expr, n=args.n, p=args.p, names=names)
    _emit_poly(act(op, f), args.format)
    return 0


def _cmd_dickson(args) -> int:
    _emit_poly(dickson(args.n, args.s, args.p), args.format)
    return 0


def _cmd_bracket(args) -> int:
    exps = tuple(int(v) for v in args.exps.split(",") if v.strip() != "")
    _emit_poly(bracket(args.k, exps, args.n, args.p), args.format)
    return 0


def _cmd_verify(args) -> int:
    fams: list[str] = []
    for name in args.families:
        for f in _FAMILY_GROUPS.get(name, [name]):
            if f not in fams:
                fams.append(f)
    reports = verify_suite(args.p, fams, rect=args.rect, jobs=args.jobs)
    failed = [r for r in reports if r.status == "fail"]
    mismatched = [r for r in reports if r.status == "boundary-mismatch"]
    if args.format == "json":
        print(reports_to_json(reports, include_ms=args.timings))
    else:
        by_family: dict[str, list] = {}
        for r in reports:
            by_family.setdefault(r.case.family, []).append(r)
        for fam, rs in by_family.items():
            ok = sum(1 for r in rs if r.status == "pass")
            line = f"{fam}: {ok}/{len(rs)} pass"
            bm = sum(1 for r in rs if r.status == "boundary-mismatch")
            if bm:
                line += f", {bm} boundary-mismatch"
            if args.timings:
                line += f" ({sum(r.ms for r in rs):.0f} ms)"
            print(line)
        for r in mismatched + failed:
            print(f"{r.status.upper()} {r.case.case_id()}")
            print(f"  engine:  {format_poly(r.lhs)}")
            print(f"  formula: {format_poly(r.rhs)}")
        total_ok = sum(1 for r in reports if r.status == "pass")
        line = f"total: {total_ok}/{len(reports)} pass"
        if mismatched:
            line += f", {len(mismatched)} boundary-mismatch (engine value stands)"
        if failed:
            line += f", {len(failed)} FAIL"
        print(line)
    return 1 if failed else 0


def _cmd_table(args) -> int:
    p = args.p
    bound = args.bound if args.bound is not None else p * p + p + 2
    consts = _named_constants(p)
    target = consts[args.target]
    rows = []
    for i in range(bound + 1):
        for j in range(bound + 1):
            value = act(st_ij(i, j), target)
            if value:
                rows.append((i, j, value))
    if args.format == "json":
        payload = [
            {"i": i, "j": j, "value": v.to_json_dict(),
             "pretty": _factored(v, args.target, p)}
            for i, j, v in rows
        ]
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        print(f"St(i,j) on {args.target}, p={p}, nonzero cells for i,j <= {bound}:")
        for i, j, v in rows:
            print(f"({i},{j})  {_factored(v, args.target, p)}")
    return 0


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        validate_odd_prime(args.p)
        if args.command == "apply":
            return _cmd_apply(args)
        if args.command == "dickson":
            return _cmd_dickson(args)
        if args.command == "bracket":
            return _cmd_bracket(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_table(args)
    except (ParseError, NotDivisibleError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); suppress the shutdown
        # flush traceback and report failure the quiet way
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = 1
    sys.exit(code)


if __name__ == "__main__":
    main()
