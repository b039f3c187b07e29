"""Command-line front end: ``nilrf analyze|divisibility|construct|profile|verify``.

Exit codes: 0 success, 1 verification rejected, 2 parse/usage error,
3 validation failure, 4 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Sequence

from . import __version__
from .certify import analyze
from .constructions import (
    QuadraticField,
    galois_twist,
    heisenberg,
    heisenberg_gaussian,
    heisenberg_sum,
    single_matrix_quotient,
)
from .divisibility import divisibility_central, divisibility_oracle, divisibility_upper_primes, rf_profile
from .group import BudgetExceeded, GroupPresentation, ValidationError, validate
from .io import ParseError, dump_group, load_group, verify_report
from .pencils import BlockPencil, parse_blocks, realize

EXIT_OK, EXIT_REJECTED, EXIT_PARSE, EXIT_INVALID, EXIT_RESOURCE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit(report: dict, text: str, out: str | None, as_json: bool):
    if out:
        with open(out, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    if as_json:
        print(json.dumps(report, indent=2))
    else:
        print(text)


def _load(path: str) -> tuple[GroupPresentation, str, list[str]]:
    pres, dig = load_group(path)
    notes = validate(pres)
    return pres, dig, notes


def _base_report(kind: str, pres: GroupPresentation, dig: str, args) -> dict:
    return {
        "kind": kind,
        "tool": "nilrf",
        "version": __version__,
        "input_digest": dig,
        "seed": str(args.seed),
        "group": pres.to_json(),
    }


def cmd_analyze(args) -> int:
    pres, dig, notes = _load(args.path)
    t0 = time.perf_counter()
    verdict = analyze(pres, args.height)
    elapsed = time.perf_counter() - t0
    report = _base_report("analyze", pres, dig, args)
    report["verdict"] = verdict.to_json()
    report["notes"] = notes
    report["timing_seconds"] = f"{elapsed:.3f}"
    lo, hi = verdict.exponent_interval
    lines = [
        f"group: {pres.name or args.path} (m={pres.m}, n={pres.n})",
        f"exponent interval: [{lo}, {hi}]" + ("  tight" if verdict.tight else ""),
        f"delta = {verdict.delta} certified by v = {list(verdict.lower.v)}"
        f" with {len(verdict.lower.terms())} minor term(s)",
        f"d_upper = {verdict.d_upper} via {verdict.upper.method}",
    ]
    if verdict.upper.hyperplane_v is not None:
        lines.append(f"hyperplane normal: {list(verdict.upper.hyperplane_v)}")
    if verdict.upper.good_prime_sample is not None:
        p, basis = verdict.upper.good_prime_sample
        lines.append(f"good prime sample: p = {p}, basis {[list(a) for a, _ in basis]}")
    if verdict.upper.interval is not None:
        lines.append(f"d(phi^C) lies in {list(verdict.upper.interval)} (candidate height bounded)")
    lines += [f"note: {n}" for n in notes]
    _emit(report, "\n".join(lines), args.out, args.json)
    return EXIT_OK


def _parse_ints(text: str, what: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"{what} must be a list of integers, got {text!r}") from None


def cmd_divisibility(args) -> int:
    pres, dig, _ = _load(args.path)
    v = _parse_ints(" ".join(args.v), "v")
    if len(v) != pres.n:
        raise UsageError(f"v must have {pres.n} coordinates")
    if not any(v):
        raise UsageError("v = 0 is the identity; its divisibility is infinite")
    value, wit = divisibility_central(pres, v)
    report = _base_report("divisibility", pres, dig, args)
    report.update({"v": [str(x) for x in v], "value": str(value), "witness": wit.to_json()})
    lines = [
        f"D(0, {v}) = {value}",
        f"witness: p = {wit.p}, k = {wit.k}, a = {list(wit.a)}, index = {wit.lattice_B.index} * {wit.lattice_D.index}",
        f"B basis: {[list(b) for b in wit.lattice_B.vectors()]}",
        f"D basis: {[list(b) for b in wit.lattice_D.vectors()]}",
    ]
    if args.oracle_bound is not None:
        res = divisibility_oracle(pres, v, args.oracle_bound)
        if res is None:
            report["oracle"] = None
            lines.append(f"oracle: no admissible D of index <= {args.oracle_bound}")
        else:
            agree = res.value == value
            report["oracle"] = {"value": str(res.value), "agrees": agree}
            lines.append(f"oracle: {res.value} ({'agrees' if agree else 'DISAGREES'})")
    if args.primes:
        ps = _parse_ints(args.primes, "primes")
        res = divisibility_upper_primes(pres, v, ps)
        if res is None:
            report["upper_primes"] = None
            lines.append("prime upper bound: no admissible prime")
        else:
            report["upper_primes"] = {"value": str(res[0]), "p": str(res[1]), "a": [str(x) for x in res[2]]}
            lines.append(f"prime upper bound: {res[0]} at p = {res[1]}, a = {list(res[2])}")
    _emit(report, "\n".join(lines), args.out, args.json)
    return EXIT_OK


def cmd_construct(args) -> int:
    fam = args.family
    if fam == "heisenberg":
        pres = heisenberg()
    elif fam == "gaussian":
        pres = heisenberg_gaussian()
    elif fam == "quotient":
        pres = single_matrix_quotient()
    elif fam == "sum":
        if args.count is None or args.count < 1:
            raise UsageError("construct sum needs --count >= 1")
        pres = heisenberg_sum(args.count)
    elif fam == "galois":
        if args.disc is None:
            raise UsageError("construct galois needs --disc D")
        try:
            pres = galois_twist(QuadraticField(args.disc))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    elif fam == "pencil":
        if not args.blocks:
            raise UsageError("construct pencil needs --blocks, e.g. 'F(0,1),F(inf,1),S(1)'")
        try:
            blocks = parse_blocks(args.blocks)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        M = realize(BlockPencil(blocks, args.padding))
        pres = GroupPresentation.from_matrices(M.integral_matrices(), name=f"pencil {args.blocks}")
        validate(pres)
    else:  # argparse restricts choices
        raise UsageError(f"unknown family {fam!r}")
    text = dump_group(pres)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_profile(args) -> int:
    pres, dig, _ = _load(args.path)
    if args.r_max < 0:
        raise UsageError("--r-max must be non-negative")
    points = rf_profile(pres, args.r_max)
    report = _base_report("profile", pres, dig, args)
    report["rows"] = [p.to_json() for p in points]
    lines = ["radius | ball size | max divisibility | argmax element"]
    for p in points:
        g = p.argmax_element
        elem = f"(w={list(g.w)}, v={list(g.v)})"
        kind = "" if p.central else "  [abelianization bound]"
        lines.append(f"{p.radius} | {p.ball_size} | {p.max_divisibility} | {elem}{kind}")
    _emit(report, "\n".join(lines), args.out, args.json)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        with open(args.report) as fh:
            report = json.load(fh)
    except OSError as exc:
        raise ParseError(f"{args.report}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{args.report}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        errs = verify_report(report)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ParseError(f"{args.report}: malformed report ({exc})") from None
    if errs:
        for e in errs:
            print(f"REJECTED: {e}")
        return EXIT_REJECTED
    print("accepted")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nilrf", description="Certified residual finiteness growth bounds.")
    parser.add_argument("--version", action="version", version=f"nilrf {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--out", help="write the machine-readable report to this file")
        p.add_argument("--json", action="store_true", help="print the JSON report instead of text")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized heuristics (default 0)")
        p.add_argument("--jobs", type=int, default=1, help="worker count (results do not depend on it)")

    p = sub.add_parser("analyze", help="certified exponent interval")
    p.add_argument("path")
    p.add_argument("--height", type=int, default=None, help="candidate height for the lower-bound search")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("divisibility", help="divisibility of a central element")
    p.add_argument("path")
    p.add_argument("v", nargs="+", help="central coordinates, e.g. 1 0 or 1,0")
    p.add_argument("--oracle-bound", type=int, default=None)
    p.add_argument("--primes", default=None, help="comma-separated primes for the prime upper bound")
    common(p)
    p.set_defaults(func=cmd_divisibility)

    p = sub.add_parser("construct", help="emit a group file for a named family")
    p.add_argument("family", choices=["heisenberg", "gaussian", "sum", "galois", "quotient", "pencil"])
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--disc", type=int, default=None)
    p.add_argument("--blocks", default=None, help="pencil blocks such as 'F(1/2,2),F(inf,1),S(1)'")
    p.add_argument("--padding", type=int, default=0, help="zero rows/columns appended to a pencil")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("profile", help="per-radius divisibility table")
    p.add_argument("path")
    p.add_argument("--r-max", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("verify", help="re-verify a machine-readable report")
    p.add_argument("report")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"invalid group: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (BudgetExceeded, ResourceWarning) as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
