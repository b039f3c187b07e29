"""Group definition files and machine-readable reports (JSON, integers as strings)."""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any

from .forms import SymbolicPencil
from .group import GroupPresentation, validate
from .linalg import IntMatrix, Sublattice

__all__ = ["ParseError", "parse_group", "load_group", "dump_group", "digest", "verify_report"]


class ParseError(ValueError):
    """Malformed input file; the message names the offending location."""


def _int(x: Any, where: str) -> int:
    if isinstance(x, bool):
        raise ParseError(f"{where}: expected an integer, got a boolean")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x.strip())
        except ValueError:
            pass
    raise ParseError(f"{where}: expected an integer (number or decimal string), got {x!r}")


def parse_group(text: str) -> GroupPresentation:
    """Parse a group file; raises ParseError on malformed input.

    Validation (skew-symmetry, fullness) is left to :func:`validate`.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ParseError("top level: expected an object with fields m, n, matrices")
    for key in ("m", "n", "matrices"):
        if key not in data:
            raise ParseError(f"top level: missing field {key!r}")
    m = _int(data["m"], "m")
    n = _int(data["n"], "n")
    if m < 1 or n < 1:
        raise ParseError("m and n must be positive")
    mats = data["matrices"]
    if not isinstance(mats, list) or len(mats) != n:
        raise ParseError(f"matrices: expected a list of {n} matrices")
    parsed = []
    for k, mat in enumerate(mats):
        if not isinstance(mat, list) or len(mat) != m:
            raise ParseError(f"matrices[{k}]: expected {m} rows")
        rows = []
        for i, row in enumerate(mat):
            if not isinstance(row, list) or len(row) != m:
                raise ParseError(f"matrices[{k}][{i}]: expected {m} entries")
            rows.append([_int(x, f"matrices[{k}][{i}][{j}]") for j, x in enumerate(row)])
        parsed.append(IntMatrix.from_rows(rows))
    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise ParseError("name: expected a string")
    return GroupPresentation(m, n, tuple(parsed), name)


def load_group(path: str) -> tuple[GroupPresentation, str]:
    """Read and parse a group file; returns the presentation and the input digest."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise ParseError(f"{path}: not UTF-8 text") from None
    return parse_group(text), digest(raw)


def dump_group(pres: GroupPresentation) -> str:
    """JSON text with one matrix row per line."""
    data = pres.to_json()
    lines = ["{"]
    if "name" in data:
        lines.append(f'  "name": {json.dumps(data["name"])},')
    lines.append(f'  "m": "{data["m"]}",')
    lines.append(f'  "n": "{data["n"]}",')
    lines.append('  "matrices": [')
    mats = data["matrices"]
    for k, mat in enumerate(mats):
        lines.append("    [")
        for i, row in enumerate(mat):
            sep = "," if i < len(mat) - 1 else ""
            lines.append("      " + json.dumps(row) + sep)
        lines.append("    ]" + ("," if k < len(mats) - 1 else ""))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def digest(raw: bytes) -> str:
    return "sha256:" + hashlib.sha256(raw).hexdigest()


# ---------------------------------------------------------------- verification


def _verify_lower(pres: GroupPresentation, cert: dict) -> list[str]:
    from .certify import verify_certificate

    M = SymbolicPencil.from_matrices(list(pres.A), pres.m)
    v = [int(x) for x in cert["v"]]
    d = int(cert["d"])
    terms = [
        ([int(r) for r in t["rows"]], [int(c) for c in t["cols"]], Fraction(t["scale"]), Fraction(t["lambda"]))
        for t in cert["terms"]
    ]
    if not any(v):
        return ["lower certificate: v is zero"]
    if not verify_certificate(M, v, d, terms):
        return ["lower certificate: the identity does not re-expand"]
    return []


def _verify_upper(pres: GroupPresentation, rep: dict, delta: int) -> list[str]:
    from .certify import upper_bound_d

    M = SymbolicPencil.from_matrices(list(pres.A), pres.m)
    fresh = upper_bound_d(M, delta)
    if str(fresh.d_upper) != rep["d_upper"] or fresh.method != rep["method"]:
        return [f"upper report: recomputed {fresh.d_upper} ({fresh.method}) differs from {rep['d_upper']}"]
    return []


def _verify_divisibility(pres: GroupPresentation, v: list[int], value: int, wit: dict) -> list[str]:
    """Check that N_{B,D} is a normal subgroup missing (0, v) of index ``value``."""
    errs = []
    B = Sublattice.spanned_by([[int(x) for x in b] for b in wit["B"]], pres.m)
    D = Sublattice.spanned_by([[int(x) for x in b] for b in wit["D"]], pres.n)
    if B.index is None or D.index is None:
        return ["divisibility witness: B or D is not of finite index"]
    if B.index * D.index != value:
        errs.append(f"divisibility witness: index {B.index}*{D.index} != {value}")
    if D.contains(v):
        errs.append("divisibility witness: D contains v")
    for b in B.vectors():
        for j in range(pres.m):
            e = tuple(int(i == j) for i in range(pres.m))
            if not D.contains(pres.phi(b, e)):
                errs.append("divisibility witness: phi(B, Z^m) is not inside D")
                return errs
    return errs


def verify_report(report: dict) -> list[str]:
    """Re-verify a report from its own contents; returns a list of failures."""
    if "group" not in report:
        return ["report has no embedded group"]
    pres = parse_group(json.dumps(report["group"]))
    validate(pres)
    errs: list[str] = []
    kind = report.get("kind")
    if kind == "analyze":
        verdict = report["verdict"]
        errs += _verify_lower(pres, verdict["lower_certificate"])
        delta = int(verdict["delta"])
        if int(verdict["lower_certificate"]["d"]) != delta:
            errs.append("verdict: delta differs from the certificate degree")
        errs += _verify_upper(pres, verdict["upper_report"], delta)
        lo, hi = (int(x) for x in verdict["exponent_interval"])
        if (lo, hi) != (delta + 1, int(verdict["d_upper"]) + 1):
            errs.append("verdict: exponent interval is inconsistent")
    elif kind == "divisibility":
        v = [int(x) for x in report["v"]]
        errs += _verify_divisibility(pres, v, int(report["value"]), report["witness"])
    elif kind == "profile":
        from .divisibility import rf_profile

        rows = report["rows"]
        fresh = [p.to_json() for p in rf_profile(pres, len(rows))]
        if fresh != rows:
            errs.append("profile: recomputed table differs")
    else:
        errs.append(f"unknown report kind {kind!r}")
    return errs
