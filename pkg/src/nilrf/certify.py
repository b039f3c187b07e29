"""Certified bounds on the residual finiteness growth exponent.

The lower bound is certified by an explicit identity ``(v^T x)^d = sum lambda_j q_j``
with q_j minors of ``M_x``; the upper bound is ``d(phi^C)``, computed exactly
for n <= 2 and bracketed for n >= 3.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd, prod
from typing import Mapping, Sequence

from .forms import (
    HomogeneousForm,
    MinorGenerator,
    SpanBuilder,
    SymbolicPencil,
    gcd_binary_forms,
    minor_det,
    minor_ideal_generators,
    minor_span,
    rational_linear_factor,
)
from .group import GroupPresentation, validate
from .linalg import is_prime, primes, projective_reps, rank, rank_mod

__all__ = [
    "LowerBoundCertificate",
    "UpperBoundReport",
    "RFVerdict",
    "CertificateError",
    "InternalInconsistency",
    "pencil_of",
    "ideal_generators",
    "membership",
    "verify_certificate",
    "delta_search",
    "upper_bound_d",
    "good_prime_basis",
    "good_prime_scan",
    "analyze",
    "primitive_vectors",
]

DEFAULT_HEIGHT = 5
# Candidate counts grow like (2H+1)^n; wider pencils get a smaller default.
DEFAULT_HEIGHT_WIDE = 2


def default_height(n: int) -> int:
    return DEFAULT_HEIGHT if n <= 2 else DEFAULT_HEIGHT_WIDE
EXHAUSTIVE_LIMIT = 20_000


class CertificateError(ValueError):
    """A certificate failed exact re-expansion."""


class InternalInconsistency(RuntimeError):
    """A proven guarantee was violated; indicates a bug."""


def pencil_of(pres: GroupPresentation) -> SymbolicPencil:
    return SymbolicPencil.from_matrices(list(pres.A), pres.m)


def _linear_power(v: Sequence[int], d: int) -> HomogeneousForm:
    return HomogeneousForm.linear_power(list(v), d)


# ---------------------------------------------------------------- generators


def _exhaustive_estimate(M: SymbolicPencil, d: int) -> int:
    total = 1
    for comp in M.components():
        s = len(comp)
        total *= sum(comb(s, j) ** 2 for j in range(min(s, d) + 1))
    return total


def ideal_generators(M: SymbolicPencil, d: int) -> list[MinorGenerator]:
    """Generators of I_d(M_x) as explicit minors.

    Small pencils get the full canonical list of distinct minors; larger
    ones get a spanning set of minors built block by block.
    """
    if d == 0:
        return [MinorGenerator((), (), Fraction(1), HomogeneousForm.one(M.nvars))]
    if _exhaustive_estimate(M, d) <= EXHAUSTIVE_LIMIT:
        return minor_ideal_generators(M, d)
    return minor_span(M, d)


class _IdealSpan:
    """Echelon form of the generators of I_d, reused across candidate vectors."""

    def __init__(self, M: SymbolicPencil, d: int):
        self.M, self.d = M, d
        self.gens = ideal_generators(M, d)
        self.span = SpanBuilder()
        for g in self.gens:
            self.span.add(g.form)

    def solve(self, target: HomogeneousForm) -> list[Fraction] | None:
        combo = self.span.express(target)
        if combo is None:
            return None
        return [combo.get(i, Fraction(0)) for i in range(len(self.gens))]


# ---------------------------------------------------------------- certificates


@dataclass(frozen=True)
class LowerBoundCertificate:
    """``(v^T x)^d = sum_j lambda_j q_j`` with ``q_j = det M[rows_j, cols_j] / scale_j``."""

    v: tuple[int, ...]
    d: int
    generators: tuple[MinorGenerator, ...]
    lam: tuple[Fraction, ...]
    integral: bool = field(default=False)

    def terms(self):
        return [(g, c) for g, c in zip(self.generators, self.lam) if c]

    def to_json(self) -> dict:
        return {
            "v": [str(x) for x in self.v],
            "d": str(self.d),
            "integral_lambda": self.integral,
            "terms": [
                {
                    "rows": [str(r) for r in g.rows],
                    "cols": [str(c) for c in g.cols],
                    "scale": str(g.scale),
                    "lambda": str(c),
                    "form": g.form.to_json(),
                }
                for g, c in self.terms()
            ],
        }


def verify_certificate(M: SymbolicPencil, v: Sequence[int], d: int,
                       terms: Sequence[tuple[Sequence[int], Sequence[int], Fraction, Fraction]]) -> bool:
    """Recompute every minor from the pencil and check the identity exactly.

    ``terms`` holds ``(rows, cols, scale, lambda)``; the generator used is
    ``det M[rows, cols] / scale``.
    """
    if d < 0 or d > M.m:
        return False
    total = HomogeneousForm.zero(M.nvars, d)
    for rows, cols, scale, lam in terms:
        if len(rows) != d or len(cols) != d:
            return False
        if scale == 0:
            return False
        det = minor_det(M, rows, cols)
        total = total + det * (Fraction(lam) / Fraction(scale))
    return (total - _linear_power(v, d)).is_zero()


def _make_certificate(M: SymbolicPencil, v, d, gens, lam) -> LowerBoundCertificate:
    lam = tuple(Fraction(x) for x in lam)
    terms = [(g.rows, g.cols, g.scale, c) for g, c in zip(gens, lam) if c]
    if not verify_certificate(M, v, d, terms):
        raise CertificateError(f"certificate for v={v}, d={d} does not re-expand")
    integral = all(c.denominator == 1 for c in lam)
    return LowerBoundCertificate(tuple(v), d, tuple(gens), lam, integral)


def membership(v: Sequence[int], d: int, M: SymbolicPencil) -> LowerBoundCertificate | None:
    """Solve ``(v^T x)^d = sum lambda_j q_j`` over Q.

    The system is solved with leftmost pivots and free coefficients set to
    zero, so the answer is canonical for the generator order.
    """
    v = tuple(int(x) for x in v)
    if len(v) != M.nvars:
        raise ValueError(f"v must have {M.nvars} coordinates")
    if not any(v):
        raise ValueError("v must be nonzero")
    if not 0 <= d <= M.m:
        raise ValueError(f"d must lie in 0..{M.m}")
    span = _IdealSpan(M, d)
    lam = span.solve(_linear_power(v, d))
    if lam is None:
        return None
    return _make_certificate(M, v, d, span.gens, lam)


def primitive_vectors(n: int, height: int) -> list[tuple[int, ...]]:
    """Primitive integer vectors of sup-norm <= height, one per sign pair,
    ordered by height, then L1 norm, then descending tuple."""
    out = []
    for vec in itertools.product(range(-height, height + 1), repeat=n):
        if not any(vec):
            continue
        first = next(x for x in vec if x)
        if first < 0:
            continue
        g = 0
        for x in vec:
            g = gcd(g, x)
        if g != 1:
            continue
        out.append(vec)
    out.sort(key=lambda t: (max(map(abs, t)), sum(map(abs, t)), tuple(-x for x in t)))
    return out


def _candidates(M: SymbolicPencil, d: int, span: _IdealSpan, height: int) -> list[tuple[int, ...]]:
    n = M.nvars
    cands: list[tuple[int, ...]] = []
    if n == 2 and span.gens:
        g = gcd_binary_forms([x.form for x in span.gens])
        if g.degree > 0:
            fac = rational_linear_factor(g)
            if fac is not None:
                cands.append(fac[0])
    for i in range(n):
        cands.append(tuple(int(i == j) for j in range(n)))
    cands.extend(primitive_vectors(n, height))
    seen, out = set(), []
    for c in cands:
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def delta_search(M: SymbolicPencil, height: int | None = None) -> tuple[int, LowerBoundCertificate]:
    """Largest d with a certified ``(v^T x)^d in I_d(M_x)``, scanning d downward
    from the generic rank of the pencil."""
    if height is None:
        height = default_height(M.nvars)
    r = M.generic_rank()
    for d in range(r, -1, -1):
        span = _IdealSpan(M, d)
        if not span.gens:
            continue
        for v in _candidates(M, d, span, height):
            lam = span.solve(_linear_power(v, d))
            if lam is not None:
                return d, _make_certificate(M, v, d, span.gens, lam)
        if M.nvars == 1:
            raise InternalInconsistency(f"a nonzero {d}x{d} minor exists but x^{d} was not certified")
    raise InternalInconsistency("no certificate found even at d = 0")


# ---------------------------------------------------------------- upper bound


@dataclass(frozen=True)
class UpperBoundReport:
    d_upper: int
    method: str  # rank_n1 | binary_gcd_n2 | heuristic_interval
    hyperplane_v: tuple[int, ...] | None = None
    good_prime_sample: tuple | None = None
    interval: tuple[int, int] | None = None
    basis: tuple[tuple[int, ...], ...] | None = None

    def to_json(self) -> dict:
        out: dict = {"d_upper": str(self.d_upper), "method": self.method}
        if self.hyperplane_v is not None:
            out["hyperplane_v"] = [str(x) for x in self.hyperplane_v]
        if self.good_prime_sample is not None:
            p, basis = self.good_prime_sample
            out["good_prime"] = {
                "p": str(p),
                "basis": [{"a": [str(x) for x in a], "rank": str(r)} for a, r in basis],
            }
        if self.interval is not None:
            out["interval"] = [str(x) for x in self.interval]
        if self.basis is not None:
            out["basis"] = [[str(x) for x in a] for a in self.basis]
        return out


def _contract(M: SymbolicPencil, a: Sequence[int]) -> list[list[Fraction]]:
    return M.evaluate(a)


def _int_rows(mat: list[list[Fraction]]) -> list[list[int]]:
    den = 1
    for row in mat:
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
    return [[int(x * den) for x in row] for row in mat]


def good_prime_basis(M: SymbolicPencil, p: int, d_target: int):
    """A basis a^(1..n) of (Z/p)^n with every ``rank_p M_a <= d_target``, or None.

    Returns a list of ``(a, rank)`` pairs.  The pencil must be integral.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not a prime")
    if any(x.denominator != 1 for A in M.matrices for r in A for x in r):
        raise ValueError("good primes are defined for integral pencils only")
    n = M.nvars
    low = []
    for a in projective_reps(n, p, p):
        rk = rank_mod([[int(x) for x in r] for r in M.evaluate(a)], p)
        if rk <= d_target:
            low.append((a, rk))
    low.sort(key=lambda t: t[1])
    basis: list[tuple[tuple[int, ...], int]] = []
    for a, rk in low:
        if rank_mod([list(b) for b, _ in basis] + [list(a)], p) > len(basis):
            basis.append((a, rk))
            if len(basis) == n:
                return basis
    return None


def good_prime_scan(M: SymbolicPencil, d_target: int, count: int = 50):
    """Which of the first ``count`` primes admit a low-rank basis."""
    return {p: good_prime_basis(M, p, d_target) is not None for p in primes(count)}


def _binary_gcd_upper(M: SymbolicPencil) -> tuple[int, tuple[int, ...] | None]:
    best, hyper = 0, None
    for d in range(1, M.m + 1):
        gens = minor_span(M, d)
        if not gens:
            break
        g = gcd_binary_forms([x.form for x in gens])
        if g.degree == 0:
            best, hyper = d, None
            continue
        fac = rational_linear_factor(g)
        if fac is None:
            break
        best, hyper = d, fac[0]
    return best, hyper


def _integral_basis_upper(M: SymbolicPencil, height: int) -> tuple[int, tuple[tuple[int, ...], ...]]:
    """Min over bases drawn from primitive vectors of bounded height of the
    max rank; greedy in rank order is optimal (matroid)."""
    scored = []
    for a in primitive_vectors(M.nvars, height):
        scored.append((rank(_int_rows(_contract(M, a))), a))
    scored.sort(key=lambda t: t[0])
    basis: list[tuple[int, ...]] = []
    worst = 0
    for rk, a in scored:
        if rank([list(b) for b in basis] + [list(a)]) > len(basis):
            basis.append(a)
            worst = max(worst, rk)
            if len(basis) == M.nvars:
                break
    if len(basis) < M.nvars:
        raise InternalInconsistency("candidate vectors do not span")
    return worst, tuple(basis)


def upper_bound_d(M: SymbolicPencil, delta: int | None = None, height: int = 2,
                  prime_count: int = 50) -> UpperBoundReport:
    """``d(phi^C)``: exact for n <= 2, an interval for n >= 3."""
    n = M.nvars
    if n == 1:
        return UpperBoundReport(rank(_int_rows([list(r) for r in M.matrices[0]])), "rank_n1")
    if n == 2:
        d, hyper = _binary_gcd_upper(M)
        if d % 2:
            raise InternalInconsistency(f"d(phi^C) = {d} is odd")
        sample = None
        if all(x.denominator == 1 for A in M.matrices for r in A for x in r):
            for p in primes(prime_count):
                basis = good_prime_basis(M, p, d)
                if basis is not None:
                    sample = (p, tuple(basis))
                    break
        return UpperBoundReport(d, "binary_gcd_n2", hyper, sample)
    upper, basis = _integral_basis_upper(M, height)
    lower = delta if delta is not None else delta_search(M)[0]
    return UpperBoundReport(upper, "heuristic_interval", interval=(lower, upper), basis=basis)


# ---------------------------------------------------------------- verdict


@dataclass(frozen=True)
class RFVerdict:
    delta: int
    d_upper: int
    lower: LowerBoundCertificate
    upper: UpperBoundReport

    @property
    def exponent_interval(self) -> tuple[int, int]:
        return (self.delta + 1, self.d_upper + 1)

    @property
    def tight(self) -> bool:
        return self.delta == self.d_upper

    def to_json(self) -> dict:
        return {
            "delta": str(self.delta),
            "d_upper": str(self.d_upper),
            "exponent_interval": [str(x) for x in self.exponent_interval],
            "tight": self.tight,
            "lower_certificate": self.lower.to_json(),
            "upper_report": self.upper.to_json(),
        }


def analyze(pres: GroupPresentation, height: int | None = None) -> RFVerdict:
    validate(pres)
    M = pencil_of(pres)
    delta, cert = delta_search(M, height)
    upper = upper_bound_d(M, delta)
    if delta > upper.d_upper:
        raise InternalInconsistency(f"lower bound {delta} exceeds upper bound {upper.d_upper}")
    verdict = RFVerdict(delta, upper.d_upper, cert, upper)
    if pres.n <= 2 and not verdict.tight:
        raise InternalInconsistency(f"bounds {delta} < {upper.d_upper} are not tight for n = {pres.n}")
    return verdict
