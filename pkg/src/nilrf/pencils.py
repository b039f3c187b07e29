"""Canonical blocks of skew pencils in two variables and the d_y invariant."""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .forms import (
    HomogeneousForm,
    SpanBuilder,
    SymbolicPencil,
    binary_forms_basis,
    gcd_minors_binary,
    minor_span,
)

__all__ = [
    "BlockSpec",
    "BlockPencil",
    "FINITE",
    "INFINITE",
    "SINGULAR",
    "hankel_block",
    "singular_inner",
    "block_matrices",
    "realize",
    "d_y_formula",
    "d_y_exact",
    "block_minor_ideals",
    "expected_block_ideal",
    "ideal_degree_span",
    "ideals_equal",
    "resultant_span_identity",
    "random_block_pencil",
    "parse_blocks",
]

FINITE = "finite"
INFINITE = "infinite"
SINGULAR = "singular"

# A linear form a*x + b*y is stored as the pair (a, b).
Lin = tuple[Fraction, Fraction]
_ZERO: Lin = (Fraction(0), Fraction(0))


@dataclass(frozen=True)
class BlockSpec:
    kind: str
    k: int
    alpha: Fraction | None = None

    def __post_init__(self):
        if self.kind not in (FINITE, INFINITE, SINGULAR):
            raise ValueError(f"unknown block kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("block parameter k must be >= 1")
        if self.kind == FINITE:
            if self.alpha is None:
                raise ValueError("finite blocks need an eigenvalue")
            object.__setattr__(self, "alpha", Fraction(self.alpha))
        elif self.alpha is not None:
            raise ValueError("only finite blocks carry an eigenvalue")

    @property
    def size(self) -> int:
        return 2 * self.k + (1 if self.kind == SINGULAR else 0)

    def __str__(self):
        if self.kind == FINITE:
            return f"F({self.alpha},{self.k})"
        if self.kind == INFINITE:
            return f"F(inf,{self.k})"
        return f"S({self.k})"


@dataclass(frozen=True)
class BlockPencil:
    blocks: tuple[BlockSpec, ...]
    zero_padding: int = 0

    @property
    def size(self) -> int:
        return sum(b.size for b in self.blocks) + self.zero_padding


def hankel_block(k: int, a: Lin, b: Lin) -> list[list[Lin]]:
    """``E_k(a, b)``: a on the anti-diagonal, b just below it."""
    out = [[_ZERO] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            if i + j == k - 1:
                out[i][j] = a
            elif i + j == k:
                out[i][j] = b
    return out


def singular_inner(k: int, a: Lin, b: Lin) -> list[list[Lin]]:
    """``L_k(a, b)``: (k+1) x k with a on the diagonal and b just below it."""
    out = [[_ZERO] * k for _ in range(k + 1)]
    for j in range(k):
        out[j][j] = a
        out[j + 1][j] = b
    return out


def _neg(f: Lin) -> Lin:
    return (-f[0], -f[1])


def _skew_from_inner(inner: list[list[Lin]]) -> list[list[Lin]]:
    """``[[0, X], [-X^T, 0]]`` for an r x c matrix X of linear forms."""
    r, c = len(inner), len(inner[0])
    size = r + c
    out = [[_ZERO] * size for _ in range(size)]
    for i in range(r):
        for j in range(c):
            out[i][r + j] = inner[i][j]
            out[r + j][i] = _neg(inner[i][j])
    return out


def _inner_for(spec: BlockSpec) -> list[list[Lin]]:
    x: Lin = (Fraction(1), Fraction(0))
    y: Lin = (Fraction(0), Fraction(1))
    if spec.kind == FINITE:
        return hankel_block(spec.k, (Fraction(1), -spec.alpha), y)
    if spec.kind == INFINITE:
        return hankel_block(spec.k, y, x)
    return singular_inner(spec.k, x, y)


def block_matrices(spec: BlockSpec) -> list[list[Lin]]:
    return _skew_from_inner(_inner_for(spec))


def _to_pencil(mat: list[list[Lin]], check_skew: bool = True) -> SymbolicPencil:
    size = len(mat)
    cols = len(mat[0]) if mat else 0
    A1 = [[mat[i][j][0] for j in range(cols)] for i in range(size)]
    A2 = [[mat[i][j][1] for j in range(cols)] for i in range(size)]
    return SymbolicPencil.from_matrices([A1, A2], size, check_skew=check_skew)


def realize(spec: BlockPencil) -> SymbolicPencil:
    """Block-diagonal pencil ``x A_1 + y A_2`` with the listed blocks, then zeros."""
    m = spec.size
    full = [[_ZERO] * m for _ in range(m)]
    off = 0
    for b in spec.blocks:
        blk = block_matrices(b)
        for i, row in enumerate(blk):
            for j, f in enumerate(row):
                full[off + i][off + j] = f
        off += b.size
    if m == 0:
        return SymbolicPencil(0, 2, ((), ()))
    return _to_pencil(full)


def d_y_formula(spec: BlockPencil) -> int:
    """``2(f + sum s_i - max s_i)`` with the max over finite eigenvalues only."""
    f = 0
    counts: dict[Fraction, int] = {}
    for b in spec.blocks:
        if b.kind == FINITE:
            f += b.k - 1
            counts[b.alpha] = counts.get(b.alpha, 0) + 1
        else:
            f += b.k
    s_total = sum(counts.values())
    s_max = max(counts.values(), default=0)
    return 2 * (f + s_total - s_max)


def d_y_exact(M: SymbolicPencil) -> int:
    """Largest d such that the gcd of the d x d minors is a power of y.

    Equivalently the rank of ``t A_1 + A_2`` is at least d for every complex
    t.  The ideals shrink as d grows, so the scan stops at the first failure.
    """
    if M.nvars != 2:
        raise ValueError("d_y needs a pencil in two variables")
    best = 0
    for d in range(1, M.m + 1):
        g = gcd_minors_binary(M, d)
        if g.is_zero() or g.dehomogenize().degree > 0:
            break
        best = d
    return best


# ---------------------------------------------------------------- ideals


def expected_block_ideal(kind: str, k: int, d: int, alpha=None) -> list[HomogeneousForm]:
    """Generators of the known minor ideal of one block (two variables)."""
    x = HomogeneousForm.linear([1, 0])
    y = HomogeneousForm.linear([0, 1])
    if kind in (FINITE, INFINITE) and d == k - 1:
        return binary_forms_basis(k - 1)
    if kind == INFINITE and d == k:
        return [y**k]
    if kind == FINITE and d == k:
        return [(x - y * Fraction(alpha)) ** k]
    if kind == SINGULAR and d == 2 * k:
        return binary_forms_basis(2 * k)
    if kind == SINGULAR and d == 2 * k + 1:
        return []
    raise ValueError(f"no known minor ideal for kind={kind}, k={k}, d={d}")


def block_minor_ideals(kind: str, k: int, d: int, alpha=None) -> list[HomogeneousForm]:
    """Span of the d x d minors of the inner Hankel matrix (eigenvalue blocks)
    or of the full singular block."""
    if kind in (FINITE, INFINITE):
        if d not in (k - 1, k):
            raise ValueError(f"unsupported minor size {d} for an eigenvalue block with k={k}")
        spec = BlockSpec(kind, k, alpha)
        pencil = _to_pencil(_inner_for(spec), check_skew=False)
    elif kind == SINGULAR:
        if d not in (2 * k, 2 * k + 1):
            raise ValueError(f"unsupported minor size {d} for a singular block with k={k}")
        pencil = realize(BlockPencil((BlockSpec(SINGULAR, k),)))
    else:
        raise ValueError(f"unknown block kind {kind!r}")
    if d == 0:
        return [HomogeneousForm.one(2)]
    return [g.form for g in minor_span(pencil, d)]


def ideal_degree_span(gens: Sequence[HomogeneousForm], degree: int, nvars: int = 2) -> SpanBuilder:
    """Degree-``degree`` part of the ideal generated by ``gens``."""
    sb = SpanBuilder()
    for g in gens:
        if g.degree > degree or g.is_zero():
            continue
        for mono in _monomials(nvars, degree - g.degree):
            sb.add(g * mono)
    return sb


def _monomials(nvars: int, degree: int):
    def rec(i, left):
        if i == nvars - 1:
            yield (left,)
            return
        for e in range(left, -1, -1):
            for rest in rec(i + 1, left - e):
                yield (e,) + rest

    for e in rec(0, degree):
        yield HomogeneousForm.monomial(e)


def ideals_equal(g1: Sequence[HomogeneousForm], g2: Sequence[HomogeneousForm], degree: int, nvars: int = 2) -> bool:
    """Span equality of the two ideals at ``degree`` and ``degree + 1``."""
    for deg in (degree, degree + 1):
        s1 = ideal_degree_span(g1, deg, nvars)
        s2 = ideal_degree_span(g2, deg, nvars)
        if s1.dim != s2.dim:
            return False
        for g in g1:
            if g.degree == deg and not s2.contains(g):
                return False
        for g in g2:
            if g.degree == deg and not s1.contains(g):
                return False
        # both spans have equal dimension; check generators of one in the other
        for _, row, _ in s1.rows:
            f = HomogeneousForm.from_dict(nvars, deg, row)
            if not s2.contains(f):
                return False
    return True


def resultant_span_identity(r1: int, r2: int, alpha, beta) -> bool:
    """Whether ``(x - alpha y)^r1 H_{r2-1} + (x - beta y)^r2 H_{r1-1}`` fills H_{r1+r2-1}."""
    x = HomogeneousForm.linear([1, 0])
    y = HomogeneousForm.linear([0, 1])
    f1 = (x - y * Fraction(alpha)) ** r1
    f2 = (x - y * Fraction(beta)) ** r2
    sb = SpanBuilder()
    for h in binary_forms_basis(r2 - 1):
        sb.add(f1 * h)
    for h in binary_forms_basis(r1 - 1):
        sb.add(f2 * h)
    return sb.dim == r1 + r2


def random_block_pencil(rng: random.Random, max_blocks: int = 4, max_k: int = 3,
                        alphas: Sequence = (0, 1, -1, 2, Fraction(1, 2)), max_padding: int = 1) -> BlockPencil:
    count = rng.randint(1, max_blocks)
    blocks = []
    for _ in range(count):
        kind = rng.choice((FINITE, FINITE, INFINITE, SINGULAR))
        k = rng.randint(1, max_k)
        blocks.append(BlockSpec(kind, k, Fraction(rng.choice(alphas)) if kind == FINITE else None))
    return BlockPencil(tuple(blocks), rng.randint(0, max_padding))


_BLOCK_RE = re.compile(r"\s*(?:F\(\s*([^,()]+?)\s*,\s*(\d+)\s*\)|S\(\s*(\d+)\s*\))\s*")


def parse_blocks(text: str) -> tuple[BlockSpec, ...]:
    """Parse ``F(alpha,k)``, ``F(inf,k)`` and ``S(k)`` tokens separated by commas."""
    blocks = []
    pos = 0
    while pos < len(text):
        match = _BLOCK_RE.match(text, pos)
        if not match:
            raise ValueError(f"cannot parse block list at column {pos + 1}: {text[pos:]!r}")
        alpha, k, ks = match.groups()
        if ks is not None:
            blocks.append(BlockSpec(SINGULAR, int(ks)))
        elif alpha.lower() == "inf":
            blocks.append(BlockSpec(INFINITE, int(k)))
        else:
            try:
                value = Fraction(alpha)
            except ValueError:
                raise ValueError(f"bad eigenvalue {alpha!r}") from None
            blocks.append(BlockSpec(FINITE, int(k), value))
        pos = match.end()
        if pos < len(text):
            if text[pos] != ",":
                raise ValueError(f"expected ',' at column {pos + 1}")
            pos += 1
    if not blocks:
        raise ValueError("no blocks given")
    return tuple(blocks)
