"""Exact integer and rational linear algebra.

Everything here works over Python integers and :class:`fractions.Fraction`;
there is no floating point anywhere.  Matrices are stored row-major in the
immutable :class:`IntMatrix`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod
from typing import Iterable, Sequence

__all__ = [
    "IntMatrix",
    "SNFResult",
    "Sublattice",
    "snf",
    "hnf_columns",
    "rank",
    "rank_mod",
    "image_size_mod",
    "kernel_mod",
    "kernel_mod_q",
    "enumerate_cyclic_quotient_lattices",
    "is_prime",
    "primes",
    "prime_powers_upto",
    "rref",
    "solve_rational",
    "lcm_upto",
]

PRIME_LIMIT = 1 << 32


@dataclass(frozen=True)
class IntMatrix:
    nrows: int
    ncols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.nrows * self.ncols:
            raise ValueError(
                f"{len(self.entries)} entries for a {self.nrows}x{self.ncols} matrix"
            )

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], ncols: int | None = None) -> "IntMatrix":
        rows = [tuple(int(x) for x in r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
        return cls(len(rows), ncols, tuple(x for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows(([int(i == j) for j in range(n)] for i in range(n)), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls(nrows, ncols, (0,) * (nrows * ncols))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.ncols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.ncols:(i + 1) * self.ncols]

    def col(self, j: int) -> tuple[int, ...]:
        return self.entries[j::self.ncols] if self.ncols else ()

    def tolist(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.nrows)]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix.from_rows((self.col(j) for j in range(self.ncols)), self.nrows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = [other.col(j) for j in range(other.ncols)]
        return IntMatrix.from_rows(
            ([sum(a * b for a, b in zip(self.row(i), c)) for c in cols] for i in range(self.nrows)),
            other.ncols,
        )

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        return IntMatrix(self.nrows, self.ncols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.nrows, self.ncols, tuple(-a for a in self.entries))

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(self.nrows, self.ncols, tuple(c * a for a in self.entries))

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(a * b for a, b in zip(self.row(i), vec)) for i in range(self.nrows))

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_skew(self) -> bool:
        return self.is_square() and all(
            self[i, j] == -self[j, i] for i in range(self.nrows) for j in range(i, self.ncols)
        )

    def strictly_lower(self) -> "IntMatrix":
        n = self.ncols
        return IntMatrix(self.nrows, n, tuple(a if (k // n) > (k % n) else 0 for k, a in enumerate(self.entries)))

    def det(self) -> int:
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        return _bareiss_det([list(self.row(i)) for i in range(self.nrows)])


def _as_rows(M) -> list[list[int]]:
    if isinstance(M, IntMatrix):
        return M.tolist()
    return [list(r) for r in M]


def _bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    a = [r[:] for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------- Smith form


@dataclass(frozen=True)
class SNFResult:
    """``left @ M @ right`` is diagonal with entries ``diag``."""

    left: IntMatrix
    diag: tuple[int, ...]
    right: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diag if d)


def snf(M) -> SNFResult:
    """Smith normal form with unimodular transforms.

    Pivoting picks the entry of smallest absolute value in the remaining
    block; the invariant factors are unique regardless.
    """
    a = _as_rows(M)
    r = len(a)
    c = len(a[0]) if r else (M.ncols if isinstance(M, IntMatrix) else 0)
    P = [[int(i == j) for j in range(r)] for i in range(r)]
    Q = [[int(i == j) for j in range(c)] for i in range(c)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in Q:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        P[dst] = [x + f * y for x, y in zip(P[dst], P[src])]

    def add_col(dst, src, f):  # col_dst += f * col_src
        for row in a:
            row[dst] += f * row[src]
        for row in Q:
            row[dst] += f * row[src]

    diag = []
    for t in range(min(r, c)):
        best = None
        for i in range(t, r):
            for j in range(t, c):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            diag.extend([0] * (min(r, c) - t))
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, r):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    if a[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, c):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    if a[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            bad = next(
                (i for i in range(t + 1, r) for j in range(t + 1, c) if a[i][j] % a[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            P[t] = [-x for x in P[t]]
        diag.append(a[t][t])
    return SNFResult(IntMatrix.from_rows(P, r), tuple(diag), IntMatrix.from_rows(Q, c))


def rank(M) -> int:
    """Rank over the rationals (fraction-free elimination)."""
    a = _as_rows(M)
    if not a:
        return 0
    a = [r[:] for r in a]
    rk, ncols = 0, len(a[0])
    for col in range(ncols):
        piv = next((i for i in range(rk, len(a)) if a[i][col]), None)
        if piv is None:
            continue
        a[rk], a[piv] = a[piv], a[rk]
        p = a[rk]
        for i in range(rk + 1, len(a)):
            if a[i][col]:
                f = a[i][col]
                a[i] = [x * p[col] - f * y for x, y in zip(a[i], p)]
                g = gcd(*a[i])
                if g > 1:
                    a[i] = [x // g for x in a[i]]
        rk += 1
    return rk


def rank_mod(M, p: int) -> int:
    """Rank over the field with p elements."""
    a = [[x % p for x in r] for r in _as_rows(M)]
    if not a:
        return 0
    rk, ncols = 0, len(a[0])
    for col in range(ncols):
        piv = next((i for i in range(rk, len(a)) if a[i][col]), None)
        if piv is None:
            continue
        a[rk], a[piv] = a[piv], a[rk]
        inv = pow(a[rk][col], -1, p)
        a[rk] = [(x * inv) % p for x in a[rk]]
        for i in range(len(a)):
            if i != rk and a[i][col]:
                f = a[i][col]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[rk])]
        rk += 1
        if rk == len(a):
            break
    return rk


# ---------------------------------------------------------------- Hermite form


def _row_hnf(rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Row-style Hermite normal form; zero rows dropped."""
    a = [r[:] for r in rows if any(r)]
    rk = 0
    for col in range(ncols):
        nz = [i for i in range(rk, len(a)) if a[i][col]]
        if not nz:
            continue
        while len(nz) > 1:
            nz.sort(key=lambda i: abs(a[i][col]))
            piv = nz[0]
            for i in nz[1:]:
                f = a[i][col] // a[piv][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[piv])]
            nz = [i for i in nz if a[i][col]]
        piv = nz[0]
        a[rk], a[piv] = a[piv], a[rk]
        if a[rk][col] < 0:
            a[rk] = [-x for x in a[rk]]
        for i in range(rk):
            f = a[i][col] // a[rk][col]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[rk])]
        rk += 1
    return [r for r in a[:rk]]


def hnf_columns(gens: Sequence[Sequence[int]], dim: int) -> IntMatrix:
    """Column-style Hermite basis of the lattice spanned by ``gens`` (vectors).

    For a full-rank lattice the result is lower triangular with positive
    diagonal, and each entry left of the diagonal lies in ``[0, h_ii)``.
    """
    rows = _row_hnf([list(g) for g in gens], dim)
    return IntMatrix.from_rows(rows, dim).T if rows else IntMatrix.zeros(dim, 0)


@dataclass(frozen=True)
class Sublattice:
    ambient_dim: int
    basis: IntMatrix  # columns, Hermite form

    @classmethod
    def spanned_by(cls, gens: Iterable[Sequence[int]], dim: int) -> "Sublattice":
        return cls(dim, hnf_columns(list(gens), dim))

    @classmethod
    def full(cls, dim: int) -> "Sublattice":
        return cls(dim, IntMatrix.identity(dim))

    @property
    def rank(self) -> int:
        return self.basis.ncols

    def vectors(self) -> list[tuple[int, ...]]:
        return [self.basis.col(j) for j in range(self.basis.ncols)]

    @property
    def index(self) -> int | None:
        """``[Z^d : L]`` or ``None`` when the lattice is not full rank."""
        if self.rank < self.ambient_dim:
            return None
        return abs(self.basis.det())

    def contains(self, v: Sequence[int]) -> bool:
        # Row-HNF rows (= our columns) have strictly increasing pivots.
        rest = list(v)
        for b in self.vectors():
            piv = next(i for i, x in enumerate(b) if x)
            if rest[piv] % b[piv]:
                return False
            f = rest[piv] // b[piv]
            rest = [x - f * y for x, y in zip(rest, b)]
        return not any(rest)

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in b] for b in self.vectors()]


# ---------------------------------------------------------------- modular maps


def _check_prime_power(p: int, k: int) -> int:
    if not is_prime(p):
        raise ValueError(f"{p} is not a prime")
    if k < 1:
        raise ValueError("exponent must be >= 1")
    return p**k


def _kernel_from_snf(res: SNFResult, ncols: int, q: int) -> tuple[list[tuple[int, ...]], int]:
    steps = [q // gcd(mu, q) for mu in res.diag] + [1] * (ncols - len(res.diag))
    cols = [res.right.col(j) for j in range(ncols)]
    gens = [tuple(s * x for x in col) for s, col in zip(steps, cols)]
    return gens, prod(steps)


def kernel_mod_q(M, q: int) -> Sublattice:
    """Preimage lattice ``{w : M w = 0 mod q}`` for any modulus ``q >= 1``."""
    m = M if isinstance(M, IntMatrix) else IntMatrix.from_rows(M)
    gens, _ = _kernel_from_snf(snf(m), m.ncols, q)
    return Sublattice.spanned_by(gens, m.ncols)


def kernel_mod(M, p: int, k: int) -> Sublattice:
    return kernel_mod_q(M, _check_prime_power(p, k))


def image_size_mod(M, p: int, k: int) -> int:
    """Size of the image of ``w -> M w mod p^k``."""
    q = _check_prime_power(p, k)
    res = snf(M)
    return prod(q // gcd(mu, q) for mu in res.diag)


def projective_reps(n: int, q: int, p: int) -> Iterable[tuple[int, ...]]:
    """One vector per cyclic-quotient sublattice of index q = p^k in Z^n.

    The first coordinate that is a unit mod p is normalised to 1, earlier
    coordinates are multiples of p in ``[0, q)``.
    """
    for pivot in range(n):
        before = [range(0, q, p)] * pivot
        after = [range(q)] * (n - pivot - 1)
        for head in itertools.product(*before):
            for tail in itertools.product(*after):
                yield head + (1,) + tail


def enumerate_cyclic_quotient_lattices(n: int, p: int, k: int) -> list[tuple[Sublattice, tuple[int, ...]]]:
    q = _check_prime_power(p, k)
    if n < 1:
        raise ValueError("dimension must be >= 1")
    out = []
    for a in projective_reps(n, q, p):
        out.append((kernel_mod_q(IntMatrix.from_rows([a]), q), a))
    return out


# ---------------------------------------------------------------- primes


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin below 2**32; larger inputs are rejected."""
    if n >= PRIME_LIMIT:
        raise ValueError(f"primality of {n} >= 2**32 is not supported")
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for base in (2, 7, 61):
        if base % n == 0:
            continue
        x = pow(base, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes(count: int | None = None, upto: int | None = None) -> list[int]:
    out, p = [], 2
    while (count is None or len(out) < count) and (upto is None or p <= upto):
        if is_prime(p):
            out.append(p)
        p += 1
    return out


def prime_powers_upto(bound: int) -> list[tuple[int, int, int]]:
    """All ``(q, p, k)`` with ``q = p**k <= bound``, sorted by ``q``."""
    out = []
    for p in primes(upto=bound):
        q, k = p, 1
        while q <= bound:
            out.append((q, p, k))
            q *= p
            k += 1
    out.sort()
    return out


def lcm_upto(kappa: int) -> int:
    out = 1
    for i in range(2, kappa + 1):
        out = out * i // gcd(out, i)
    return out


# ---------------------------------------------------------------- rationals


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    a = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    if not a:
        return a, pivots
    rk, ncols = 0, len(a[0])
    for col in range(ncols):
        piv = next((i for i in range(rk, len(a)) if a[i][col]), None)
        if piv is None:
            continue
        a[rk], a[piv] = a[piv], a[rk]
        inv = 1 / a[rk][col]
        a[rk] = [x * inv for x in a[rk]]
        for i in range(len(a)):
            if i != rk and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[rk])]
        pivots.append(col)
        rk += 1
        if rk == len(a):
            break
    return a[:rk], pivots


def solve_rational(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """A particular solution of ``A x = b`` with free variables set to 0."""
    nvars = len(A[0]) if A else 0
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    red, pivots = rref(aug)
    if nvars in pivots:
        return None
    x = [Fraction(0)] * nvars
    for row, col in zip(red, pivots):
        x[col] = row[-1]
    return x
