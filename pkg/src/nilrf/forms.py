"""Exact polynomial layer: univariate rational polynomials, homogeneous forms,
skew pencils and their determinantal ideals."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, gcd, lcm
from typing import Iterable, Mapping, Sequence

from .linalg import IntMatrix

__all__ = [
    "UniPoly",
    "HomogeneousForm",
    "SymbolicPencil",
    "MinorGenerator",
    "SpanBuilder",
    "minor_det",
    "minor_ideal_generators",
    "minor_span",
    "gcd_minors_binary",
    "resultant",
    "rational_linear_factor",
    "binary_forms_basis",
    "gcd_binary_forms",
]

Exponent = tuple[int, ...]

# Whole-matrix minor enumeration is refused beyond this many (rows, cols) pairs.
MINOR_ENUM_LIMIT = 400_000
# Components larger than this are not expanded by cofactors.
COMPONENT_LIMIT = 11


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------- univariate


class UniPoly:
    """Polynomial in one variable over Q, coefficients in ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [_frac(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return self.degree <= 0

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1]

    def __eq__(self, other):
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UniPoly({[str(c) for c in self.coeffs]})"

    def __add__(self, other: "UniPoly") -> "UniPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return UniPoly(x + y for x, y in zip(a, b))

    def __neg__(self) -> "UniPoly":
        return UniPoly(-x for x in self.coeffs)

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other) -> "UniPoly":
        if not isinstance(other, UniPoly):
            return UniPoly(x * other for x in self.coeffs)
        if self.is_zero() or other.is_zero():
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __call__(self, t):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        quot = [Fraction(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        while len(rem) >= len(other.coeffs) and any(rem):
            shift = len(rem) - len(other.coeffs)
            f = rem[-1] / other.lead
            quot[shift] = f
            for i, c in enumerate(other.coeffs):
                rem[shift + i] -= f * c
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return UniPoly(quot), UniPoly(rem)

    def monic(self) -> "UniPoly":
        return self * (1 / self.lead) if self.coeffs else self

    def gcd(self, other: "UniPoly") -> "UniPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def rational_roots(self) -> list[Fraction]:
        """Distinct rational roots (rational root test on the integer primitive part)."""
        if self.is_zero():
            raise ValueError("zero polynomial has every root")
        den = lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        roots = []
        low = next(i for i, c in enumerate(ints) if c)
        if low:
            roots.append(Fraction(0))
        ints = ints[low:]
        if len(ints) == 1:
            return roots
        content = 0
        for c in ints:
            content = gcd(content, c)
        ints = [c // content for c in ints]
        poly = UniPoly(ints)
        lead_divs = _divisors(abs(ints[-1]))
        for p in _divisors(abs(ints[0])):
            for q in lead_divs:
                if gcd(p, q) != 1:
                    continue
                for s in (1, -1):
                    r = Fraction(s * p, q)
                    if poly(r) == 0:
                        roots.append(r)
        return sorted(roots)


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def sylvester_matrix(q1: UniPoly, q2: UniPoly) -> list[list[Fraction]]:
    """Sylvester matrix with the q1 columns first (coefficients top-down)."""
    n, m = q1.degree, q2.degree
    size = n + m
    mat = [[Fraction(0)] * size for _ in range(size)]
    for col in range(m):
        for i, c in enumerate(reversed(q1.coeffs)):
            mat[col + i][col] = c
    for col in range(n):
        for i, c in enumerate(reversed(q2.coeffs)):
            mat[col + i][m + col] = c
    return mat


def _frac_det(a: list[list[Fraction]]) -> Fraction:
    a = [r[:] for r in a]
    n, det = len(a), Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k]), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        for i in range(k + 1, n):
            if a[i][k]:
                f = a[i][k] / a[k][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return det


def resultant(q1: UniPoly, q2: UniPoly) -> Fraction:
    if q1.is_zero() or q2.is_zero():
        raise ValueError("resultant of the zero polynomial")
    if q1.degree == 0 and q2.degree == 0:
        return Fraction(1)
    return _frac_det(sylvester_matrix(q1, q2))


# ---------------------------------------------------------------- forms


@dataclass(frozen=True)
class HomogeneousForm:
    """Homogeneous polynomial of a fixed degree with rational coefficients."""

    nvars: int
    degree: int
    terms: tuple[tuple[Exponent, Fraction], ...] = ()

    @classmethod
    def from_dict(cls, nvars: int, degree: int, coeffs: Mapping[Exponent, object]) -> "HomogeneousForm":
        items = []
        for e, c in coeffs.items():
            c = _frac(c)
            if c == 0:
                continue
            if len(e) != nvars or sum(e) != degree or min(e) < 0:
                raise ValueError(f"monomial {e} does not have degree {degree} in {nvars} variables")
            items.append((tuple(e), c))
        items.sort(reverse=True)
        return cls(nvars, degree, tuple(items))

    @classmethod
    def zero(cls, nvars: int, degree: int) -> "HomogeneousForm":
        return cls(nvars, degree, ())

    @classmethod
    def one(cls, nvars: int) -> "HomogeneousForm":
        return cls.from_dict(nvars, 0, {(0,) * nvars: 1})

    @classmethod
    def linear(cls, coeffs: Sequence) -> "HomogeneousForm":
        n = len(coeffs)
        return cls.from_dict(n, 1, {tuple(int(i == j) for j in range(n)): c for i, c in enumerate(coeffs)})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1) -> "HomogeneousForm":
        return cls.from_dict(len(exps), sum(exps), {tuple(exps): coeff})

    @classmethod
    def linear_power(cls, v: Sequence[int], d: int) -> "HomogeneousForm":
        """``(v_1 x_1 + ... + v_n x_n)^d`` by the multinomial theorem."""
        n = len(v)
        out = {}
        support = [i for i, x in enumerate(v) if x]
        for exps in _compositions(d, len(support)):
            coeff = factorial(d)
            for i, e in zip(support, exps):
                coeff = coeff // factorial(e) * v[i] ** e
            full = [0] * n
            for i, e in zip(support, exps):
                full[i] = e
            out[tuple(full)] = coeff
        if not support and d == 0:
            out[(0,) * n] = 1
        return cls.from_dict(n, d, out)

    @property
    def coeffs(self) -> dict[Exponent, Fraction]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def coeff(self, e: Exponent) -> Fraction:
        return self.coeffs.get(tuple(e), Fraction(0))

    def _check(self, other: "HomogeneousForm"):
        if self.nvars != other.nvars:
            raise ValueError("forms in different numbers of variables")

    def __add__(self, other: "HomogeneousForm") -> "HomogeneousForm":
        self._check(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError("adding forms of different degree")
        c = self.coeffs
        for e, x in other.terms:
            c[e] = c.get(e, 0) + x
        return HomogeneousForm.from_dict(self.nvars, self.degree, c)

    def __neg__(self) -> "HomogeneousForm":
        return HomogeneousForm(self.nvars, self.degree, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "HomogeneousForm") -> "HomogeneousForm":
        return self + (-other)

    def __mul__(self, other) -> "HomogeneousForm":
        if not isinstance(other, HomogeneousForm):
            other = _frac(other)
            if other == 0:
                return HomogeneousForm.zero(self.nvars, self.degree)
            return HomogeneousForm(self.nvars, self.degree, tuple((e, c * other) for e, c in self.terms))
        self._check(other)
        deg = self.degree + other.degree
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return HomogeneousForm.from_dict(self.nvars, deg, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "HomogeneousForm":
        out = HomogeneousForm.one(self.nvars)
        for _ in range(k):
            out = out * self
        return out

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms:
            term = c
            for x, k in zip(point, e):
                if k:
                    term *= _frac(x) ** k
            total += term
        return total

    def content(self) -> Fraction:
        """Positive rational c with ``self / c`` integral and primitive, sign
        chosen so that the leading coefficient of ``self / c`` is positive."""
        if self.is_zero():
            return Fraction(0)
        num = gcd(*(c.numerator for _, c in self.terms))
        den = lcm(*(c.denominator for _, c in self.terms))
        c = Fraction(num, den)
        return c if self.terms[0][1] > 0 else -c

    def normalized(self) -> "HomogeneousForm":
        if self.is_zero():
            return self
        return self * (1 / self.content())

    def substitute(self, P: Sequence[Sequence]) -> "HomogeneousForm":
        """Form in new variables x' obtained by substituting ``x = P^T x'``."""
        n = self.nvars
        images = [HomogeneousForm.linear([P[j][i] for j in range(n)]) for i in range(n)]
        out = HomogeneousForm.zero(n, self.degree)
        for e, c in self.terms:
            term = HomogeneousForm.one(n) * c
            for i, k in enumerate(e):
                for _ in range(k):
                    term = term * images[i]
            out = out + term
        return out

    # binary-form helpers; variables are (x, y) = (x1, x2)
    def dehomogenize(self) -> UniPoly:
        if self.nvars != 2:
            raise ValueError("dehomogenize expects a binary form")
        c = [Fraction(0)] * (self.degree + 1)
        for (i, _), x in self.terms:
            c[i] = x
        return UniPoly(c)

    def y_valuation(self) -> int:
        return min(e[1] for e, _ in self.terms)

    @classmethod
    def homogenize(cls, f: UniPoly, degree: int) -> "HomogeneousForm":
        return cls.from_dict(2, degree, {(i, degree - i): c for i, c in enumerate(f.coeffs)})

    def sort_key(self):
        return (len(self.terms), tuple(tuple(-x for x in e) for e, _ in self.terms))

    def __str__(self):
        if self.is_zero():
            return "0"
        names = ["x"] if self.nvars == 1 else [f"x{i + 1}" for i in range(self.nvars)]
        parts = []
        for e, c in self.terms:
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {
            "nvars": str(self.nvars),
            "degree": str(self.degree),
            "terms": [[[str(k) for k in e], str(c)] for e, c in self.terms],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "HomogeneousForm":
        return cls.from_dict(
            int(data["nvars"]), int(data["degree"]),
            {tuple(int(k) for k in e): Fraction(c) for e, c in data["terms"]},
        )


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def binary_forms_basis(degree: int) -> list[HomogeneousForm]:
    """Monomial basis x^i y^(degree-i) of the degree part of H_degree(x, y)."""
    return [HomogeneousForm.monomial((i, degree - i)) for i in range(degree, -1, -1)]


# ---------------------------------------------------------------- pencils


@dataclass(frozen=True)
class SymbolicPencil:
    """``M_x = sum_i x_i A_i`` with skew-symmetric rational coefficient matrices."""

    m: int
    nvars: int
    matrices: tuple[tuple[tuple[Fraction, ...], ...], ...]

    @classmethod
    def from_matrices(cls, mats: Sequence, m: int | None = None, check_skew: bool = True) -> "SymbolicPencil":
        rows = []
        for A in mats:
            if isinstance(A, IntMatrix):
                A = A.tolist()
            rows.append(tuple(tuple(_frac(x) for x in r) for r in A))
        if m is None:
            m = len(rows[0]) if rows else 0
        for A in rows:
            if len(A) != m or any(len(r) != m for r in A):
                raise ValueError(f"coefficient matrix is not {m}x{m}")
            if check_skew and any(A[i][j] != -A[j][i] for i in range(m) for j in range(m)):
                raise ValueError("coefficient matrix is not skew-symmetric")
        return cls(m, len(rows), tuple(rows))

    def entry(self, r: int, c: int) -> HomogeneousForm:
        return HomogeneousForm.linear([A[r][c] for A in self.matrices])

    def entry_coeffs(self, r: int, c: int) -> tuple[Fraction, ...]:
        return tuple(A[r][c] for A in self.matrices)

    def evaluate(self, a: Sequence) -> list[list[Fraction]]:
        a = [_frac(x) for x in a]
        return [
            [sum((ai * A[r][c] for ai, A in zip(a, self.matrices)), Fraction(0)) for c in range(self.m)]
            for r in range(self.m)
        ]

    def change_variables(self, P: Sequence[Sequence[int]]) -> "SymbolicPencil":
        """Pencil with ``A'_j = sum_i P[j][i] A_i``; it equals M_x under ``x = P^T x'``."""
        n, m = self.nvars, self.m
        mats = []
        for j in range(n):
            mats.append([[sum(P[j][i] * self.matrices[i][r][c] for i in range(n)) for c in range(m)] for r in range(m)])
        return SymbolicPencil.from_matrices(mats, m)

    def congruent(self, Q: Sequence[Sequence[int]]) -> "SymbolicPencil":
        """``Q^T M Q`` applied to every coefficient matrix."""
        m = self.m
        out = []
        for A in self.matrices:
            AQ = [[sum(A[r][k] * Q[k][c] for k in range(m)) for c in range(m)] for r in range(m)]
            out.append([[sum(Q[k][r] * AQ[k][c] for k in range(m)) for c in range(m)] for r in range(m)])
        return SymbolicPencil.from_matrices(out, m)

    def components(self) -> list[list[int]]:
        """Index blocks of the finest permuted block-diagonal decomposition."""
        parent = list(range(self.m))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for r in range(self.m):
            for c in range(r + 1, self.m):
                if any(A[r][c] or A[c][r] for A in self.matrices):
                    parent[find(r)] = find(c)
        groups: dict[int, list[int]] = {}
        for i in range(self.m):
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values())

    def generic_rank(self) -> int:
        """Rank over Q(x): rank at a point avoiding every proper minor variety.

        The d x d minors are forms of degree <= m; a point whose coordinates
        are successive powers of a large integer cannot be a root of a nonzero
        form of degree <= m with bounded coefficients, so checking the
        evaluation at (1, N, N^2, ...) with N large is exact.
        """
        from .linalg import rank

        bound = 1 + sum(abs(x) for A in self.matrices for r in A for x in r)
        den = lcm(*(x.denominator for A in self.matrices for r in A for x in r), 1)
        big = (bound * den) ** self.m * (self.m + 1) ** self.m * 2 + 2
        point = [big**i for i in range(self.nvars)]
        evald = self.evaluate(point)
        return rank([[int(x * den) for x in r] for r in evald])

    def to_json(self) -> list:
        return [[[str(x) for x in r] for r in A] for A in self.matrices]

    def integral_matrices(self) -> list[list[list[int]]]:
        """Coefficient matrices scaled by the common denominator of all entries."""
        den = lcm(*(x.denominator for A in self.matrices for r in A for x in r), 1)
        return [[[int(x * den) for x in r] for r in A] for A in self.matrices]


# ---------------------------------------------------------------- minors


def _perm_sign(seq: Sequence[int]) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


_TABLE_CACHE: dict = {}
_GCD_CACHE: dict = {}
# blocks this small get their full minor table on first use
_FULL_TABLE_SIZE = 7


def _block_key(M: SymbolicPencil, idx: Sequence[int]) -> tuple:
    idx = tuple(idx)
    return (M.nvars, idx, tuple(tuple(A[r][c] for r in idx for c in idx) for A in M.matrices))


def _component_minors(M: SymbolicPencil, idx: Sequence[int], max_size: int):
    """Cached front end of :func:`_component_minors_raw`."""
    key = _block_key(M, idx)
    size = min(max_size, len(idx))
    hit = _TABLE_CACHE.get(key)
    if hit is not None and max(hit) >= size:
        return {s: t for s, t in hit.items() if s <= size}
    if len(_TABLE_CACHE) > 256:
        _TABLE_CACHE.clear()
    full = len(idx) if len(idx) <= _FULL_TABLE_SIZE else size
    table = _component_minors_raw(M, idx, max(size, full))
    _TABLE_CACHE[key] = table
    return {s: t for s, t in table.items() if s <= size}


def _component_gcd(M: SymbolicPencil, idx: Sequence[int], size: int) -> HomogeneousForm | None:
    """Gcd of the size x size minors of one block (None when they all vanish)."""
    key = (_block_key(M, idx), size)
    if key not in _GCD_CACHE:
        if len(_GCD_CACHE) > 4096:
            _GCD_CACHE.clear()
        entries = _component_minors(M, idx, size).get(size, {})
        if size == 0:
            _GCD_CACHE[key] = HomogeneousForm.one(M.nvars)
        else:
            _GCD_CACHE[key] = gcd_binary_forms(list(entries.values())) if entries else None
    return _GCD_CACHE[key]


def _component_minors_raw(M: SymbolicPencil, idx: Sequence[int], max_size: int):
    """All nonzero minors of the principal block on ``idx``, by cofactor DP.

    Returns ``{size: {(rows, cols): form}}`` with rows/cols as sorted tuples of
    global indices.  Expansion is along the last selected row.
    """
    n = M.nvars
    entries = {(r, c): M.entry(r, c) for r in idx for c in idx if any(A[r][c] for A in M.matrices)}
    prev = {((), ()): HomogeneousForm.one(n)}
    out = {0: dict(prev)}
    for size in range(1, min(max_size, len(idx)) + 1):
        cur: dict[tuple, HomogeneousForm] = {}
        for rows in itertools.combinations(idx, size):
            r_last, r_head = rows[-1], rows[:-1]
            for cols in itertools.combinations(idx, size):
                acc = None
                for pos, c in enumerate(cols):
                    e = entries.get((r_last, c))
                    if e is None:
                        continue
                    sub = prev.get((r_head, cols[:pos] + cols[pos + 1:]))
                    if sub is None:
                        continue
                    term = e * sub
                    if (size - 1 + pos) % 2:
                        term = -term
                    acc = term if acc is None else acc + term
                if acc is not None and not acc.is_zero():
                    cur[(rows, cols)] = acc
        out[size] = cur
        prev = cur
    return out


def minor_det(M: SymbolicPencil, rows: Sequence[int], cols: Sequence[int]) -> HomogeneousForm:
    """Determinant of ``M[rows, cols]`` (rows/cols in the given order)."""
    rows, cols = list(rows), list(cols)
    d = len(rows)
    if len(cols) != d:
        raise ValueError("minor needs as many rows as columns")
    if d == 0:
        return HomogeneousForm.one(M.nvars)
    nz = {(i, j) for i, r in enumerate(rows) for j, c in enumerate(cols) if any(A[r][c] for A in M.matrices)}
    # union-find over 0..d-1 (rows) and d..2d-1 (cols)
    parent = list(range(2 * d))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in nz:
        parent[find(i)] = find(d + j)
    comps: dict[int, tuple[list[int], list[int]]] = {}
    for i in range(d):
        comps.setdefault(find(i), ([], []))[0].append(i)
    for j in range(d):
        comps.setdefault(find(d + j), ([], []))[1].append(j)
    blocks = sorted(comps.values())
    if any(len(rs) != len(cs) for rs, cs in blocks):
        return HomogeneousForm.zero(M.nvars, d)
    row_order = [i for rs, _ in blocks for i in rs]
    col_order = [j for _, cs in blocks for j in cs]
    result = HomogeneousForm.one(M.nvars) * (_perm_sign(row_order) * _perm_sign(col_order))
    for rs, cs in blocks:
        if len(rs) > COMPONENT_LIMIT:
            raise ResourceWarning(f"connected block of size {len(rs)} is too large for cofactor expansion")
        result = result * _small_det(M, [rows[i] for i in rs], [cols[j] for j in cs])
    return result


def _small_det(M: SymbolicPencil, rows: list[int], cols: list[int]) -> HomogeneousForm:
    n = M.nvars
    d = len(rows)
    memo: dict[tuple[int, ...], HomogeneousForm] = {(): HomogeneousForm.one(n)}

    def rec(k: int, avail: tuple[int, ...]) -> HomogeneousForm:
        # determinant of rows[:k] against the columns in ``avail`` (|avail| == k)
        if avail in memo:
            return memo[avail]
        r = rows[k - 1]
        acc = HomogeneousForm.zero(n, k)
        for pos, jc in enumerate(avail):
            c = cols[jc]
            if not any(A[r][c] for A in M.matrices):
                continue
            sub = rec(k - 1, avail[:pos] + avail[pos + 1:])
            if sub.is_zero():
                continue
            term = M.entry(r, c) * sub
            acc = acc + (-term if (k - 1 + pos) % 2 else term)
        memo[avail] = acc
        return acc

    return rec(d, tuple(range(d)))


@dataclass(frozen=True)
class MinorGenerator:
    """A d x d minor: ``det M[rows, cols] = scale * form`` with ``form`` normalised."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    scale: Fraction
    form: HomogeneousForm

    @property
    def value(self) -> HomogeneousForm:
        return self.form * self.scale


def minor_ideal_generators(M: SymbolicPencil, d: int) -> list[MinorGenerator]:
    """All d x d minors of M, normalised and deduplicated up to scalars.

    The order is canonical: fewer terms first, then monomials in descending
    lexicographic order; each generator keeps the first minor (in
    lexicographic row/column subset order) that realises it.
    """
    if not 1 <= d <= M.m:
        raise ValueError(f"minor size {d} outside 1..{M.m}")
    comps = M.components()
    if len(comps) == 1 and comb(M.m, d) ** 2 > MINOR_ENUM_LIMIT:
        raise ResourceWarning(f"{comb(M.m, d) ** 2} minors exceed the enumeration limit")
    if max(len(c) for c in comps) > COMPONENT_LIMIT:
        raise ResourceWarning("connected block too large for exhaustive minor enumeration")
    tables = [_component_minors(M, c, d) for c in comps]
    found: dict[HomogeneousForm, MinorGenerator] = {}

    def combine(k: int, remaining: int, rows: tuple, cols: tuple, form: HomogeneousForm):
        if k == len(tables):
            if remaining:
                return
            key = form.normalized()
            r, c = tuple(sorted(rows)), tuple(sorted(cols))
            if key not in found or (r, c) < (found[key].rows, found[key].cols):
                found[key] = MinorGenerator(r, c, Fraction(0), key)
            return
        for size, table in tables[k].items():
            if size > remaining:
                continue
            for (rs, cs), f in table.items():
                combine(k + 1, remaining - size, rows + rs, cols + cs, form * f)

    combine(0, d, (), (), HomogeneousForm.one(M.nvars))
    out = []
    for key, g in found.items():
        det = minor_det(M, g.rows, g.cols)
        out.append(MinorGenerator(g.rows, g.cols, det.content(), key))
    out.sort(key=lambda g: g.form.sort_key())
    return out


class SpanBuilder:
    """Incremental echelon basis of a subspace of forms of one degree.

    Each stored row remembers the combination of inserted generators that
    produced it, so membership queries return coefficients on generators.
    """

    def __init__(self, ngens_hint: int = 0):
        self.rows: list[tuple[Exponent, dict[Exponent, Fraction], dict[int, Fraction]]] = []
        self.count = 0

    def _reduce(self, vec: dict[Exponent, Fraction], combo: dict[int, Fraction]):
        vec, combo = dict(vec), dict(combo)
        for piv, row, rcombo in self.rows:
            f = vec.get(piv)
            if f:
                for e, x in row.items():
                    y = vec.get(e, 0) - f * x
                    if y:
                        vec[e] = y
                    else:
                        vec.pop(e, None)
                for i, x in rcombo.items():
                    y = combo.get(i, 0) - f * x
                    if y:
                        combo[i] = y
                    else:
                        combo.pop(i, None)
        return vec, combo

    def add(self, form: HomogeneousForm) -> bool:
        """Insert the next generator; True if it enlarged the span."""
        idx = self.count
        self.count += 1
        vec, combo = self._reduce(form.coeffs, {idx: Fraction(1)})
        if not vec:
            return False
        piv = max(vec)
        inv = 1 / vec[piv]
        vec = {e: x * inv for e, x in vec.items()}
        combo = {i: x * inv for i, x in combo.items()}
        # keep rows fully reduced at their pivots
        new_rows = []
        for p, row, rcombo in self.rows:
            f = row.get(piv)
            if f:
                row = dict(row)
                rcombo = dict(rcombo)
                for e, x in vec.items():
                    y = row.get(e, 0) - f * x
                    if y:
                        row[e] = y
                    else:
                        row.pop(e, None)
                for i, x in combo.items():
                    y = rcombo.get(i, 0) - f * x
                    if y:
                        rcombo[i] = y
                    else:
                        rcombo.pop(i, None)
            new_rows.append((p, row, rcombo))
        new_rows.append((piv, vec, combo))
        self.rows = new_rows
        return True

    @property
    def dim(self) -> int:
        return len(self.rows)

    def express(self, form: HomogeneousForm) -> dict[int, Fraction] | None:
        """Coefficients on inserted generators reproducing ``form``, or None."""
        vec, combo = self._reduce(form.coeffs, {})
        if vec:
            return None
        return {i: -x for i, x in combo.items() if x}

    def contains(self, form: HomogeneousForm) -> bool:
        return not self._reduce(form.coeffs, {})[0]


def _forms_dim(nvars: int, degree: int) -> int:
    return comb(nvars + degree - 1, degree)


def minor_span(M: SymbolicPencil, d: int) -> list[MinorGenerator]:
    """Minors whose span is the whole degree-d part of I_d(M_x).

    Uses the block decomposition of M: a nonzero minor of a block-diagonal
    matrix is a product of minors of the blocks, so the span is built block by
    block and never enumerates the full set of minors.
    """
    if not 0 <= d <= M.m:
        raise ValueError(f"minor size {d} outside 0..{M.m}")
    n = M.nvars
    comps = M.components()
    if max(len(c) for c in comps) > COMPONENT_LIMIT:
        raise ResourceWarning("connected block too large for cofactor expansion")
    # acc[e] = list of (rows, cols, form) spanning degree-e part of the product so far
    acc: dict[int, list[tuple[tuple, tuple, HomogeneousForm]]] = {0: [((), (), HomogeneousForm.one(n))]}
    for comp in comps:
        table = _component_minors(M, comp, d)
        local: dict[int, list] = {}
        for size, entries in table.items():
            sb = SpanBuilder()
            keep = []
            for (rs, cs), f in sorted(entries.items()):
                if sb.add(f):
                    keep.append((rs, cs, f))
                    if sb.dim == _forms_dim(n, size):
                        break
            local[size] = keep
        nxt: dict[int, list] = {}
        builders: dict[int, SpanBuilder] = {}
        for e1, left in acc.items():
            for e2, right in local.items():
                e = e1 + e2
                if e > d or not right:
                    continue
                sb = builders.setdefault(e, SpanBuilder())
                bucket = nxt.setdefault(e, [])
                for r1, c1, f1 in left:
                    if sb.dim == _forms_dim(n, e):
                        break
                    for r2, c2, f2 in right:
                        f = f1 * f2
                        if sb.add(f):
                            bucket.append((r1 + r2, c1 + c2, f))
                            if sb.dim == _forms_dim(n, e):
                                break
        acc = nxt
    out = []
    for rows, cols, _ in acc.get(d, []):
        rows, cols = tuple(sorted(rows)), tuple(sorted(cols))
        det = minor_det(M, rows, cols)
        out.append(MinorGenerator(rows, cols, det.content(), det.normalized()))
    return out


def gcd_minors_binary(M: SymbolicPencil, d: int) -> HomogeneousForm:
    """Normalised gcd of all d x d minors of a two-variable pencil (or zero).

    For a block-diagonal pencil the d-minor ideal is the sum, over ways of
    splitting d among the blocks, of products of the blocks' minor ideals.
    The gcd of a product ideal is the product of the gcds, so only per-block
    gcds are ever computed.
    """
    if M.nvars != 2:
        raise ValueError("gcd_minors_binary expects a pencil in two variables")
    if not 0 <= d <= M.m:
        raise ValueError(f"minor size {d} outside 0..{M.m}")
    comps = M.components()
    if max(len(c) for c in comps) > COMPONENT_LIMIT:
        raise ResourceWarning("connected block too large for cofactor expansion")
    one = HomogeneousForm.one(2)
    acc: dict[int, HomogeneousForm] = {0: one}
    for comp in comps:
        local = {}
        for size in range(min(d, len(comp)) + 1):
            g = _component_gcd(M, comp, size)
            if g is not None:
                local[size] = g
        nxt: dict[int, HomogeneousForm] = {}
        for e1, g1 in acc.items():
            for e2, g2 in local.items():
                e = e1 + e2
                if e > d:
                    continue
                prodf = g1 * g2
                nxt[e] = prodf if e not in nxt else gcd_binary_forms([nxt[e], prodf])
        acc = nxt
    if d not in acc:
        return HomogeneousForm.zero(2, d)
    return acc[d].normalized()


def gcd_binary_forms(forms: Sequence[HomogeneousForm]) -> HomogeneousForm:
    """Normalised gcd of nonzero binary forms: y-power times the rehomogenised
    gcd of the dehomogenisations."""
    forms = [f for f in forms if not f.is_zero()]
    if not forms:
        raise ValueError("gcd of no nonzero forms")
    yval = min(f.y_valuation() for f in forms)
    g = UniPoly()
    for f in forms:
        g = f.dehomogenize().gcd(g) if not g.is_zero() else f.dehomogenize().monic()
        if g.degree == 0 and yval == 0:
            break
    part = HomogeneousForm.homogenize(g, g.degree)
    return (part * HomogeneousForm.monomial((0, yval))).normalized()


def rational_linear_factor(g: HomogeneousForm) -> tuple[tuple[int, int], int] | None:
    """``(v, k)`` if g is a scalar times ``(v1 x1 + v2 x2)^k`` with v primitive."""
    if g.nvars != 2 or g.is_zero():
        raise ValueError("expects a nonzero binary form")
    k = g.degree
    if k == 0:
        return None
    top, nxt = g.coeff((k, 0)), g.coeff((k - 1, 1))
    if top == 0:
        v = (0, 1)
    else:
        ratio = nxt / (k * top)  # v2 / v1
        v = (ratio.denominator, ratio.numerator)
    base = HomogeneousForm.linear(v) ** k
    if base.normalized() != g.normalized():
        return None
    if v[0] < 0 or (v[0] == 0 and v[1] < 0):
        v = (-v[0], -v[1])
    return v, k
