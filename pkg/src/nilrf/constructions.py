"""Named families of two-step nilpotent groups and non-singularity checks."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np

from .forms import HomogeneousForm, SymbolicPencil, minor_det, rational_linear_factor
from .group import GroupPresentation, validate
from .linalg import IntMatrix, rank

__all__ = [
    "QuadraticField",
    "QuadInt",
    "heisenberg",
    "heisenberg_gaussian",
    "heisenberg_sum",
    "single_matrix_quotient",
    "galois_twist",
    "twist_determinant",
    "nonsingular_over_Q_search",
    "psi_nonsingular",
    "Counterexample",
    "NoneFound",
]

J = ((0, 1), (-1, 0))


def _squarefree(d: int) -> bool:
    d = abs(d)
    f = 2
    while f * f <= d:
        if d % (f * f) == 0:
            return False
        f += 1
    return True


@dataclass(frozen=True)
class QuadraticField:
    """Q(sqrt(D)) for a squarefree integer D not in {0, 1}."""

    disc: int

    def __post_init__(self):
        if self.disc in (0, 1) or not _squarefree(self.disc):
            raise ValueError(f"D = {self.disc} must be squarefree and not 0 or 1")

    @property
    def alpha(self) -> "QuadInt":
        return QuadInt(Fraction(0), Fraction(1), self.disc)


@dataclass(frozen=True)
class QuadInt:
    """``a + b sqrt(D)`` with rational a, b."""

    a: Fraction
    b: Fraction
    D: int

    @classmethod
    def of(cls, x, D: int) -> "QuadInt":
        return x if isinstance(x, QuadInt) else cls(Fraction(x), Fraction(0), D)

    def __add__(self, o):
        o = QuadInt.of(o, self.D)
        return QuadInt(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadInt(-self.a, -self.b, self.D)

    def __sub__(self, o):
        return self + (-QuadInt.of(o, self.D))

    def __mul__(self, o):
        o = QuadInt.of(o, self.D)
        return QuadInt(self.a * o.a + self.D * self.b * o.b, self.a * o.b + self.b * o.a, self.D)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = QuadInt.of(1, self.D)
        for _ in range(k):
            out = out * self
        return out

    def conj(self) -> "QuadInt":
        return QuadInt(self.a, -self.b, self.D)

    def is_rational(self) -> bool:
        return self.b == 0


def _kron(A, B):
    ra, ca, rb, cb = len(A), len(A[0]), len(B), len(B[0])
    return [[A[i // rb][j // cb] * B[i % rb][j % cb] for j in range(ca * cb)] for i in range(ra * rb)]


def _matmul(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), QuadInt.of(0, _disc(A, B))) for j in range(len(B[0]))]
            for i in range(len(A))]


def _disc(*mats) -> int:
    for M in mats:
        for row in M:
            for x in row:
                if isinstance(x, QuadInt):
                    return x.D
    return 0


def _transpose(A):
    return [list(r) for r in zip(*A)]


def _unit_diag(n: int, i: int):
    return [[int(r == c == i) for c in range(n)] for r in range(n)]


def heisenberg() -> GroupPresentation:
    return GroupPresentation.from_matrices([[[0, 1], [-1, 0]]], name="heisenberg")


def heisenberg_gaussian() -> GroupPresentation:
    A1 = [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]]
    A2 = [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]
    return GroupPresentation.from_matrices([A1, A2], name="gaussian")


def single_matrix_quotient() -> GroupPresentation:
    """Quotient of the Gaussian Heisenberg group by the first central coordinate."""
    A = [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]
    return GroupPresentation.from_matrices([A], name="single-matrix-quotient")


def heisenberg_sum(count: int) -> GroupPresentation:
    """Direct sum of ``count`` Heisenberg groups via ``diag(e_i) (x) J``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    mats = [_kron(_unit_diag(count, i), J) for i in range(count)]
    name = "heisenberg" if count == 1 else f"heisenberg-sum-{count}"
    return GroupPresentation.from_matrices(mats, name=name)


def galois_twist(field: QuadraticField) -> GroupPresentation:
    """Twist of the two-fold Heisenberg sum by the Galois action of Q(sqrt D).

    ``B_j = sum_i sigma_i(alpha^j) (E (x) 1)^T (A_i (x) J) (E (x) 1)`` with
    ``E[k][l] = sigma_k(alpha^(l+1))``; the result is rational by Galois
    invariance and integral because every entry is an algebraic integer.
    """
    D = field.disc
    alpha = field.alpha
    sigma = [lambda z: z, lambda z: z.conj()]
    E = [[s(alpha ** (l + 1)) for l in range(2)] for s in sigma]
    one = [[QuadInt.of(int(i == j), D) for j in range(2)] for i in range(2)]
    E2 = _kron(E, one)
    E2T = _transpose(E2)
    mats = []
    for j in range(1, 3):
        acc = [[QuadInt.of(0, D)] * 4 for _ in range(4)]
        for i in range(2):
            coeff = sigma[i](alpha**j)
            inner = [[QuadInt.of(x, D) for x in row] for row in _kron(_unit_diag(2, i), J)]
            term = _matmul(_matmul(E2T, inner), E2)
            acc = [[acc[r][c] + coeff * term[r][c] for c in range(4)] for r in range(4)]
        if not all(x.is_rational() and x.a.denominator == 1 for row in acc for x in row):
            raise ArithmeticError("twisted matrix is not integral")
        mats.append([[int(x.a) for x in row] for row in acc])
    pres = GroupPresentation.from_matrices(mats, name=f"galois-twist-D{D}")
    if not all(a.is_skew() for a in pres.A):
        raise ArithmeticError("twisted matrix is not skew-symmetric")
    validate(pres)
    return pres


def twist_determinant(pres: GroupPresentation) -> HomogeneousForm:
    """``det(x_1 A_1 + ... + x_n A_n)`` as a form of degree m."""
    M = SymbolicPencil.from_matrices(list(pres.A), pres.m)
    idx = list(range(pres.m))
    return minor_det(M, idx, idx)


# ---------------------------------------------------------------- non-singularity


@dataclass(frozen=True)
class Counterexample:
    w: tuple[int, ...]
    rank: int


@dataclass(frozen=True)
class NoneFound:
    height_bound: int


def _search_key(w: tuple[int, ...]):
    return (max(abs(x) for x in w), sum(abs(x) for x in w), tuple(-x for x in w))


def nonsingular_over_Q_search(pres: GroupPresentation, height_bound: int):
    """Look for a primitive w of height <= bound with rank(w^T A_i)_i < n.

    A refutation search only: ``NoneFound`` is not a proof of non-singularity.
    """
    if height_bound < 1:
        raise ValueError("height bound must be >= 1")
    m, n = pres.m, pres.n
    A = np.array([a.tolist() for a in pres.A], dtype=object)
    amax = int(max(abs(int(x)) for a in pres.A for x in a.entries) or 1)
    small = (height_bound * m * amax) ** 2 * 2 < 2**62
    dtype = np.int64 if small else object
    A = A.astype(dtype)
    rng = np.arange(-height_bound, height_bound + 1, dtype=np.int64)
    best = None
    # chunk over the first coordinate to bound memory
    for first in range(0, height_bound + 1):
        grids = np.meshgrid(*([np.array([first])] + [rng] * (m - 1)), indexing="ij")
        W = np.stack([g.ravel() for g in grids], axis=1).astype(dtype)
        g = np.zeros(len(W), dtype=np.int64)
        for col in range(m):
            g = np.gcd(g, np.abs(W[:, col].astype(np.int64)))
        W = W[g == 1]
        if len(W) == 0:
            continue
        R = [W @ A[i] for i in range(n)]  # rows w^T A_i, shape (N, m)
        if n == 1:
            bad = ~np.any(R[0] != 0, axis=1)
        elif n == 2:
            bad = np.ones(len(W), dtype=bool)
            for a in range(m):
                for b in range(a + 1, m):
                    minor = R[0][:, a] * R[1][:, b] - R[0][:, b] * R[1][:, a]
                    bad &= minor == 0
        else:
            bad = np.array([rank([[int(R[i][k, c]) for c in range(m)] for i in range(n)]) < n
                            for k in range(len(W))], dtype=bool)
        for k in np.nonzero(bad)[0]:
            w = tuple(int(x) for x in W[k])
            lead = next(x for x in w if x)
            if lead < 0:
                w = tuple(-x for x in w)
            if best is None or _search_key(w) < _search_key(best):
                best = w
    if best is None:
        return NoneFound(height_bound)
    rk = rank([list(pres.phi(best, tuple(int(i == j) for j in range(m)))) for i in range(m)])
    return Counterexample(best, rk)


def psi_nonsingular(pres: GroupPresentation) -> int | None:
    """``m + 1`` when non-singularity over Q is certified, else None.

    Certified cases: n = 1 with an invertible matrix, and n = 2 when
    ``det(x_1 A_1 + x_2 A_2)`` has no rational projective zero (then every
    rational contraction ``a^T phi(w, .)`` is nondegenerate).
    """
    if pres.n == 1:
        return pres.m + 1 if pres.A[0].det() != 0 else None
    if pres.n == 2:
        det = twist_determinant(pres)
        if det.is_zero():
            return None
        if det.coeff((det.degree, 0)) == 0:
            return None  # zero at (1, 0)
        if det.dehomogenize().rational_roots():
            return None
        return pres.m + 1
    return None
