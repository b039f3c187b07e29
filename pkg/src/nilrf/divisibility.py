"""Divisibility function on central elements of G_phi.

``divisibility_central`` evaluates the closed-form minimum over prime powers
q = p^k and projections a of ``|Im_{Z_q} M_a| * q``.  ``divisibility_oracle``
is an independent route: it enumerates sublattices D of Z^n in Hermite form
and computes the largest compatible B directly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd, prod
from typing import Sequence

from .group import GroupElement, GroupPresentation, ball
from .linalg import (
    IntMatrix,
    Sublattice,
    image_size_mod,
    is_prime,
    kernel_mod,
    kernel_mod_q,
    projective_reps,
    rank_mod,
)

__all__ = [
    "DivisibilityWitness",
    "OracleResult",
    "RFProfilePoint",
    "divisibility_central",
    "divisibility_oracle",
    "divisibility_upper_primes",
    "abelian_divisibility",
    "rf_profile",
    "contract",
]


@dataclass(frozen=True)
class DivisibilityWitness:
    p: int
    k: int
    a: tuple[int, ...]
    index: int
    lattice_B: Sublattice
    lattice_D: Sublattice

    def to_json(self) -> dict:
        return {
            "p": str(self.p),
            "k": str(self.k),
            "a": [str(x) for x in self.a],
            "index": str(self.index),
            "B": self.lattice_B.to_json(),
            "D": self.lattice_D.to_json(),
        }


@dataclass(frozen=True)
class OracleResult:
    value: int
    lattice_B: Sublattice
    lattice_D: Sublattice


@dataclass(frozen=True)
class RFProfilePoint:
    radius: int
    ball_size: int
    max_divisibility: int
    argmax_element: GroupElement
    central: bool

    def to_json(self) -> dict:
        return {
            "radius": str(self.radius),
            "ball_size": str(self.ball_size),
            "max_divisibility": str(self.max_divisibility),
            "argmax": self.argmax_element.to_json(),
            "kind": "central" if self.central else "abelianization bound",
        }


def contract(pres: GroupPresentation, a: Sequence[int]) -> IntMatrix:
    """``M_a = sum_i a_i A_i``."""
    m = pres.m
    entries = [0] * (m * m)
    for ai, A in zip(a, pres.A):
        if ai:
            for idx, x in enumerate(A.entries):
                if x:
                    entries[idx] += ai * x
    return IntMatrix(m, m, tuple(entries))


def _prime_power(q: int) -> tuple[int, int] | None:
    for p in range(2, q + 1):
        if q % p == 0:
            k = 0
            while q % p == 0:
                q //= p
                k += 1
            return (p, k) if q == 1 else None
    return None


def _independent_mod_p(pres: GroupPresentation, p: int) -> bool:
    rows = [list(A.entries) for A in pres.A]
    return rank_mod(rows, p) == pres.n


def _check_v(pres: GroupPresentation, v: Sequence[int]) -> tuple[int, ...]:
    v = tuple(int(x) for x in v)
    if len(v) != pres.n:
        raise ValueError(f"central element must have {pres.n} coordinates")
    if not any(v):
        raise ValueError("the identity has infinite divisibility; v must be nonzero")
    return v


def divisibility_central(pres: GroupPresentation, v: Sequence[int]) -> tuple[int, DivisibilityWitness]:
    """Exact ``D(0, v)`` with a witness ``(p, k, a)`` and the subgroup N_{B,D}.

    Prime powers are visited in increasing order; as every term is at least
    q, the search stops once q reaches the best value found.  When the A_i
    are independent mod p, every M_a is nonzero mod p, so its rank mod p is at
    least 2 and the term is at least q^3; such q are skipped once q^3 reaches
    the best value.
    """
    v = _check_v(pres, v)
    n = pres.n
    best: tuple[int, int, int, tuple[int, ...]] | None = None
    indep: dict[int, bool] = {}
    q = 1
    while True:
        q += 1
        if best is not None and q >= best[0]:
            break
        pk = _prime_power(q)
        if pk is None:
            continue
        p, k = pk
        if all(x % q == 0 for x in v):
            continue
        if p not in indep:
            indep[p] = _independent_mod_p(pres, p)
        if best is not None and indep[p] and q**3 >= best[0]:
            continue
        for a in projective_reps(n, q, p):
            if sum(x * y for x, y in zip(a, v)) % q == 0:
                continue
            value = image_size_mod(contract(pres, a), p, k) * q
            cand = (value, p, k, a)
            if best is None or cand < best:
                best = cand
    value, p, k, a = best
    B = kernel_mod(contract(pres, a), p, k)
    D = kernel_mod_q(IntMatrix.from_rows([a]), p**k)
    witness = DivisibilityWitness(p, k, a, value, B, D)
    assert B.index * D.index == value
    return value, witness


def divisibility_upper_primes(pres: GroupPresentation, v: Sequence[int], primes: Sequence[int]):
    """Min over p in ``primes`` and a mod p of ``p^(1 + rank_p M_a)``.

    Returns ``(value, p, a)`` or None when every prime divides every
    coordinate of v.
    """
    v = _check_v(pres, v)
    if not primes:
        raise ValueError("at least one prime is required")
    best = None
    for p in sorted(set(primes)):
        if not is_prime(p):
            raise ValueError(f"{p} is not a prime")
        for a in projective_reps(pres.n, p, p):
            if sum(x * y for x, y in zip(a, v)) % p == 0:
                continue
            rows = contract(pres, a).tolist()
            cand = (p ** (1 + rank_mod(rows, p)), p, a)
            if best is None or cand < best:
                best = cand
    return best


# ---------------------------------------------------------------- oracle


def _hermite_lattices(n: int, index: int):
    """Lower-triangular column Hermite bases of all sublattices of Z^n of the given index."""
    for diag in _ordered_factorisations(index, n):
        slots = [(i, j) for i in range(n) for j in range(i)]
        ranges = [range(diag[i]) for i, _ in slots]
        for offs in itertools.product(*ranges):
            H = [[0] * n for _ in range(n)]
            for i in range(n):
                H[i][i] = diag[i]
            for (i, j), x in zip(slots, offs):
                H[i][j] = x
            yield H


def _ordered_factorisations(N: int, parts: int):
    if parts == 1:
        yield (N,)
        return
    for d in range(1, N + 1):
        if N % d == 0:
            for rest in _ordered_factorisations(N // d, parts - 1):
                yield (d,) + rest


def _solve_lower(H, v) -> bool:
    """Whether v lies in the column span of the lower-triangular H."""
    n = len(H)
    x = [0] * n
    for i in range(n):
        r = v[i] - sum(H[i][j] * x[j] for j in range(i))
        if r % H[i][i]:
            return False
        x[i] = r // H[i][i]
    return True


def _adjugate_lower(H) -> list[list[int]]:
    """``det(H) * H^{-1}`` for lower-triangular H, exactly."""
    from fractions import Fraction

    n = len(H)
    det = prod(H[i][i] for i in range(n))
    inv = [[Fraction(0)] * n for _ in range(n)]
    for c in range(n):
        for i in range(n):
            s = Fraction(int(i == c)) - sum(H[i][j] * inv[j][c] for j in range(i))
            inv[i][c] = s / H[i][i]
    return [[int(x * det) for x in row] for row in inv]


def _subgroup_size(gens: list[tuple[int, ...]], N: int, cap: int) -> int | None:
    """Order of the subgroup of (Z/N)^r generated by ``gens``; None beyond ``cap``."""
    gens = [g for g in {tuple(x % N for x in g) for g in gens} if any(g)]
    if not gens:
        return 1
    zero = tuple(0 for _ in gens[0])
    seen = {zero}
    queue = [zero]
    while queue:
        nxt = []
        for x in queue:
            for g in gens:
                y = tuple((a + b) % N for a, b in zip(x, g))
                if y not in seen:
                    seen.add(y)
                    if len(seen) > cap:
                        return None
                    nxt.append(y)
        queue = nxt
    return len(seen)


def divisibility_oracle(pres: GroupPresentation, v: Sequence[int], index_bound: int) -> OracleResult | None:
    """Minimum of ``[Z^m:B][Z^n:D]`` over sublattices D of index <= bound with v not in D.

    B is the largest sublattice with ``phi(B, Z^m) in D``.  Its index is the
    size of the image of ``w -> (H^-1 phi(w, e_j))_j`` modulo Z^n, computed
    by closing the generated subgroup of (Z/N)^(mn) directly.
    """
    v = _check_v(pres, v)
    m, n = pres.m, pres.n
    # C_j w = phi(w, e_j); (C_j)_{i,l} = (A_i)_{l,j}
    C = [[[pres.A[i][l, j] for l in range(m)] for i in range(n)] for j in range(m)]
    best: tuple[int, list] | None = None
    N = 0
    while True:
        N += 1
        if N > index_bound or (best is not None and N >= best[0]):
            break
        for H in _hermite_lattices(n, N):
            if _solve_lower(H, v):
                continue
            adj = _adjugate_lower(H)
            rows = []
            for j in range(m):
                for r in range(n):
                    rows.append([sum(adj[r][i] * C[j][i][l] for i in range(n)) for l in range(m)])
            cols = [tuple(rows[r][l] for r in range(len(rows))) for l in range(m)]
            cap = (best[0] - 1) // N if best is not None else index_bound * max(index_bound, 1) ** m
            size = _subgroup_size(cols, N, cap)
            if size is None:
                continue
            total = size * N
            if best is None or total < best[0]:
                best = (total, H)
    if best is None:
        return None
    total, H = best
    D = Sublattice.spanned_by([[H[i][j] for i in range(n)] for j in range(n)], n)
    adj = _adjugate_lower(H)
    K = []
    for j in range(m):
        for r in range(n):
            K.append([sum(adj[r][i] * C[j][i][l] for i in range(n)) for l in range(m)])
    B = kernel_mod_q(IntMatrix.from_rows(K, m), N_of(H))
    return OracleResult(total, B, D)


def N_of(H) -> int:
    return prod(H[i][i] for i in range(len(H)))


# ---------------------------------------------------------------- profiles


def abelian_divisibility(w: Sequence[int]) -> int:
    """Smallest index of a subgroup of Z^m missing w: the least prime power not dividing gcd(w)."""
    g = 0
    for x in w:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("w must be nonzero")
    q = 1
    while True:
        q += 1
        if _prime_power(q) and g % q:
            return q


def rf_profile(pres: GroupPresentation, r_max: int, budget: int | None = None) -> list[RFProfilePoint]:
    """Per-radius maximum of the computable divisibility over the ball.

    Central elements use the exact value; non-central elements use the
    divisibility of w in Z^m (an upper bound for the true value).  Ties are
    broken by smaller word norm, then by the larger (w, v) tuple.
    """
    dist = ball(pres, r_max, budget)
    cache: dict[tuple[int, ...], int] = {}
    scored = []
    for g, d in dist.items():
        if g.is_identity():
            continue
        if g.is_central():
            if g.v not in cache:
                cache[g.v] = divisibility_central(pres, g.v)[0]
            val = cache[g.v]
        else:
            val = abelian_divisibility(g.w)
        scored.append((d, val, g))
    out = []
    for r in range(1, r_max + 1):
        inside = [(val, -d, g.w, g.v, g) for d, val, g in scored if d <= r]
        size = 1 + len(inside)
        val, _, _, _, g = max(inside, key=lambda t: t[:4])
        out.append(RFProfilePoint(r, size, val, g, g.is_central()))
    return out
