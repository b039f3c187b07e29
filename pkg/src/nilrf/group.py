"""The group G_phi on Z^m x Z^n: presentations, the group law, word balls and
collection of free words into base form."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .linalg import IntMatrix, Sublattice

__all__ = [
    "GroupPresentation",
    "GroupElement",
    "FreeWord",
    "ValidationError",
    "BudgetExceeded",
    "validate",
    "multiply",
    "inverse",
    "commutator",
    "power",
    "ball",
    "collect",
    "metric_constant",
    "default_budget",
]


class ValidationError(ValueError):
    """The matrices do not define a full alternating bilinear map."""


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the configured element budget."""


def default_budget() -> int:
    return int(os.environ.get("NILRF_BUDGET", 10**6))


@dataclass(frozen=True)
class GroupPresentation:
    m: int
    n: int
    A: tuple[IntMatrix, ...]
    name: str | None = None
    A_lower: tuple[IntMatrix, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "A_lower", tuple(a.strictly_lower() for a in self.A))

    @classmethod
    def from_matrices(cls, mats: Sequence, name: str | None = None) -> "GroupPresentation":
        A = tuple(a if isinstance(a, IntMatrix) else IntMatrix.from_rows(a) for a in mats)
        if not A:
            raise ValidationError("at least one matrix is required")
        m = A[0].nrows
        for a in A:
            if a.nrows != m or a.ncols != m:
                raise ValidationError(f"every matrix must be {m}x{m}")
        return cls(m, len(A), A, name)

    def phi(self, w1: Sequence[int], w2: Sequence[int]) -> tuple[int, ...]:
        return tuple(_bilinear(a, w1, w2) for a in self.A)

    def phi_lower(self, w1: Sequence[int], w2: Sequence[int]) -> tuple[int, ...]:
        return tuple(_bilinear(a, w1, w2) for a in self.A_lower)

    def identity(self) -> "GroupElement":
        return GroupElement((0,) * self.m, (0,) * self.n)

    def generators(self) -> list["GroupElement"]:
        """The 2(m+n) standard generators of Z^m x Z^n and their inverses."""
        gens = []
        for i in range(self.m):
            for s in (1, -1):
                gens.append(GroupElement(tuple(s * (j == i) for j in range(self.m)), (0,) * self.n))
        for i in range(self.n):
            for s in (1, -1):
                gens.append(GroupElement((0,) * self.m, tuple(s * (j == i) for j in range(self.n))))
        return gens

    def to_json(self) -> dict:
        out = {
            "m": str(self.m),
            "n": str(self.n),
            "matrices": [[[str(x) for x in row] for row in a.tolist()] for a in self.A],
        }
        if self.name:
            out["name"] = self.name
        return out


def _bilinear(a: IntMatrix, w1: Sequence[int], w2: Sequence[int]) -> int:
    m = a.nrows
    e = a.entries
    total = 0
    for i in range(m):
        x = w1[i]
        if x:
            row = e[i * m:(i + 1) * m]
            total += x * sum(c * y for c, y in zip(row, w2) if c)
    return total


@dataclass(frozen=True)
class GroupElement:
    w: tuple[int, ...]
    v: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(int(x) for x in self.w))
        object.__setattr__(self, "v", tuple(int(x) for x in self.v))

    def is_identity(self) -> bool:
        return not any(self.w) and not any(self.v)

    def is_central(self) -> bool:
        return not any(self.w)

    def to_json(self) -> dict:
        return {"w": [str(x) for x in self.w], "v": [str(x) for x in self.v]}

    def __str__(self):
        return f"({list(self.w)}, {list(self.v)})"


@dataclass(frozen=True)
class FreeWord:
    """Letters ``(i, +-1)`` with 1-based generator index, and a central tail."""

    letters: tuple[tuple[int, int], ...]
    tail: tuple[int, ...]


def validate(pres: GroupPresentation) -> list[str]:
    """Raise :class:`ValidationError` unless the presentation is valid.

    Returns the list of (non-fatal) warnings.
    """
    m, n = pres.m, pres.n
    if len(pres.A) != n:
        raise ValidationError(f"expected {n} matrices, got {len(pres.A)}")
    for idx, a in enumerate(pres.A, 1):
        if a.nrows != m or a.ncols != m:
            raise ValidationError(f"matrix {idx} is {a.nrows}x{a.ncols}, expected {m}x{m}")
        if not a.is_skew():
            raise ValidationError(f"matrix {idx} is not skew-symmetric")
    values = [pres.phi(_unit(m, i), _unit(m, j)) for i in range(m) for j in range(i + 1, m)]
    if Sublattice.spanned_by(values, n).rank < n:
        raise ValidationError("the bilinear map is not full: its values span a lattice of rank < n")
    notes = []
    if m > n * (n - 1) // 2 and n > 1:
        notes.append(f"m = {m} exceeds n(n-1)/2 = {n * (n - 1) // 2} (the bound as literally stated; not enforced)")
    return notes


def _unit(m: int, i: int) -> tuple[int, ...]:
    return tuple(int(j == i) for j in range(m))


def _check(pres: GroupPresentation, *gs: GroupElement):
    for g in gs:
        if len(g.w) != pres.m or len(g.v) != pres.n:
            raise ValueError(f"element {g} does not match dimensions ({pres.m}, {pres.n})")


def multiply(pres: GroupPresentation, g1: GroupElement, g2: GroupElement) -> GroupElement:
    _check(pres, g1, g2)
    corr = pres.phi_lower(g1.w, g2.w)
    return GroupElement(
        tuple(a + b for a, b in zip(g1.w, g2.w)),
        tuple(a + b + c for a, b, c in zip(g1.v, g2.v, corr)),
    )


def inverse(pres: GroupPresentation, g: GroupElement) -> GroupElement:
    _check(pres, g)
    corr = pres.phi_lower(g.w, g.w)
    return GroupElement(tuple(-x for x in g.w), tuple(-a + c for a, c in zip(g.v, corr)))


def commutator(pres: GroupPresentation, g1: GroupElement, g2: GroupElement) -> GroupElement:
    """``g1^-1 g2^-1 g1 g2``, which equals ``(0, phi(w1, w2))``."""
    _check(pres, g1, g2)
    return GroupElement((0,) * pres.m, pres.phi(g1.w, g2.w))


def power(pres: GroupPresentation, g: GroupElement, k: int) -> GroupElement:
    if k < 0:
        return power(pres, inverse(pres, g), -k)
    out, base = pres.identity(), g
    while k:
        if k & 1:
            out = multiply(pres, out, base)
        base = multiply(pres, base, base)
        k >>= 1
    return out


def metric_constant(pres: GroupPresentation) -> int:
    best = 1
    for i in range(pres.m):
        for j in range(pres.m):
            val = pres.phi_lower(_unit(pres.m, i), _unit(pres.m, j))
            best = max(best, max((abs(x) for x in val), default=0))
    return best


def ball(pres: GroupPresentation, r: int, budget: int | None = None) -> dict[GroupElement, int]:
    """Word-metric ball of radius r: element -> word norm.

    Breadth-first search over right multiplication by the standard generators.
    """
    if r < 0:
        raise ValueError("radius must be non-negative")
    budget = default_budget() if budget is None else budget
    gens = pres.generators()
    start = pres.identity()
    dist = {start: 0}
    frontier = [start]
    for step in range(1, r + 1):
        nxt = []
        for g in frontier:
            for s in gens:
                h = multiply(pres, g, s)
                if h not in dist:
                    dist[h] = step
                    nxt.append(h)
                    if len(dist) > budget:
                        raise BudgetExceeded(f"ball of radius {r} exceeds the budget of {budget} elements")
        frontier = nxt
    return dist


def collect(pres: GroupPresentation, word: FreeWord) -> GroupElement:
    """Base form of a free word by bubble-sorting its letters.

    Swapping adjacent letters ``a b -> b a`` multiplies by the commutator,
    so the central part picks up ``phi(a, b)`` for each swap.
    """
    m = pres.m
    letters = list(word.letters)
    tail = list(word.tail)
    if len(tail) != pres.n:
        raise ValueError("tail has the wrong length")
    changed = True
    while changed:
        changed = False
        for i in range(len(letters) - 1):
            (a, s), (b, t) = letters[i], letters[i + 1]
            if a > b:
                corr = pres.phi(_scaled_unit(m, a - 1, s), _scaled_unit(m, b - 1, t))
                tail = [x + c for x, c in zip(tail, corr)]
                letters[i], letters[i + 1] = letters[i + 1], letters[i]
                changed = True
    # letters are now grouped by generator; cancel inverse pairs within each group
    w = [0] * m
    for a, s in letters:
        w[a - 1] += s
    # Within one generator the letters commute, and e_i^k is (k e_i, 0) because
    # the strictly lower part vanishes on (e_i, e_i).  The ordered product
    # e_1^{k_1} ... e_m^{k_m} equals (w, sum_{i<j} phi^L(k_i e_i, k_j e_j)) = (w, 0).
    return GroupElement(tuple(w), tuple(tail))


def _scaled_unit(m: int, i: int, s: int) -> tuple[int, ...]:
    return tuple(s * (j == i) for j in range(m))


def word_product(pres: GroupPresentation, word: FreeWord) -> GroupElement:
    """Left-to-right product of the letters, then the tail (multiplication path)."""
    g = pres.identity()
    for a, s in word.letters:
        g = multiply(pres, g, GroupElement(_scaled_unit(pres.m, a - 1, s), (0,) * pres.n))
    return multiply(pres, g, GroupElement((0,) * pres.m, word.tail))
