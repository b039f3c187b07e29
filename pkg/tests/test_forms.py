import itertools
import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilrf.forms import (
    HomogeneousForm,
    SpanBuilder,
    SymbolicPencil,
    UniPoly,
    gcd_minors_binary,
    minor_det,
    minor_ideal_generators,
    minor_span,
    rational_linear_factor,
    resultant,
)

x1 = HomogeneousForm.linear([1, 0])
x2 = HomogeneousForm.linear([0, 1])


def dense_det(M: SymbolicPencil, rows, cols):
    """Leibniz expansion, used as an independent reference."""
    total = HomogeneousForm.zero(M.nvars, len(rows))
    for perm in itertools.permutations(range(len(cols))):
        sign = 1
        for i in range(len(perm)):
            for j in range(i + 1, len(perm)):
                if perm[i] > perm[j]:
                    sign = -sign
        term = HomogeneousForm.one(M.nvars) * sign
        for i, j in enumerate(perm):
            term = term * M.entry(rows[i], cols[j])
        total = total + term
    return total


def random_skew(rng, m, n, lo=-2, hi=2):
    mats = []
    for _ in range(n):
        A = [[0] * m for _ in range(m)]
        for i in range(m):
            for j in range(i + 1, m):
                A[i][j] = rng.randint(lo, hi)
                A[j][i] = -A[i][j]
        mats.append(A)
    return SymbolicPencil.from_matrices(mats, m)


class TestMinorGenerators:
    def test_gaussian_heisenberg_degree_two(self, h3i_pencil):
        forms = [g.form for g in minor_ideal_generators(h3i_pencil, 2)]
        assert forms == [x1**2, x1 * x2, x2**2, x1**2 + x2**2]

    def test_single_block(self):
        M = SymbolicPencil.from_matrices([[[0, 1], [-1, 0]]])
        gens = minor_ideal_generators(M, 2)
        assert [g.form for g in gens] == [HomogeneousForm.monomial((2,))]

    def test_zero_pencil(self):
        M = SymbolicPencil.from_matrices([[[0] * 3] * 3, [[0] * 3] * 3])
        assert minor_ideal_generators(M, 2) == []
        assert minor_span(M, 1) == []

    def test_range(self, h3i_pencil):
        with pytest.raises(ValueError):
            minor_ideal_generators(h3i_pencil, 0)
        with pytest.raises(ValueError):
            minor_ideal_generators(h3i_pencil, 5)

    def test_generators_are_real_minors(self, h3i_pencil):
        for d in (1, 2, 3, 4):
            for g in minor_ideal_generators(h3i_pencil, d):
                assert minor_det(h3i_pencil, g.rows, g.cols) == g.value

    def test_skew_check(self):
        with pytest.raises(ValueError):
            SymbolicPencil.from_matrices([[[0, 1], [1, 0]]])

    def test_all_minors_enumerated(self):
        # every one of the C(m,d)^2 minors is a scalar multiple of a listed generator
        rng = random.Random(3)
        M = random_skew(rng, 4, 2)
        for d in (1, 2, 3):
            gens = {g.form for g in minor_ideal_generators(M, d)}
            count = 0
            for rows in itertools.combinations(range(4), d):
                for cols in itertools.combinations(range(4), d):
                    count += 1
                    f = dense_det(M, rows, cols)
                    if not f.is_zero():
                        assert f.normalized() in gens
            assert count == comb(4, d) ** 2


class TestMinorDet:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.integers(2, 5))
    def test_against_leibniz(self, seed, m):
        rng = random.Random(seed)
        M = random_skew(rng, m, 2)
        d = rng.randint(1, m)
        rows = sorted(rng.sample(range(m), d))
        cols = sorted(rng.sample(range(m), d))
        assert minor_det(M, rows, cols) == dense_det(M, rows, cols)

    def test_block_diagonal_sign(self):
        # permuted block structure exercises the sign bookkeeping
        A = [[0, 0, 1, 0], [0, 0, 0, 2], [-1, 0, 0, 0], [0, -2, 0, 0]]
        M = SymbolicPencil.from_matrices([A])
        for rows in itertools.combinations(range(4), 2):
            for cols in itertools.combinations(range(4), 2):
                assert minor_det(M, rows, cols) == dense_det(M, rows, cols)


class TestSpans:
    def test_span_matches_exhaustive(self):
        rng = random.Random(11)
        for _ in range(10):
            M = random_skew(rng, rng.randint(3, 5), 2)
            for d in range(1, M.m + 1):
                full = SpanBuilder()
                for g in minor_ideal_generators(M, d):
                    full.add(g.form)
                part = SpanBuilder()
                for g in minor_span(M, d):
                    part.add(g.form)
                    assert full.contains(g.form)
                assert part.dim == full.dim

    def test_express(self):
        sb = SpanBuilder()
        sb.add(x1**2)
        sb.add(x1 * x2)
        assert sb.add(x1**2 + x1 * x2) is False
        assert sb.express(x1**2 * 3 - x1 * x2) == {0: Fraction(3), 1: Fraction(-1)}
        assert sb.express(x2**2) is None


class TestGcd:
    def test_gaussian(self, h3i_pencil):
        assert gcd_minors_binary(h3i_pencil, 2) == HomogeneousForm.one(2)
        assert gcd_minors_binary(h3i_pencil, 4) == (x1**2 + x2**2) ** 2

    def test_single_eigen_block(self):
        M = SymbolicPencil.from_matrices([[[0, 1], [-1, 0]], [[0, 0], [0, 0]]])
        assert gcd_minors_binary(M, 2) == x1**2

    def test_zero(self):
        M = SymbolicPencil.from_matrices([[[0, 1], [-1, 0]], [[0, 0], [0, 0]]])
        M3 = SymbolicPencil.from_matrices([[[0] * 3] * 3] * 2)
        assert gcd_minors_binary(M3, 2).is_zero()

    def test_requires_binary(self):
        M = SymbolicPencil.from_matrices([[[0, 1], [-1, 0]]])
        with pytest.raises(ValueError):
            gcd_minors_binary(M, 1)

    def test_matches_exhaustive_gcd(self):
        # block-wise gcd versus the gcd of every enumerated minor
        from nilrf.forms import gcd_binary_forms
        from nilrf.pencils import random_block_pencil, realize

        rng = random.Random(21)
        pencils = [random_skew(rng, rng.randint(2, 5), 2, -1, 1) for _ in range(10)]
        pencils += [realize(random_block_pencil(rng, max_blocks=3, max_k=2)) for _ in range(10)]
        for M in pencils:
            for d in range(1, M.m + 1):
                gens = minor_ideal_generators(M, d)
                expect = gcd_binary_forms([g.form for g in gens]) if gens else HomogeneousForm.zero(2, d)
                assert gcd_minors_binary(M, d) == expect

    def test_divides_every_minor(self):
        rng = random.Random(5)
        for _ in range(8):
            M = random_skew(rng, 4, 2, -1, 1)
            for d in range(1, 5):
                g = gcd_minors_binary(M, d)
                if g.is_zero():
                    continue
                gd = g.dehomogenize()
                yv = g.y_valuation()
                for rows in itertools.combinations(range(4), d):
                    for cols in itertools.combinations(range(4), d):
                        f = minor_det(M, rows, cols)
                        if f.is_zero():
                            continue
                        assert f.y_valuation() >= yv
                        assert f.dehomogenize().divmod(gd)[1].is_zero()


class TestResultant:
    def test_examples(self):
        t = UniPoly([0, 1])
        assert resultant(t, UniPoly([-1, 1])) == -1  # q1 columns first
        a = Fraction(3, 2)
        assert resultant(UniPoly([-a, 1]), UniPoly([-a, 1])) == 0
        assert resultant(UniPoly([1, 0, 1]), UniPoly([-1, 1])) == 2

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            resultant(UniPoly(), UniPoly([1]))

    @settings(max_examples=120, deadline=None)
    @given(st.lists(st.integers(-3, 3), min_size=1, max_size=5), st.lists(st.integers(-3, 3), min_size=1, max_size=5),
           st.lists(st.integers(-2, 2), min_size=0, max_size=2))
    def test_zero_iff_common_factor(self, c1, c2, common):
        q1, q2 = UniPoly(c1), UniPoly(c2)
        if common:
            shared = UniPoly(common + [1])
            q1, q2 = q1 * shared, q2 * shared
        if q1.is_zero() or q2.is_zero():
            return
        res = resultant(q1, q2)
        assert (res == 0) == (q1.gcd(q2).degree > 0)


class TestLinearFactor:
    def test_examples(self):
        assert rational_linear_factor(x1**2) == ((1, 0), 2)
        assert rational_linear_factor((x1**2 + x2**2) ** 2) is None
        assert rational_linear_factor((x1 * 2 - x2 * 3) ** 3) == ((2, -3), 3)
        assert rational_linear_factor(x2**4 * 7) == ((0, 1), 4)
        assert rational_linear_factor(x1 * x2) is None
        assert rational_linear_factor(HomogeneousForm.one(2)) is None

    @settings(max_examples=80, deadline=None)
    @given(st.integers(-6, 6), st.integers(-6, 6), st.integers(1, 5), st.integers(-5, 5).filter(bool))
    def test_reexpansion(self, a, b, k, c):
        if a == 0 and b == 0:
            return
        g = HomogeneousForm.linear([a, b]) ** k * c
        v, kk = rational_linear_factor(g)
        assert kk == k
        assert (HomogeneousForm.linear(list(v)) ** k).normalized() == g.normalized()


class TestForms:
    def test_normalized_and_str(self):
        f = x1 * Fraction(-2, 3) + x2 * Fraction(4, 3)
        assert f.normalized() == x1 - x2 * 2
        assert str(x1**2 + x2**2) == "x1^2 + x2^2"

    def test_json_round_trip(self):
        f = (x1 - x2 * Fraction(1, 2)) ** 3
        assert HomogeneousForm.from_json(f.to_json()) == f

    def test_substitute(self):
        # x = P^T x' with P = [[1, 1], [0, 1]]: x1 = x1', x2 = x1' + x2'
        g = (x1**2 + x1 * x2).substitute([[1, 1], [0, 1]])
        assert g == x1**2 + x1 * (x1 + x2)

    def test_linear_power(self):
        assert HomogeneousForm.linear_power([2, -1, 3], 4) == HomogeneousForm.linear([2, -1, 3]) ** 4

    def test_rational_roots(self):
        assert UniPoly([-1, 0, 4]).rational_roots() == [Fraction(-1, 2), Fraction(1, 2)]
        assert UniPoly([1, 0, 1]).rational_roots() == []
        assert UniPoly([0, 0, 1]).rational_roots() == [0]
