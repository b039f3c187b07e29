import random
from fractions import Fraction

import pytest

from _util import random_unimodular
from nilrf.certify import (
    analyze,
    delta_search,
    good_prime_basis,
    good_prime_scan,
    membership,
    pencil_of,
    primitive_vectors,
    upper_bound_d,
    verify_certificate,
)
from nilrf.constructions import heisenberg_sum
from nilrf.forms import SymbolicPencil
from nilrf.group import GroupPresentation, ValidationError


def recheck(M, cert):
    terms = [(g.rows, g.cols, g.scale, lam) for g, lam in cert.terms()]
    return verify_certificate(M, cert.v, cert.d, terms)


class TestMembership:
    def test_gaussian_example(self, h3i_pencil):
        cert = membership((1, 0), 2, h3i_pencil)
        assert cert.lam == (1, 0, 0, 0)
        assert [str(g.form) for g in cert.generators] == ["x1^2", "x1*x2", "x2^2", "x1^2 + x2^2"]
        assert cert.integral
        assert recheck(h3i_pencil, cert)

    def test_single_block(self):
        M = SymbolicPencil.from_matrices([[[0, 1], [-1, 0]]])
        cert = membership((1,), 2, M)
        assert cert.lam == (1,)

    def test_infeasible(self, h3i_pencil):
        assert membership((1, 0), 4, h3i_pencil) is None

    def test_bad_input(self, h3i_pencil):
        with pytest.raises(ValueError):
            membership((0, 0), 2, h3i_pencil)
        with pytest.raises(ValueError):
            membership((1, 0), 5, h3i_pencil)

    def test_verify_rejects_tampering(self, h3i_pencil):
        cert = membership((1, 0), 2, h3i_pencil)
        terms = [(g.rows, g.cols, g.scale, lam * 2) for g, lam in cert.terms()]
        assert not verify_certificate(h3i_pencil, (1, 0), 2, terms)
        assert not verify_certificate(h3i_pencil, (0, 1), 2, [(g.rows, g.cols, g.scale, lam) for g, lam in cert.terms()])


class TestDelta:
    def test_flagships(self, h3, h3i, quotient):
        d, cert = delta_search(pencil_of(h3))
        assert (d, cert.v) == (2, (1,))
        d, cert = delta_search(pencil_of(h3i))
        assert (d, cert.v) == (2, (1, 0))
        d, _ = delta_search(pencil_of(quotient))
        assert d == 4

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_heisenberg_sum(self, k):
        d, cert = delta_search(pencil_of(heisenberg_sum(k)))
        assert d == 2
        assert cert.v == tuple(int(i == 0) for i in range(k))

    def test_certificates_reexpand(self, h3, h3i, quotient):
        for pres in (h3, h3i, quotient, heisenberg_sum(2)):
            M = pencil_of(pres)
            _, cert = delta_search(M)
            assert recheck(M, cert)

    def test_primitive_vectors(self):
        vs = primitive_vectors(2, 1)
        assert vs == [(1, 0), (0, 1), (1, 1), (1, -1)]
        assert len(primitive_vectors(2, 2)) == 8
        assert all(v[next(i for i, x in enumerate(v) if x)] > 0 for v in primitive_vectors(3, 2))


class TestUpper:
    def test_flagships(self, h3, h3i, quotient):
        rep = upper_bound_d(pencil_of(h3))
        assert (rep.d_upper, rep.method) == (2, "rank_n1")
        rep = upper_bound_d(pencil_of(h3i))
        assert (rep.d_upper, rep.method) == (2, "binary_gcd_n2")
        assert rep.hyperplane_v is None  # gcd of the 2-minors is constant
        assert upper_bound_d(pencil_of(quotient)).d_upper == 4

    def test_hyperplane_present_for_linear_power(self):
        # x1 J + x1 J + x2 J (block sum): the 4-minors have gcd x1^2, a pure linear power
        J = [[0, 1], [-1, 0]]
        O = [[0, 0], [0, 0]]

        def diag(*blocks):
            out = [[0] * 6 for _ in range(6)]
            for k, B in enumerate(blocks):
                for i in range(2):
                    for j in range(2):
                        out[2 * k + i][2 * k + j] = B[i][j]
            return out

        M = SymbolicPencil.from_matrices([diag(J, J, O), diag(O, O, J)])
        rep = upper_bound_d(M)
        assert rep.d_upper == 4
        assert rep.hyperplane_v == (1, 0)
        d, cert = delta_search(M)
        assert (d, cert.v) == (4, (1, 0))

    def test_heuristic_interval(self):
        rep = upper_bound_d(pencil_of(heisenberg_sum(3)))
        assert rep.method == "heuristic_interval"
        lo, hi = rep.interval
        assert lo <= 2 <= hi
        assert rep.d_upper == 2

    def test_even(self, h3, h3i, quotient):
        for pres in (h3, h3i, quotient, heisenberg_sum(2)):
            assert upper_bound_d(pencil_of(pres)).d_upper % 2 == 0


class TestGoodPrimes:
    def test_examples(self, h3, h3i_pencil):
        basis = good_prime_basis(h3i_pencil, 5, 2)
        assert basis is not None and len(basis) == 2
        assert all(rk <= 2 for _, rk in basis)
        assert good_prime_basis(h3i_pencil, 3, 2) is None
        assert good_prime_basis(pencil_of(h3), 2, 2) == [((1,), 2)]

    def test_mod_four(self, h3i_pencil):
        scan = good_prime_scan(h3i_pencil, 2, 16)
        for p, good in scan.items():
            if p > 2:
                assert good == (p % 4 == 1)

    def test_rejects(self, h3i_pencil):
        with pytest.raises(ValueError):
            good_prime_basis(h3i_pencil, 9, 2)
        M = SymbolicPencil.from_matrices([[[0, Fraction(1, 2)], [Fraction(-1, 2), 0]]])
        with pytest.raises(ValueError):
            good_prime_basis(M, 3, 2)


class TestAnalyze:
    def test_flagships(self, h3, h3i, quotient):
        for pres, interval in ((h3, (3, 3)), (h3i, (3, 3)), (quotient, (5, 5))):
            v = analyze(pres)
            assert v.exponent_interval == interval and v.tight

    def test_invalid(self):
        with pytest.raises(ValidationError):
            analyze(GroupPresentation.from_matrices([[[0, 0], [0, 0]]]))

    def test_json_shape(self, h3i):
        out = analyze(h3i).to_json()
        assert out["exponent_interval"] == ["3", "3"]
        assert out["lower_certificate"]["v"] == ["1", "0"]
        assert out["upper_report"]["method"] == "binary_gcd_n2"

    def test_sum_is_interval(self):
        v = analyze(heisenberg_sum(3))
        assert v.delta <= v.d_upper
        assert v.upper.method == "heuristic_interval"


class TestInvariance:
    def test_changes_of_basis(self, h3, h3i, quotient):
        rng = random.Random(17)
        for pres in (h3, h3i, quotient):
            M = pencil_of(pres)
            d0, cert0 = delta_search(M)
            u0 = upper_bound_d(M).d_upper
            for _ in range(5):
                P = random_unimodular(rng, pres.n)
                Q = random_unimodular(rng, pres.m)
                N = M.change_variables(P).congruent(Q)
                d1, _ = delta_search(N)
                assert d1 == d0
                assert upper_bound_d(N).d_upper == u0
                # x = P^T x' turns (v^T x)^d into ((P v)^T x')^d
                Pv = tuple(sum(P[i][j] * cert0.v[j] for j in range(pres.n)) for i in range(pres.n))
                assert membership(Pv, d0, N) is not None
