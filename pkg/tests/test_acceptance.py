"""Acceptance criteria 1-11: each test prints one PASS/FAIL line.

The lines are also collected and repeated in the terminal summary.
"""
import itertools
import random
import time
from fractions import Fraction

import pytest

from _util import random_unimodular
from conftest import ACCEPTANCE_LINES
from nilrf.certify import analyze, delta_search, good_prime_basis, membership, pencil_of, upper_bound_d
from nilrf.constructions import (
    NoneFound,
    QuadraticField,
    galois_twist,
    heisenberg,
    heisenberg_gaussian,
    nonsingular_over_Q_search,
    psi_nonsingular,
    single_matrix_quotient,
    twist_determinant,
)
from nilrf.divisibility import divisibility_central, divisibility_oracle
from nilrf.forms import binary_forms_basis, rational_linear_factor
from nilrf.group import FreeWord, GroupElement, ball, collect, inverse, metric_constant, multiply, word_product
from nilrf.linalg import lcm_upto, primes
from nilrf.pencils import (
    FINITE,
    INFINITE,
    SINGULAR,
    block_minor_ideals,
    d_y_exact,
    d_y_formula,
    expected_block_ideal,
    ideals_equal,
    random_block_pencil,
    realize,
    resultant_span_identity,
)


def report(number: int, title: str, ok: bool, elapsed: float, limit: float | None, detail: str = ""):
    within = limit is None or elapsed < limit
    status = "PASS" if ok and within else "FAIL"
    budget = f" (limit {limit:g}s)" if limit is not None else ""
    line = f"criterion {number}: {status} {title} [{elapsed:.2f}s{budget}]" + (f" {detail}" if detail else "")
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line
    assert within, line


def timed(fn):
    t0 = time.perf_counter()
    result = fn()
    return result, time.perf_counter() - t0


def test_criterion_01_worked_verdicts():
    cases = [(heisenberg(), (3, 3)), (heisenberg_gaussian(), (3, 3)), (single_matrix_quotient(), (5, 5))]
    ok, worst, got = True, 0.0, []
    for pres, interval in cases:
        verdict, dt = timed(lambda: analyze(pres))
        worst = max(worst, dt)
        got.append(verdict.exponent_interval)
        ok &= verdict.exponent_interval == interval and verdict.tight and dt < 5
    report(1, "worked verdicts for the three flagship groups", ok, worst, 5, f"intervals {got}")


def test_criterion_02_certificate():
    cert, dt = timed(lambda: membership((1, 0), 2, pencil_of(heisenberg_gaussian())))
    order = [str(g.form) for g in cert.generators] if cert else []
    ok = (cert is not None and order == ["x1^2", "x1*x2", "x2^2", "x1^2 + x2^2"]
          and cert.lam == (1, 0, 0, 0))
    report(2, "membership certificate lambda = (1,0,0,0)", ok, dt, None,
           f"lambda {[str(x) for x in cert.lam] if cert else None}")


def test_criterion_03_lower_estimate():
    def run():
        checks = []
        for pres in (heisenberg(), heisenberg_gaussian()):
            d, cert = delta_search(pencil_of(pres))
            for kappa in (2, 3, 4, 5):
                L = lcm_upto(kappa)
                value, _ = divisibility_central(pres, [L * x for x in cert.v])
                checks.append(d == 2 and value > kappa**3)
        return all(checks), len(checks)

    (ok, count), dt = timed(run)
    report(3, "lower-bound inequality D(0, lcm(1..k) v) > k^3", ok, dt, 30, f"{count} comparisons")


def test_criterion_04_oracle_equivalence():
    bound = 10**4

    def run():
        cases = [(heisenberg(), (v,)) for v in range(-6, 7) if v]
        cases += [(heisenberg_gaussian(), v) for v in [(1, 0), (0, 1), (1, 1), (2, 3)]]
        compared = 0
        for pres, v in cases:
            value, _ = divisibility_central(pres, v)
            res = divisibility_oracle(pres, v, bound)
            if res is None:
                # only acceptable when no admissible D of index <= bound exists
                return False, compared
            if value <= bound or res.value <= bound:
                compared += 1
                if res.value != value:
                    return False, compared
        return True, compared

    (ok, compared), dt = timed(run)
    report(4, "central formula equals brute-force oracle", ok, dt, 120, f"{compared} cases compared")


def test_criterion_05_pencil_corpus():
    def run():
        rng = random.Random(20240501)
        for _ in range(100):
            spec = random_block_pencil(rng, max_blocks=4, max_k=3)
            M = realize(spec)
            dy = d_y_formula(spec)
            if d_y_exact(M) != dy:
                return False
            if membership((0, 1), dy, M) is None:
                return False
        return True

    ok, dt = timed(run)
    report(5, "pencil corpus d_y exact = formula and y^d_y certified (100 instances)", ok, dt, 120)


def test_criterion_06_block_ideals():
    def run():
        count = 0
        for k in range(1, 5):
            for alpha in (0, 1, -2):
                for d in (k - 1, k):
                    if d:
                        count += 1
                        if not ideals_equal(block_minor_ideals(FINITE, k, d, alpha),
                                            expected_block_ideal(FINITE, k, d, alpha), d):
                            return False, count
            for d in (k - 1, k):
                if d:
                    count += 1
                    if not ideals_equal(block_minor_ideals(INFINITE, k, d), expected_block_ideal(INFINITE, k, d), d):
                        return False, count
            count += 2
            if not ideals_equal(block_minor_ideals(SINGULAR, k, 2 * k), binary_forms_basis(2 * k), 2 * k):
                return False, count
            if block_minor_ideals(SINGULAR, k, 2 * k + 1):
                return False, count
        return True, count

    (ok, count), dt = timed(run)
    report(6, "block minor-ideal table", ok, dt, None, f"{count} identities")


def test_criterion_07_resultant():
    def run():
        pool = [0, 1, -1, 2]
        count = 0
        for r1, r2 in itertools.product((1, 2, 3), repeat=2):
            for a, b in itertools.permutations(pool, 2):
                count += 1
                if not resultant_span_identity(r1, r2, a, b):
                    return False, count
        return True, count

    (ok, count), dt = timed(run)
    report(7, "resultant span identity", ok, dt, None, f"{count} spans full rank")


def test_criterion_08_galois():
    def run():
        for D in (-1, 2):
            g = galois_twist(QuadraticField(D))
            if not all(a.is_skew() for a in g.A):
                return False
            if analyze(g).exponent_interval != (3, 3):
                return False
            if psi_nonsingular(g) != 5:
                return False
            if not isinstance(nonsingular_over_Q_search(g, 20), NoneFound):
                return False
            if rational_linear_factor(twist_determinant(g)) is not None:
                return False
            if twist_determinant(g).dehomogenize().rational_roots():
                return False
        return True

    ok, dt = timed(run)
    report(8, "Galois twists: [3,3], psi = 5, no rational singular point", ok, dt, 30)


def test_criterion_09_good_primes():
    def run():
        M = pencil_of(heisenberg_gaussian())
        odd = [p for p in primes(16) if p > 2][:15]
        good = [p for p in odd if good_prime_basis(M, p, 2) is not None]
        return good == [p for p in odd if p % 4 == 1], good

    (ok, good), dt = timed(run)
    report(9, "good primes are exactly p = 1 mod 4", ok, dt, None, f"good {good}")


def test_criterion_10_group_core():
    def run():
        rng = random.Random(10)
        presentations = [heisenberg(), heisenberg_gaussian()]

        def elem(pres):
            return GroupElement(tuple(rng.randint(-9, 9) for _ in range(pres.m)),
                                tuple(rng.randint(-9, 9) for _ in range(pres.n)))

        for _ in range(1000):
            pres = rng.choice(presentations)
            a, b, c = elem(pres), elem(pres), elem(pres)
            e = pres.identity()
            if multiply(pres, multiply(pres, a, b), c) != multiply(pres, a, multiply(pres, b, c)):
                return False
            if multiply(pres, a, e) != a or multiply(pres, e, a) != a:
                return False
            if multiply(pres, a, inverse(pres, a)) != e or multiply(pres, inverse(pres, a), a) != e:
                return False
        for _ in range(500):
            pres = rng.choice(presentations)
            letters = tuple((rng.randint(1, pres.m), rng.choice((1, -1))) for _ in range(rng.randint(0, 8)))
            word = FreeWord(letters, tuple(rng.randint(-3, 3) for _ in range(pres.n)))
            if collect(pres, word) != word_product(pres, word):
                return False
        for pres in presentations:
            C = metric_constant(pres)
            for g, r in ball(pres, 4).items():
                if max(map(abs, g.w), default=0) > r or max(map(abs, g.v), default=0) > C * r * r:
                    return False
        return True

    ok, dt = timed(run)
    report(10, "group axioms, collection, metric bounds", ok, dt, 60)


def test_criterion_11_invariance():
    def run():
        rng = random.Random(11)
        for pres in (heisenberg(), heisenberg_gaussian(), single_matrix_quotient()):
            M = pencil_of(pres)
            d0 = delta_search(M)[0]
            u0 = upper_bound_d(M).d_upper
            for _ in range(20):
                N = M.change_variables(random_unimodular(rng, pres.n)).congruent(random_unimodular(rng, pres.m))
                if delta_search(N)[0] != d0 or upper_bound_d(N).d_upper != u0:
                    return False
        return True

    ok, dt = timed(run)
    report(11, "delta and d_upper invariant under 20 unimodular changes per group", ok, dt, None)
