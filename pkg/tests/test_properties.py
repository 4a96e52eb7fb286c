"""
Randomized property suites.

Each suite draws from random.Random(seed) so that failures reproduce; the
worked-example algebras come from tests/corpus.py. Corpus endomorphisms and
their adapted bases are built once per session.
"""

import math
import random
import sys
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import pytest
import sympy
from sympy import Matrix, Rational

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.classifier import check_standing_assumptions, classify
from core.endomorphism import (
    carnot_complete,
    is_homomorphism,
    is_unipotent_free,
    make_endomorphism,
    power,
    weakly_preserves_grading,
)
from core.growth import (
    basis_rates,
    growth_filtration,
    multiset_equal_up_to_power,
    rate_compare,
    rate_key,
    rate_to_json,
)
from core.jordan import absolute_jordan_form, jordan_structure
from core.lie_algebra import bracket
from core.models import GrowthRate, Ordering
from core.pajf import adapted_jordan_basis, compute_pajf, pajf_equal
from core.scalar import AlgebraicReal, alg_compare, power_ratio
from tests.corpus import (
    FOURSTEP_PHI,
    FOURSTEP_THETA,
    H3_PHI,
    H3_THETA,
    H3_VARIANT,
    fourstep_endo,
    h3_cubed,
    h3_endo,
    heisenberg,
    heisenberg_plane,
    heisenberg_shear,
)
from utils.linalg import hstack, in_span


@lru_cache(maxsize=None)
def corpus_endomorphisms() -> tuple:
    return (
        heisenberg_shear(),
        carnot_complete(heisenberg(), [[2, 0], [0, 3]], "diag"),
        h3_endo(H3_PHI, "phi"),
        h3_endo(H3_THETA, "theta"),
        fourstep_endo(FOURSTEP_PHI, "phi"),
        fourstep_endo(FOURSTEP_THETA, "theta"),
    )


@lru_cache(maxsize=None)
def corpus_basis(index: int):
    return adapted_jordan_basis(corpus_endomorphisms()[index])


# ---------------------------------------------------------------------------
# Random grading-preserving homomorphisms
# ---------------------------------------------------------------------------

def _expanding_block(rng: random.Random, n: int) -> Matrix:
    """P T P^-1 with T upper triangular, diagonal in {2, 3}, P unimodular."""
    T = sympy.zeros(n, n)
    for i in range(n):
        T[i, i] = rng.choice([2, 3])
        for j in range(i + 1, n):
            T[i, j] = rng.randint(-2, 2)
    P = sympy.eye(n)
    for _ in range(2):
        i, j = rng.sample(range(n), 2)
        step = sympy.eye(n)
        step[i, j] = rng.randint(-2, 2)
        P = P * step
    return P * T * P.inv()


def random_homomorphism(rng: random.Random, g):
    """
    Carnot completion of a random expanding action on V_1.

    On h3 + R^2 the x, y block may leak into the central u, v plane but not
    the other way around, which keeps the action a homomorphism.
    """
    if g.dim == 3:
        return carnot_complete(g, _expanding_block(rng, 2))
    base = sympy.zeros(4, 4)
    base[:2, :2] = _expanding_block(rng, 2)
    base[2:, 2:] = _expanding_block(rng, 2)
    base[2:, :2] = Matrix(2, 2, [rng.randint(-2, 2) for _ in range(4)])
    return carnot_complete(g, base)


@lru_cache(maxsize=None)
def random_homomorphisms() -> tuple:
    rng = random.Random(9)
    return tuple(random_homomorphism(rng, g) for g in (heisenberg(), heisenberg_plane()) for _ in range(3))


# ===========================================================================
# Total orders
# ===========================================================================

class TestAlgCompareOrder:
    def test_rationals_agree_with_fractions(self):
        rng = random.Random(1)
        for _ in range(300):
            p, q = Fraction(rng.randint(-50, 50), rng.randint(1, 20)), Fraction(rng.randint(-50, 50), rng.randint(1, 20))
            a = AlgebraicReal.from_rational(Rational(p.numerator, p.denominator))
            b = AlgebraicReal.from_rational(Rational(q.numerator, q.denominator))
            expected = Ordering.LT if p < q else Ordering.GT if p > q else Ordering.EQ
            assert alg_compare(a, b) is expected

    def test_square_roots_axioms(self):
        """Antisymmetry and transitivity on triples of sqrt(n) and rationals."""
        rng = random.Random(2)
        pool = [AlgebraicReal.from_expr(sympy.sqrt(n)) for n in range(2, 20)]
        pool += [AlgebraicReal.from_rational(Rational(n, 4)) for n in range(0, 24)]
        for _ in range(150):
            a, b, c = rng.choice(pool), rng.choice(pool), rng.choice(pool)
            assert alg_compare(a, b) == -alg_compare(b, a)
            if alg_compare(a, b) <= 0 and alg_compare(b, c) <= 0:
                assert alg_compare(a, c) <= 0
            if alg_compare(a, b) is not Ordering.EQ:
                assert (float(a) < float(b)) == (alg_compare(a, b) is Ordering.LT)


class TestRateCompareOrder:
    @staticmethod
    def log_value(r: GrowthRate, t: float) -> float:
        return (r.k * math.log(t) + t * math.log(float(r.lam))) / r.w

    def test_axioms_and_numeric_dominance(self):
        """lam in 2..9, k <= 4, w <= 4: the exact order matches log values at t = 10^3 and 10^6."""
        rng = random.Random(3)
        pool = [AlgebraicReal.from_rational(n) for n in range(2, 10)]

        def draw():
            return GrowthRate(rng.choice(pool), rng.randint(0, 4), rng.randint(1, 4))

        for _ in range(300):
            a, b, c = draw(), draw(), draw()
            ab = rate_compare(a, b)
            assert ab == -rate_compare(b, a)
            if ab <= 0 and rate_compare(b, c) <= 0:
                assert rate_compare(a, c) <= 0
            for t in (1e3, 1e6):
                diff = self.log_value(a, t) - self.log_value(b, t)
                if ab is Ordering.EQ:
                    assert diff == pytest.approx(0.0, abs=1e-6 * t)
                else:
                    assert (diff < 0) == (ab is Ordering.LT)


# ===========================================================================
# Endomorphisms
# ===========================================================================

class TestEndomorphismProperties:
    def test_random_completions_are_graded_homomorphisms(self):
        rng = random.Random(4)
        g = heisenberg()
        for _ in range(10):
            E = carnot_complete(g, Matrix(2, 2, [rng.randint(-3, 3) for _ in range(4)]))
            assert is_homomorphism(E).ok
            assert weakly_preserves_grading(E)

    def test_random_expanding_maps_meet_the_standing_assumptions(self):
        for E in random_homomorphisms():
            assert weakly_preserves_grading(E)
            report = check_standing_assumptions(E)
            assert report.ok, report.failed

    @pytest.mark.parametrize("k", [2, 3])
    def test_unipotent_free_is_stable_under_powers(self, k):
        for E in corpus_endomorphisms()[:4]:
            assert is_unipotent_free(E)
            assert is_unipotent_free(power(E, k))


# ===========================================================================
# Jordan data
# ===========================================================================

class TestJordanProperties:
    def test_block_dimensions_and_determinant(self):
        rng = random.Random(5)
        for _ in range(25):
            n = rng.randint(1, 4)
            M = Matrix(n, n, [rng.randint(-3, 3) for _ in range(n * n)])
            if M.det() == 0:
                continue
            data = jordan_structure(M)
            assert sum(b.dimension for b in data.blocks) == n
            product = 1.0
            for modulus, size in absolute_jordan_form(data):
                product *= float(modulus) ** size
            assert product == pytest.approx(abs(float(M.det())), rel=1e-9)

    @pytest.mark.parametrize("k", [2, 3])
    def test_moduli_of_powers(self, k):
        for E in corpus_endomorphisms()[:3]:
            base = absolute_jordan_form(jordan_structure(E.matrix))
            powered = absolute_jordan_form(jordan_structure(E.matrix ** k))
            assert [(m.pow(k), s) for m, s in base] == [(m, s) for m, s in powered]


# ===========================================================================
# Permuted forms and rates
# ===========================================================================

class TestPermutedFormProperties:
    def test_diagonal_layout(self):
        """For diagonal maps the table is the (weight, modulus) multiset in canonical order."""
        rng = random.Random(6)
        g = h3_cubed()
        for _ in range(6):
            E = carnot_complete(g, sympy.diag(*[rng.choice([2, 3, 4, 8]) for _ in range(g.grade_dims[0])]))
            P = compute_pajf(E)
            got = [(e.weight, e.modulus.rational_value) for e in P.position_table]
            expected = sorted((w, E.matrix[i, i]) for i, w in enumerate(g.weights))
            assert got == expected

    def test_weight_signatures_are_nondecreasing(self):
        for index in range(len(corpus_endomorphisms())):
            for block in corpus_basis(index).blocks:
                assert list(block.weight_sig) == sorted(block.weight_sig)

    def test_conjugation_by_automorphisms(self):
        """A E A^-1 for a graded automorphism A has the same permuted form and rates."""
        rng = random.Random(7)
        g = heisenberg()
        E = heisenberg_shear()
        reference = compute_pajf(E)
        for _ in range(8):
            while True:
                base = Matrix(2, 2, [rng.randint(-2, 2) for _ in range(4)])
                if base.det() != 0:
                    break
            A = carnot_complete(g, base).matrix
            conj = make_endomorphism(g, A * E.matrix * A.inv())
            assert pajf_equal(reference, compute_pajf(conj))
            cmp = multiset_equal_up_to_power(basis_rates(corpus_basis(0)), basis_rates(conj))
            assert (cmp.outcome, cmp.s) == ("Equal", Fraction(1))

    def test_every_corpus_multiset_has_a_pure_exponential(self):
        for index in range(len(corpus_endomorphisms())):
            assert any(r.k == 0 for r in basis_rates(corpus_basis(index)).entries)

    def test_growth_spaces_are_closed_and_nested(self):
        for index, E in enumerate(corpus_endomorphisms()):
            F = growth_filtration(E, corpus_basis(index))
            for lower, upper in zip(F.spaces, F.spaces[1:]):
                assert set(lower.members) < set(upper.members)
            assert F.spaces[-1].fingerprint.dim == E.dim


class TestRandomHomomorphismInvariants:
    """The invariants hold beyond the worked examples."""

    def test_every_multiset_has_a_pure_exponential(self):
        for E in random_homomorphisms():
            assert any(r.k == 0 for r in basis_rates(E).entries)

    def test_growth_spaces_are_subalgebras(self):
        for E in random_homomorphisms():
            F = growth_filtration(E)
            for space in F.spaces:
                span = hstack(space.vectors, E.dim)
                for a in space.vectors:
                    for b in space.vectors:
                        assert in_span(bracket(a, b, E.algebra.sc), span)
            assert F.spaces[-1].fingerprint.dim == E.dim

    def test_square_is_quasi_isometric(self):
        for E in random_homomorphisms():
            verdict = classify(E, power(E, 2))
            assert (verdict.outcome, verdict.r1, verdict.r2) == ("QuasiIsometric", 2, 1)


# ===========================================================================
# Classification
# ===========================================================================

class TestClassifyProperties:
    @pytest.mark.parametrize("index", [0, 1, 2])
    def test_self_and_square(self, index):
        E = corpus_endomorphisms()[index]
        same = classify(E, E)
        assert (same.outcome, same.r1, same.r2) == ("QuasiIsometric", 1, 1)
        squared = classify(E, power(E, 2))
        assert (squared.outcome, squared.r1, squared.r2) == ("QuasiIsometric", 2, 1)

    def test_random_diagonal_pairs_are_symmetric(self):
        rng = random.Random(8)
        g = heisenberg()
        for _ in range(6):
            a = carnot_complete(g, sympy.diag(rng.choice([2, 3, 4]), rng.choice([2, 3, 4])))
            b = carnot_complete(g, sympy.diag(rng.choice([2, 3, 4]), rng.choice([2, 3, 4])))
            forward, backward = classify(a, b), classify(b, a)
            assert forward.outcome == backward.outcome
            assert (forward.r1, forward.r2) == (backward.r2, backward.r1)

    def test_negative_witness_rechecks(self):
        """The witness position needs a different time change than the first class."""
        phi, variant = h3_endo(H3_PHI), h3_endo(H3_VARIANT)
        verdict = classify(phi, variant)
        assert verdict.outcome == "NotQuasiIsometric"
        a = sorted(basis_rates(phi).entries, key=rate_key)
        b = sorted(basis_rates(variant).entries, key=rate_key)
        pos = verdict.witness["position"] - 1
        assert verdict.witness["left"] == rate_to_json(a[pos])
        assert verdict.witness["right"] == rate_to_json(b[pos])

        def ratio(i):
            return power_ratio(a[i].lam.rational_value, b[i].lam.rational_value) * Fraction(a[i].w, b[i].w)

        assert pos > 0
        assert ratio(pos) != ratio(0)
