"""Tests for core/jordan.py"""

import random
import sys
from pathlib import Path

import pytest
import sympy
from sympy import Matrix, Poly

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.jordan import (
    absolute_jordan_form,
    block_sizes_from_nullities,
    char_poly,
    jordan_structure,
    nullity_chain,
)
from core.models import UnsupportedEigenvalueError
from tests.corpus import JORDAN_EXAMPLE, heisenberg_shear

X = sympy.Symbol("x")


def block_multiset(data):
    return sorted((b.kind, float(b.modulus), b.size) for b in data.blocks)


def random_jordan(rng: random.Random, n: int) -> Matrix:
    """Upper Jordan matrix with small integer eigenvalues and random block sizes."""
    J = sympy.zeros(n, n)
    i = 0
    while i < n:
        size = rng.randint(1, n - i)
        value = rng.choice([-3, -2, 2, 3, 5])
        for k in range(i, i + size):
            J[k, k] = value
            if k + 1 < i + size:
                J[k, k + 1] = 1
        i += size
    return J


# ===========================================================================
# Characteristic polynomial
# ===========================================================================

class TestCharPoly:
    def test_shear(self):
        assert char_poly(heisenberg_shear().matrix) == Poly((X - 2) ** 2 * (X - 4), X)

    def test_six_by_six(self):
        assert char_poly(Matrix(JORDAN_EXAMPLE)) == Poly((X - 2) ** 3 * (X - 3) ** 3, X)

    def test_not_square(self):
        with pytest.raises(ValueError):
            char_poly(sympy.zeros(2, 3))


# ===========================================================================
# Block sizes
# ===========================================================================

class TestBlocks:
    def test_nullity_chain_to_sizes(self):
        """nu = (0, 2, 3) means one block of size 1 and one of size 2."""
        assert block_sizes_from_nullities((0, 2, 3)) == {1: 1, 2: 1}
        assert block_sizes_from_nullities((0, 1, 2, 3)) == {3: 1}

    def test_shear_blocks(self):
        data = jordan_structure(heisenberg_shear().matrix)
        assert block_multiset(data) == [("real", 2.0, 2), ("real", 4.0, 1)]

    def test_six_by_six_blocks(self):
        data = jordan_structure(Matrix(JORDAN_EXAMPLE))
        assert block_multiset(data) == [("real", 2.0, 1), ("real", 2.0, 2), ("real", 3.0, 3)]
        assert [(float(m), s) for m, s in absolute_jordan_form(data)] == [(2.0, 1), (2.0, 2), (3.0, 3)]

    def test_nullity_chain_of_six_by_six(self):
        M = Matrix(JORDAN_EXAMPLE)
        assert nullity_chain(M, Poly(X - 2, X), 3) == (0, 2, 3, 3)
        assert nullity_chain(M, Poly(X - 3, X), 3) == (0, 1, 2, 3)

    def test_negative_eigenvalue_modulus(self):
        data = jordan_structure(sympy.diag(-3, 2))
        assert sorted(float(b.modulus) for b in data.blocks) == [2.0, 3.0]
        assert any(b.value == -3 for b in data.blocks)

    def test_irrational_real_pair(self):
        """[[2,1],[1,1]] has eigenvalues (3 +- sqrt 5)/2 with product 1."""
        data = jordan_structure(Matrix([[2, 1], [1, 1]]))
        moduli = sorted(float(b.modulus) for b in data.blocks)
        assert moduli[0] * moduli[1] == pytest.approx(1.0)
        assert moduli[1] == pytest.approx((3 + 5 ** 0.5) / 2)


class TestComplexEigenvalues:
    def test_scaled_rotation(self):
        data = jordan_structure(Matrix([[0, -2], [2, 0]]))
        assert len(data.blocks) == 1
        block = data.blocks[0]
        assert block.kind == "complex_pair"
        assert block.modulus == 2
        assert block.re == 0 and block.im == 2
        assert block.dimension == 2
        assert [(float(m), s) for m, s in absolute_jordan_form(data)] == [(2.0, 1), (2.0, 1)]

    def test_complex_jordan_block(self):
        """A 2x2 Jordan block over 1 + 2i has size 2 and modulus sqrt 5."""
        R = Matrix([[1, -2], [2, 1]])
        M = sympy.zeros(4, 4)
        M[:2, :2] = R
        M[2:, 2:] = R
        M[:2, 2:] = sympy.eye(2)
        data = jordan_structure(M)
        assert [(b.kind, b.size) for b in data.blocks] == [("complex_pair", 2)]
        assert data.blocks[0].modulus.pow(2) == 5

    def test_degree_limit(self, monkeypatch):
        monkeypatch.setattr("core.jordan.MAX_ALGEBRAIC_DEGREE", 1)
        with pytest.raises(UnsupportedEigenvalueError):
            jordan_structure(Matrix([[0, -2], [2, 0]]))


# ===========================================================================
# Similarity invariance
# ===========================================================================

class TestSimilarity:
    def test_conjugates_share_absolute_form(self):
        """P^-1 J P has the absolute Jordan form of J for 100 random pairs."""
        rng = random.Random(1234)
        for _ in range(100):
            n = rng.randint(1, 6)
            J = random_jordan(rng, n)
            while True:
                P = Matrix(n, n, [rng.randint(-2, 2) for _ in range(n * n)])
                if P.det() != 0:
                    break
            expected = absolute_jordan_form(jordan_structure(J))
            got = absolute_jordan_form(jordan_structure(P.inv() * J * P))
            assert [(m, s) for m, s in got] == [(m, s) for m, s in expected]

    def test_transpose_has_same_blocks(self):
        M = Matrix(JORDAN_EXAMPLE)
        assert block_multiset(jordan_structure(M)) == block_multiset(jordan_structure(M.T))
