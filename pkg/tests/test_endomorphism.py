"""Tests for core/endomorphism.py"""

import logging
import random
import sys
from pathlib import Path

import pytest
import sympy
from sympy import Matrix, Poly

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.endomorphism import (
    carnot_complete,
    compose,
    determinant,
    has_unit_circle_root,
    is_homomorphism,
    is_injective,
    is_nonsurjective,
    is_unipotent_free,
    make_endomorphism,
    power,
    restrict_to_v1,
    tree_valence,
    weakly_preserves_grading,
)
from core.lie_algebra import load_algebra
from core.models import InconsistentExtensionError, NonIntegerIndexError
from tests.corpus import (
    H3_PHI,
    H3_THETA,
    abelian,
    h3_cubed,
    h3_endo,
    heisenberg,
    heisenberg_shear,
    structure,
)

X = sympy.Symbol("x")


# ===========================================================================
# Construction and structural checks
# ===========================================================================

class TestStructure:
    def test_wrong_shape(self):
        with pytest.raises(ValueError):
            make_endomorphism(heisenberg(), [[1, 0], [0, 1]])

    def test_shear_is_homomorphism(self):
        assert is_homomorphism(heisenberg_shear()).ok

    def test_non_homomorphism_witness(self):
        """z -> z while [x, y] -> [2x, 2y] = 4z fails on the pair (1, 2)."""
        E = make_endomorphism(heisenberg(), sympy.diag(2, 2, 1))
        check = is_homomorphism(E)
        assert not check.ok
        assert check.witness == (1, 2)

    def test_grading(self):
        assert weakly_preserves_grading(heisenberg_shear())
        bad = make_endomorphism(heisenberg(), [[1, 0, 1], [0, 1, 0], [0, 0, 1]])
        assert not weakly_preserves_grading(bad)

    def test_injective_and_nonsurjective(self):
        E = heisenberg_shear()
        assert is_injective(E)
        assert is_nonsurjective(E)
        assert determinant(E) == 16

    def test_identity_is_surjective(self):
        E = make_endomorphism(heisenberg(), sympy.eye(3))
        assert is_injective(E)
        assert not is_nonsurjective(E)

    def test_singular(self):
        E = make_endomorphism(abelian(2), [[1, 2], [2, 4]])
        assert not is_injective(E)

    def test_checks_return_plain_bools(self):
        E = heisenberg_shear()
        assert type(is_nonsurjective(E)) is bool
        assert type(is_injective(E)) is bool
        assert type(is_nonsurjective(make_endomorphism(heisenberg(), sympy.eye(3)))) is bool


# ===========================================================================
# Unipotent-free
# ===========================================================================

class TestUnipotentFree:
    @pytest.mark.parametrize("expr, expected", [
        (X ** 2 - 3 * X + 1, False),             # (3 +- sqrt 5)/2
        (X ** 2 + X + 1, True),                  # cube roots of unity
        (X - 1, True),
        (X + 1, True),
        (X ** 2 + 1, True),
        (X ** 2 - 2, False),
        (X ** 10 + X ** 9 - X ** 7 - X ** 6 - X ** 5 - X ** 4 - X ** 3 + X + 1, True),
        (X ** 4 - 4 * X ** 3 + 2 * X ** 2 - 4 * X + 1, True),
    ])
    def test_unit_circle_roots(self, expr, expected):
        assert has_unit_circle_root(Poly(expr, X)) is expected

    def test_shear(self):
        assert is_unipotent_free(heisenberg_shear())

    def test_rotation_on_heisenberg(self):
        """A rotation of V_1 has eigenvalues +-i and acts trivially on the center."""
        E = carnot_complete(heisenberg(), [[0, -1], [1, 0]])
        assert not is_unipotent_free(E)

    def test_hyperbolic_on_plane(self):
        E = make_endomorphism(abelian(2), [[2, 1], [1, 1]])
        assert is_unipotent_free(E)


# ===========================================================================
# Carnot completion
# ===========================================================================

class TestCarnotCompletion:
    def test_center_scales_by_determinant(self):
        """On the Heisenberg algebra phi(z) = det(A) z."""
        rng = random.Random(5)
        g = heisenberg()
        for _ in range(50):
            A = Matrix(2, 2, [rng.randint(-4, 4) for _ in range(4)])
            E = carnot_complete(g, A)
            assert E.matrix[2, 2] == A.det()
            assert is_homomorphism(E).ok

    def test_identity(self):
        E = carnot_complete(h3_cubed(), sympy.eye(6))
        assert E.matrix == sympy.eye(9)

    def test_shear_from_full_images(self):
        """[[3,-1],[1,1],[1,0]] completes to z -> 4z."""
        E = carnot_complete(heisenberg(), [[3, -1], [1, 1], [1, 0]])
        assert E.matrix == heisenberg_shear().matrix

    def test_restrict_then_complete(self):
        for E in (heisenberg_shear(), h3_endo(H3_PHI), h3_endo(H3_THETA)):
            assert carnot_complete(E.algebra, restrict_to_v1(E)).matrix == E.matrix

    def test_inconsistent_extension(self):
        """[x, y] = z and [x, w] = z: swapping x and y forces phi(z) = -z and phi(z) = 0."""
        g = load_algebra(structure(4, [(1, 2, 4), (1, 3, 4)]), ("x", "y", "w", "z"))
        with pytest.raises(InconsistentExtensionError):
            carnot_complete(g, [[0, 1, 0], [1, 0, 0], [0, 0, 1]])

    def test_bad_shape(self):
        with pytest.raises(ValueError):
            carnot_complete(heisenberg(), [[1, 0, 0]])


# ===========================================================================
# Tree valence, composition, powers
# ===========================================================================

class TestValence:
    def test_shear(self):
        assert tree_valence(heisenberg_shear()) == 16

    @pytest.mark.parametrize("exponents", [H3_PHI, H3_THETA])
    def test_h3_cubed(self, exponents):
        assert tree_valence(h3_endo(exponents)) == 2 ** 92

    def test_identity_warns(self, caplog):
        with caplog.at_level(logging.WARNING):
            assert tree_valence(make_endomorphism(heisenberg(), sympy.eye(3))) == 1
        assert "surjective" in caplog.text

    def test_zero_determinant(self):
        with pytest.raises(NonIntegerIndexError):
            tree_valence(make_endomorphism(abelian(2), [[1, 1], [1, 1]]))

    def test_fractional_determinant(self):
        with pytest.raises(NonIntegerIndexError):
            tree_valence(make_endomorphism(abelian(1), [[sympy.Rational(1, 2)]]))


class TestPowers:
    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_power_multiplies_valence(self, k):
        E = heisenberg_shear()
        Ek = power(E, k)
        assert Ek.matrix == E.matrix ** k
        assert tree_valence(Ek) == 16 ** k
        assert is_homomorphism(Ek).ok

    def test_compose_matches_power(self):
        E = heisenberg_shear()
        assert compose(E, E).matrix == power(E, 2).matrix

    def test_power_must_be_positive(self):
        with pytest.raises(ValueError):
            power(heisenberg_shear(), 0)
