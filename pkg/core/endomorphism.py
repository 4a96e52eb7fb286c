"""
Endomorphisms of graded Lie algebras.

Responsibilities:
  - Construction from a matrix (columns are images of basis vectors)
  - Homomorphism, grading, injectivity and non-surjectivity checks
  - Unipotent-free decision on the characteristic polynomial
  - Carnot completion of a V_1 action
  - Tree valence |det M|, composition and powers
"""

from __future__ import annotations

import logging

import sympy
from sympy import Matrix, Poly, Rational

from core.lie_algebra import bracket, grade_indices
from core.models import (
    CheckResult,
    Endomorphism,
    GradedAlgebra,
    InconsistentExtensionError,
    NonIntegerIndexError,
)
from utils.linalg import hstack, in_span, solve_in_span, tail_subspace, unit_vector

logger = logging.getLogger(__name__)

_X = sympy.Symbol("x")


def make_endomorphism(algebra: GradedAlgebra, matrix, name: str = "") -> Endomorphism:
    mat = Matrix(matrix).applyfunc(Rational)
    n = algebra.dim
    if mat.shape != (n, n):
        raise ValueError(f"matrix must be {n}x{n}, got {mat.shape[0]}x{mat.shape[1]}")
    return Endomorphism(algebra=algebra, matrix=mat, name=name)


# ---------------------------------------------------------------------------
# Structural checks
# ---------------------------------------------------------------------------

def is_homomorphism(E: Endomorphism) -> CheckResult:
    """M[e_i, e_j] = [M e_i, M e_j] for all i < j; witness is the first failing 1-based pair."""
    sc, M, n = E.algebra.sc, E.matrix, E.dim
    images = [M[:, k] for k in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            lhs = M * bracket(unit_vector(n, i), unit_vector(n, j), sc)
            rhs = bracket(images[i], images[j], sc)
            if lhs != rhs:
                return CheckResult(False, (i + 1, j + 1))
    return CheckResult(True)


def weakly_preserves_grading(E: Endomorphism) -> bool:
    weights = E.algebra.weights
    for i in range(1, max(weights) + 1):
        tail = tail_subspace(weights, i)
        for k in range(E.dim):
            if weights[k] >= i and not in_span(E.matrix[:, k], tail):
                return False
    return True


def determinant(E: Endomorphism) -> Rational:
    return Rational(E.matrix.det())


def is_injective(E: Endomorphism) -> bool:
    return bool(determinant(E) != 0)


def is_nonsurjective(E: Endomorphism) -> bool:
    """|det M| > 1 for an integer matrix (the lattice index exceeds one)."""
    if any(not entry.is_integer for entry in E.matrix):
        return False
    return bool(abs(determinant(E)) > 1)


# ---------------------------------------------------------------------------
# Unipotent-free decision
# ---------------------------------------------------------------------------

def _reciprocal_trace_poly(q: Poly) -> Poly:
    """h with q(x) = x^m h(x + 1/x) for a palindromic q of degree 2m."""
    coeffs = list(reversed(q.all_coeffs()))          # c_0 .. c_2m
    m = len(coeffs) // 2
    y = sympy.Symbol("y")
    chebyshev = [sympy.Integer(2), y]                # x^j + x^-j as polynomials in y
    for _ in range(2, m + 1):
        chebyshev.append(sympy.expand(y * chebyshev[-1] - chebyshev[-2]))
    h = coeffs[m] + sum(coeffs[m + j] * chebyshev[j] for j in range(1, m + 1))
    return Poly(sympy.expand(h), y)


def has_unit_circle_root(p: Poly) -> bool:
    for q, _ in p.factor_list()[1]:
        if q.eval(1) == 0 or q.eval(-1) == 0:
            return True
        reversed_q = Poly(list(reversed(q.all_coeffs())), q.gens[0])
        g = sympy.gcd(q, reversed_q)
        if g.degree() < 1 or q.degree() % 2:
            continue
        if _reciprocal_trace_poly(q).count_roots(-2, 2) > 0:
            return True
    return False


def is_unipotent_free(E: Endomorphism) -> bool:
    p = Poly(E.matrix.charpoly(_X).as_expr(), _X)
    return not has_unit_circle_root(p)


# ---------------------------------------------------------------------------
# Carnot completion
# ---------------------------------------------------------------------------

def restrict_to_v1(E: Endomorphism) -> Matrix:
    """Columns of M for the grade-one basis vectors (full coordinates)."""
    return hstack([E.matrix[:, k] for k in grade_indices(E.algebra, 1)], E.dim)


def carnot_complete(g: GradedAlgebra, base_action, name: str = "") -> Endomorphism:
    """
    Extend an action on V_1 to all of g through phi[x, y] = [phi x, phi y].

    *base_action* is d1 x d1 (images inside V_1) or n x d1 (full images,
    allowing components in higher grades).
    """
    n, sc = g.dim, g.sc
    v1 = grade_indices(g, 1)
    base = Matrix(base_action).applyfunc(Rational)
    if base.shape == (len(v1), len(v1)):
        full = sympy.zeros(n, len(v1))
        for row, k in enumerate(v1):
            full[k, :] = base[row, :]
        base = full
    if base.shape != (n, len(v1)):
        raise ValueError(f"base_action must be {len(v1)}x{len(v1)} or {n}x{len(v1)}, got {base.shape}")

    images: dict[int, Matrix] = {k: base[:, col] for col, k in enumerate(v1)}
    for j in range(2, g.nilpotency_class + 1):
        pairs = [(a, b) for a in v1 for b in grade_indices(g, j - 1)]
        spans = [bracket(unit_vector(n, a), unit_vector(n, b), sc) for a, b in pairs]
        lifted = [bracket(images[a], images[b], sc) for a, b in pairs]
        span_mat = hstack(spans, n)
        for k in grade_indices(g, j):
            coeffs = solve_in_span(unit_vector(n, k), span_mat)
            if coeffs is None:
                raise InconsistentExtensionError(
                    f"{g.labels[k]} is not a combination of brackets [V_1, V_{j - 1}]"
                )
            images[k] = sum((coeffs[i] * lifted[i] for i in range(len(lifted))), sympy.zeros(n, 1))
        partial = hstack([images.get(k, sympy.zeros(n, 1)) for k in range(n)], n)
        for (a, b), span_vec, lifted_vec in zip(pairs, spans, lifted):
            if partial * span_vec != lifted_vec:
                raise InconsistentExtensionError(
                    f"phi[{g.labels[a]}, {g.labels[b]}] has two different values"
                )

    E = make_endomorphism(g, hstack([images[k] for k in range(n)], n), name=name)
    check = is_homomorphism(E)
    if not check.ok:
        raise InconsistentExtensionError(f"completed map is not a homomorphism at {check.witness}")
    logger.info("Completed %s from its V_1 action (det = %s)", name or "endomorphism", determinant(E))
    return E


# ---------------------------------------------------------------------------
# Tree valence and composition
# ---------------------------------------------------------------------------

def tree_valence(E: Endomorphism) -> int:
    """The index [N : phi(N)] = |det M|."""
    d = abs(determinant(E))
    if d == 0:
        raise NonIntegerIndexError("det M = 0: the image has infinite index")
    if not d.is_integer:
        raise NonIntegerIndexError(f"|det M| = {d} is not an integer")
    if d == 1:
        logger.warning("Endomorphism %s is surjective on the lattice (|det| = 1)", E.name or "?")
    return int(d)


def compose(E1: Endomorphism, E2: Endomorphism) -> Endomorphism:
    """E1 after E2."""
    if E1.algebra is not E2.algebra and E1.algebra.sc != E2.algebra.sc:
        raise ValueError("endomorphisms act on different algebras")
    return Endomorphism(E1.algebra, E1.matrix * E2.matrix, name=f"{E1.name}*{E2.name}".strip("*"))


def power(E: Endomorphism, k: int) -> Endomorphism:
    if k < 1:
        raise ValueError(f"power must be positive, got {k}")
    return Endomorphism(E.algebra, E.matrix ** k, name=f"{E.name}^{k}" if E.name else "")
