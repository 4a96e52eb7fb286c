"""
Graded nilpotent Lie algebras given by structure constants.

Responsibilities:
  - Bilinear bracket on exact vectors
  - Validation: antisymmetry, Jacobi (all triples), triangularity
  - Lower central series, weight vector and grade dimensions
  - Canonical loading: weight-sorted basis order with the permutation recorded
  - Carnot check with a per-grade certificate
  - Ball-box norm max |x_i|^(1/w_i) (numeric)
"""

from __future__ import annotations

import itertools
import logging

import numpy as np
from sympy import Matrix, Rational, zeros

from core.models import (
    CarnotCertificate,
    GradedAlgebra,
    NonNilpotentError,
    StructureConstants,
    Violation,
)
from utils.linalg import columns, hstack, in_span, rank, same_span, span_basis, tail_subspace, unit_vector

logger = logging.getLogger(__name__)

Sparse = dict[int, Rational]


# ---------------------------------------------------------------------------
# Brackets
# ---------------------------------------------------------------------------

def basis_bracket(i: int, j: int, sc: StructureConstants) -> Sparse:
    """[e_i, e_j] from the table, extended antisymmetrically."""
    if i == j:
        return {}
    if (i, j) in sc.table:
        return dict(sc.table[(i, j)])
    if (j, i) in sc.table:
        return {k: -c for k, c in sc.table[(j, i)].items()}
    return {}


def _sparse_bracket(u: Sparse, v: Sparse, sc: StructureConstants) -> Sparse:
    out: Sparse = {}
    for i, a in u.items():
        for j, b in v.items():
            if i == j:
                continue
            for k, c in basis_bracket(i, j, sc).items():
                out[k] = out.get(k, Rational(0)) + a * b * c
    return {k: c for k, c in out.items() if c != 0}


def _to_sparse(x: Matrix) -> Sparse:
    return {k: Rational(x[k]) for k in range(x.shape[0]) if x[k] != 0}


def _to_dense(u: Sparse, n: int) -> Matrix:
    v = zeros(n, 1)
    for k, c in u.items():
        v[k] = c
    return v


def bracket(x: Matrix, y: Matrix, sc: StructureConstants) -> Matrix:
    if x.shape[0] != sc.dim or y.shape[0] != sc.dim:
        raise ValueError(f"vectors must have length {sc.dim}")
    return _to_dense(_sparse_bracket(_to_sparse(x), _to_sparse(y), sc), sc.dim)


def bracket_matrix(sc: StructureConstants, x: Matrix) -> Matrix:
    """Matrix of ad_x : y -> [x, y]."""
    n = sc.dim
    u = _to_sparse(x)
    return hstack([_to_dense(_sparse_bracket(u, {j: Rational(1)}, sc), n) for j in range(n)], n)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def jacobi_violations(sc: StructureConstants) -> list[Violation]:
    found = []
    for i, j, k in itertools.combinations(range(sc.dim), 3):
        ei, ej, ek = {i: Rational(1)}, {j: Rational(1)}, {k: Rational(1)}
        total: Sparse = {}
        for a, b, c in ((ei, ej, ek), (ej, ek, ei), (ek, ei, ej)):
            for idx, coeff in _sparse_bracket(a, _sparse_bracket(b, c, sc), sc).items():
                total[idx] = total.get(idx, Rational(0)) + coeff
        residue = {idx: c for idx, c in total.items() if c != 0}
        if residue:
            terms = ", ".join(f"{c}*e{idx + 1}" for idx, c in sorted(residue.items()))
            found.append(Violation("jacobi", (i + 1, j + 1, k + 1), f"cyclic sum = {terms}"))
    return found


def validate(sc: StructureConstants) -> list[Violation]:
    """Antisymmetry, Jacobi and triangularity violations; empty when all hold."""
    violations: list[Violation] = []
    for (i, j), terms in sorted(sc.table.items()):
        nonzero = {k: c for k, c in terms.items() if c != 0}
        if i == j and nonzero:
            violations.append(Violation("antisymmetry", (i + 1, i + 1), "[e_i, e_i] must vanish"))
        elif i > j and (j, i) in sc.table:
            mirrored = {k: -c for k, c in sc.table[(j, i)].items() if c != 0}
            if mirrored != nonzero:
                violations.append(Violation("antisymmetry", (j + 1, i + 1), "table entries disagree"))
    for i in range(sc.dim):
        for j in range(i + 1, sc.dim):
            for k in basis_bracket(i, j, sc):
                if k <= max(i, j):
                    violations.append(Violation("triangularity", (i + 1, j + 1, k + 1)))
    violations.extend(jacobi_violations(sc))
    return violations


# ---------------------------------------------------------------------------
# Lower central series and weights
# ---------------------------------------------------------------------------

def lower_central_series(sc: StructureConstants) -> list[Matrix]:
    """[gamma_1, gamma_2, ..., 0] as column-basis matrices."""
    n = sc.dim
    series = [Matrix.eye(n)]
    for _ in range(n + 1):
        current = series[-1]
        if current.shape[1] == 0:
            return series
        images = []
        for u in columns(current):
            su = _to_sparse(u)
            for a in range(n):
                images.append(_to_dense(_sparse_bracket({a: Rational(1)}, su, sc), n))
        nxt = span_basis(images, n)
        if rank(nxt) == rank(current):
            raise NonNilpotentError(f"lower central series stabilizes at dimension {rank(current)}")
        series.append(nxt)
    raise NonNilpotentError(f"lower central series does not reach 0 within {n} steps")


def compute_weights(sc: StructureConstants) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(w, grade_dims) with w_k = max{i : e_k in gamma_i}."""
    series = lower_central_series(sc)
    n = sc.dim
    weights = []
    for k in range(n):
        e = unit_vector(n, k)
        weights.append(max(i + 1 for i, gamma in enumerate(series) if in_span(e, gamma)))
    dims = [s.shape[1] for s in series]
    grade_dims = tuple(dims[i] - dims[i + 1] for i in range(len(dims) - 1))
    return tuple(weights), grade_dims


def permute_structure(sc: StructureConstants, order: list[int]) -> StructureConstants:
    """Relabel so that new index a is old index order[a]."""
    new_of = {old: new for new, old in enumerate(order)}
    table = {}
    for (i, j), terms in sc.table.items():
        a, b = new_of[i], new_of[j]
        mapped = {new_of[k]: c for k, c in terms.items() if c != 0}
        if a > b:
            a, b = b, a
            mapped = {k: -c for k, c in mapped.items()}
        if mapped:
            table[(a, b)] = mapped
    return StructureConstants(sc.dim, table)


def load_algebra(
    sc: StructureConstants,
    labels: tuple[str, ...] | None = None,
    name: str = "",
) -> GradedAlgebra:
    """
    Build the graded algebra in canonical order.

    The basis is stably sorted by weight; the permutation (canonical index to
    input index) is kept so reports can use the input labels. Structural
    problems that do not prevent construction are recorded as violations.
    """
    weights, grade_dims = compute_weights(sc)
    order = sorted(range(sc.dim), key=lambda k: weights[k])
    canonical = permute_structure(sc, order)
    sorted_weights = tuple(weights[k] for k in order)
    labels = tuple(labels) if labels else tuple(f"e{k + 1}" for k in range(sc.dim))

    violations = [v for v in validate(canonical) if v.kind != "antisymmetry"]
    series = lower_central_series(canonical)
    for i, gamma in enumerate(series[:-1]):
        if not same_span(gamma, tail_subspace(sorted_weights, i + 1)):
            violations.append(Violation("filtration", (i + 1,), "basis is not adapted to the lower central series"))
    for v in violations:
        if v.kind == "jacobi":
            logger.warning("Algebra %s fails Jacobi at %s (%s)", name or "?", v.indices, v.detail)

    if order != list(range(sc.dim)):
        logger.info("Reordered basis of %s by weight: %s", name or "algebra", [labels[k] for k in order])

    return GradedAlgebra(
        sc=canonical,
        weights=sorted_weights,
        grade_dims=grade_dims,
        nilpotency_class=len(grade_dims),
        labels=tuple(labels[k] for k in order),
        permutation=tuple(order),
        name=name,
        violations=violations,
    )


# ---------------------------------------------------------------------------
# Carnot structure
# ---------------------------------------------------------------------------

def grade_indices(g: GradedAlgebra, j: int) -> list[int]:
    return [k for k, w in enumerate(g.weights) if w == j]


def is_carnot(g: GradedAlgebra) -> CarnotCertificate:
    """[V_1, V_j] = V_{j+1} for j < r, [V_1, V_r] = 0, and [V_i, V_j] inside V_{i+j}."""
    n, r = g.dim, g.nilpotency_class
    failures: list[tuple[int, str]] = []
    v1 = grade_indices(g, 1)
    for j in range(1, r + 1):
        images = [
            _to_dense(_sparse_bracket({a: Rational(1)}, {b: Rational(1)}, g.sc), n)
            for a in v1
            for b in grade_indices(g, j)
        ]
        target = hstack([unit_vector(n, k) for k in grade_indices(g, j + 1)], n)
        if not same_span(span_basis(images, n), target):
            failures.append((j + 1, f"[V_1, V_{j}] does not span V_{j + 1}"))
    for i in range(1, r + 1):
        for j in range(i, r + 1):
            target = hstack([unit_vector(n, k) for k in grade_indices(g, i + j)], n)
            for a in grade_indices(g, i):
                for b in grade_indices(g, j):
                    image = _to_dense(basis_bracket(a, b, g.sc), n)
                    if not in_span(image, target):
                        failures.append((i + j, f"[{g.labels[a]}, {g.labels[b]}] leaves V_{i + j}"))
    return CarnotCertificate(is_carnot=not failures, failures=failures)


# ---------------------------------------------------------------------------
# Ball-box norm
# ---------------------------------------------------------------------------

def nilpotent_norm(x, w) -> float:
    """max_i |x_i|^(1/w_i)."""
    mags = np.abs(np.asarray(x, dtype=float))
    weights = np.asarray(w, dtype=float)
    if mags.size == 0:
        return 0.0
    return float(np.max(mags ** (1.0 / weights)))


def log_nilpotent_norm(log_mags, w) -> float:
    """Log of the ball-box norm from log |x_i| (entries of -inf are zero coordinates)."""
    log_mags = np.asarray(log_mags, dtype=float)
    weights = np.asarray(w, dtype=float)
    finite = np.isfinite(log_mags)
    if not finite.any():
        return float("-inf")
    return float(np.max(log_mags[finite] / weights[finite]))
