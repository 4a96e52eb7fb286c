"""
Exact linear algebra over the rationals.

Responsibilities:
  - Column-span bases, ranks and span membership for sympy matrices
  - Coordinate-tail subspaces of a weighted basis and intersections with them
  - Vector weights (smallest grade with a nonzero coordinate)
"""

from sympy import Matrix, Rational, zeros


def columns(mat: Matrix) -> list[Matrix]:
    return [mat[:, j] for j in range(mat.shape[1])]


def hstack(vectors: list[Matrix], n: int) -> Matrix:
    """Columns side by side; an n x 0 matrix when *vectors* is empty."""
    if not vectors:
        return zeros(n, 0)
    return Matrix.hstack(*vectors)


def rank(mat: Matrix) -> int:
    if mat.shape[1] == 0 or mat.shape[0] == 0:
        return 0
    return mat.rank()


def span_basis(vectors: list[Matrix], n: int) -> Matrix:
    """A basis (as columns) of the span of *vectors*."""
    mat = hstack(vectors, n)
    if mat.shape[1] == 0:
        return mat
    return hstack(mat.columnspace(), n)


def nullspace_basis(mat: Matrix) -> Matrix:
    return hstack(mat.nullspace(), mat.shape[1])


def in_span(v: Matrix, basis: Matrix) -> bool:
    if basis.shape[1] == 0:
        return v.is_zero_matrix
    return rank(basis.row_join(v)) == rank(basis)


def solve_in_span(v: Matrix, basis: Matrix) -> Matrix | None:
    """Coefficients c with basis * c = v (free parameters set to zero), or None."""
    if basis.shape[1] == 0:
        return Matrix(0, 1, []) if v.is_zero_matrix else None
    try:
        sol, params = basis.gauss_jordan_solve(v)
    except ValueError:
        return None
    if params.shape[0]:
        sol = sol.subs({p: 0 for p in params})
    return sol


def same_span(a: Matrix, b: Matrix) -> bool:
    ra, rb = rank(a), rank(b)
    if ra != rb:
        return False
    if a.shape[1] == 0 or b.shape[1] == 0:
        return ra == rb == 0
    return rank(a.row_join(b)) == ra


def tail_subspace(weights: tuple[int, ...], j: int) -> Matrix:
    """Coordinate subspace spanned by basis vectors of weight >= j."""
    n = len(weights)
    cols = [Matrix.eye(n)[:, k] for k in range(n) if weights[k] >= j]
    return hstack(cols, n)


def restrict_to_tail(basis: Matrix, weights: tuple[int, ...], j: int) -> Matrix:
    """Basis of span(basis) ∩ tail_subspace(weights, j)."""
    n = basis.shape[0]
    if basis.shape[1] == 0:
        return basis
    low_rows = [k for k in range(n) if weights[k] < j]
    if not low_rows:
        return basis
    constraint = basis.extract(low_rows, list(range(basis.shape[1])))
    kernel = constraint.nullspace()
    return span_basis([basis * k for k in kernel], n)


def vector_weight(v: Matrix, weights: tuple[int, ...]) -> int:
    nonzero = [weights[k] for k in range(len(weights)) if v[k] != 0]
    if not nonzero:
        raise ValueError("the zero vector has no weight")
    return min(nonzero)


def unit_vector(n: int, k: int) -> Matrix:
    v = zeros(n, 1)
    v[k] = Rational(1)
    return v
