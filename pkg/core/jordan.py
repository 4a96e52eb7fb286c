"""
Jordan data over number fields.

Responsibilities:
  - Characteristic polynomial with integer coefficients
  - Block sizes per irreducible factor from rational nullity chains
  - Eigenvalues as AlgebraicReal (real roots) or (re, im) pairs (complex roots)
  - Absolute Jordan form in canonical order
"""

from __future__ import annotations

import logging

import sympy
from sympy import Matrix, Poly

from core.models import FactorData, JordanBlockData, RealJordanData, UnsupportedEigenvalueError
from core.scalar import AlgebraicReal, integer_poly
from utils.config import MAX_ALGEBRAIC_DEGREE, ROOT_PRECISION
from utils.linalg import rank

logger = logging.getLogger(__name__)

_X = sympy.Symbol("x")


def char_poly(M: Matrix) -> Poly:
    """det(xI - M) scaled to a primitive integer polynomial (monic for integer M)."""
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got {M.shape}")
    return integer_poly(Poly(M.charpoly(_X).as_expr(), _X))


def poly_at_matrix(q: Poly, M: Matrix) -> Matrix:
    """q(M) by Horner's rule."""
    n = M.shape[0]
    result = sympy.zeros(n, n)
    for c in q.all_coeffs():
        result = result * M + c * sympy.eye(n)
    return result


def nullity_chain(M: Matrix, q: Poly, multiplicity: int) -> tuple[int, ...]:
    """nu_k = dim ker q(M)^k / deg q for k = 0..multiplicity."""
    n, d = M.shape[0], q.degree()
    N = poly_at_matrix(q, M)
    power = sympy.eye(n)
    chain = [0]
    for _ in range(multiplicity):
        power = power * N
        nullity = n - rank(power)
        if nullity % d:
            raise ArithmeticError(f"nullity {nullity} is not a multiple of deg q = {d}")
        chain.append(nullity // d)
    return tuple(chain)


def block_sizes_from_nullities(chain: tuple[int, ...]) -> dict[int, int]:
    """size -> count, from #(blocks of size >= k) = nu_k - nu_{k-1}."""
    at_least = [chain[k] - chain[k - 1] for k in range(1, len(chain))] + [0]
    return {k + 1: at_least[k] - at_least[k + 1] for k in range(len(chain) - 1) if at_least[k] - at_least[k + 1]}


def _roots(q: Poly) -> list[dict]:
    """Per root: modulus, plus value (real) or re/im (complex, im > 0 only)."""
    if q.degree() > MAX_ALGEBRAIC_DEGREE:
        raise UnsupportedEigenvalueError(
            f"eigenvalue of degree {q.degree()} exceeds the supported bound {MAX_ALGEBRAIC_DEGREE}"
        )
    if q.degree() == 1:
        c1, c0 = q.all_coeffs()
        value = AlgebraicReal.from_rational(sympy.Rational(-c0, c1))
        return [{"kind": "real", "value": value, "modulus": abs(value)}]

    roots = Poly(q.as_expr(), _X).all_roots()
    numeric = [complex(r.evalf(ROOT_PRECISION)) for r in roots]
    out = []
    for idx, r in enumerate(roots):
        if r.is_real:
            value = AlgebraicReal.from_expr(r)
            out.append({"kind": "real", "value": value, "modulus": abs(value)})
            continue
        partner = min(
            (j for j in range(len(roots)) if j != idx),
            key=lambda j: abs(numeric[j] - numeric[idx].conjugate()),
        )
        conj = roots[partner]
        modulus = AlgebraicReal.from_expr(sympy.expand(r * conj)).sqrt()
        entry = {"kind": "complex", "modulus": modulus, "upper": numeric[idx].imag > 0}
        if entry["upper"]:
            entry["re"] = AlgebraicReal.from_expr((r + conj) / 2)
            entry["im"] = AlgebraicReal.from_expr((r - conj) / (2 * sympy.I))
        out.append(entry)
    return out


def jordan_structure(M: Matrix) -> RealJordanData:
    """Block data for every eigenvalue; the basis is filled in by core.pajf."""
    M = Matrix(M)
    p = char_poly(M)
    blocks: list[JordanBlockData] = []
    factors: list[FactorData] = []
    for q, mult in p.factor_list()[1]:
        q = integer_poly(q)
        chain = nullity_chain(M, q, mult)
        sizes = block_sizes_from_nullities(chain)
        roots = _roots(q)
        factors.append(FactorData(q, mult, chain, sizes, [r["modulus"] for r in roots]))
        for root in roots:
            for size, count in sorted(sizes.items()):
                for _ in range(count):
                    if root["kind"] == "real":
                        blocks.append(JordanBlockData("real", size, root["modulus"], value=root["value"]))
                    elif root["upper"]:
                        blocks.append(
                            JordanBlockData("complex_pair", size, root["modulus"], re=root["re"], im=root["im"])
                        )
        logger.debug("Factor %s: nullities %s, blocks %s", q.as_expr(), chain, sizes)
    logger.info("Jordan structure: %d blocks over %d irreducible factors", len(blocks), len(factors))
    return RealJordanData(blocks=blocks, char_poly=p, factors=factors)


def absolute_jordan_form(data: RealJordanData) -> list[tuple[AlgebraicReal, int]]:
    """(modulus, size) per complex Jordan block, sorted by modulus then size."""
    entries = []
    for block in data.blocks:
        copies = 2 if block.kind == "complex_pair" else 1
        entries.extend([(block.modulus, block.size)] * copies)
    return sorted(entries, key=lambda e: (e[0], e[1]))
