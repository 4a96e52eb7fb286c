"""
Growth rates, divergence multisets and growth spaces.

Responsibilities:
  - Exact order on classes [(t^k lam^t)^(1/w)]
  - Per-slot rates along weighted Jordan chains (forward / backward)
  - Divergence multisets and their comparison up to a common time rescaling
  - Growth-space filtration with exact bracket-closure checks
  - Isomorphism fingerprints of subalgebras and filtration comparison
"""

from __future__ import annotations

import functools
import logging
from fractions import Fraction
from math import gcd

from sympy import Matrix, Rational

from core.lie_algebra import bracket, bracket_matrix, lower_central_series
from core.models import (
    AdaptedBasis,
    DivergenceMultiset,
    Endomorphism,
    Fingerprint,
    GrowthFiltration,
    GrowthRate,
    GrowthSpace,
    MultisetComparison,
    Ordering,
    StructureConstants,
    SubalgebraClosureError,
    UnsupportedEigenvalueError,
)
from core.pajf import adapted_jordan_basis
from core.scalar import ANY_RATIO, AlgebraicReal, alg_pow_compare, power_ratio
from utils.config import DIRECTIONS, POWER_BOUND, RATE_DIRECTION
from utils.linalg import hstack, in_span, rank, solve_in_span, span_basis, unit_vector

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Rate order
# ---------------------------------------------------------------------------

def rate_compare(r1: GrowthRate, r2: GrowthRate) -> Ordering:
    """Compare exponential bases exactly, then polynomial exponents k/w."""
    base = alg_pow_compare(r1.lam, r1.w, r2.lam, r2.w)
    if base is not Ordering.EQ:
        return base
    a, b = Fraction(r1.k, r1.w), Fraction(r2.k, r2.w)
    return Ordering.LT if a < b else Ordering.GT if a > b else Ordering.EQ


def rate_equal(r1: GrowthRate, r2: GrowthRate) -> bool:
    return rate_compare(r1, r2) is Ordering.EQ


rate_key = functools.cmp_to_key(lambda a, b: int(rate_compare(a, b)))


def rate_max(rates: list[GrowthRate]) -> GrowthRate:
    best = rates[0]
    for r in rates[1:]:
        if rate_compare(r, best) is Ordering.GT:
            best = r
    return best


def rescale(rate: GrowthRate, p: int, q: int) -> GrowthRate:
    """Time change t -> (p/q) t: the base is raised to p/q, k/w is unchanged."""
    return GrowthRate(rate.lam.pow(p), rate.k * q, rate.w * q)


def rate_to_json(rate: GrowthRate) -> dict:
    return {"lambda": rate.lam.to_json(), "k": rate.k, "w": rate.w}


def rate_label(rate: GrowthRate) -> str:
    core = f"{rate.lam}^t" if rate.k == 0 else f"t^{rate.k}*{rate.lam}^t"
    return core if rate.w == 1 else f"({core})^(1/{rate.w})"


# ---------------------------------------------------------------------------
# Rates along chains
# ---------------------------------------------------------------------------

def _direction_modulus(modulus: AlgebraicReal, direction: str) -> AlgebraicReal:
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {sorted(DIRECTIONS)}, got {direction!r}")
    return modulus if direction == "forward" else modulus.reciprocal()


def slot_rates(modulus: AlgebraicReal, weights: tuple[int, ...], direction: str = "forward") -> list[GrowthRate]:
    """
    Rate of each slot of a chain listed top -> head: slot p reaches every
    slot q >= p with polynomial offset q - p at the weight of slot q.
    """
    lam = _direction_modulus(modulus, direction)
    return [
        rate_max([GrowthRate(lam, q - p, weights[q]) for q in range(p, len(weights))])
        for p in range(len(weights))
    ]


def basis_rates(source, direction: str | None = None) -> DivergenceMultiset:
    """The divergence multiset D, one class per complex Jordan slot."""
    direction = direction or RATE_DIRECTION
    basis = source if isinstance(source, AdaptedBasis) else adapted_jordan_basis(source)
    entries: list[GrowthRate] = []
    for block in basis.blocks:
        entries.extend(slot_rates(block.modulus, block.weight_sig, direction))
    return DivergenceMultiset(entries=sorted(entries, key=rate_key), direction=direction)


def chain_vector_rates(basis: AdaptedBasis, direction: str | None = None) -> list[tuple[Matrix, GrowthRate]]:
    """(vector, rate) for every chain vector; needs one modulus per factor."""
    direction = direction or RATE_DIRECTION
    out = []
    for chain in basis.chains:
        if chain.modulus is None:
            raise UnsupportedEigenvalueError(
                f"roots of {chain.factor} have different moduli; no rational spanning vectors exist"
            )
        out.extend(zip(chain.vectors, slot_rates(chain.modulus, chain.weights, direction)))
    return out


# ---------------------------------------------------------------------------
# Multiset comparison up to a power
# ---------------------------------------------------------------------------

def multiset_equal_up_to_power(
    D1: DivergenceMultiset,
    D2: DivergenceMultiset,
    bound: int | None = None,
) -> MultisetComparison:
    """
    Find s = p/q with D2 = D1 after the time change t -> s t.

    A time change preserves the order of classes and every k/w, so sorted
    entries must pair up; the bases then decide s (exactly when rational).
    """
    bound = bound or POWER_BOUND
    if D1.direction != D2.direction:
        raise ValueError("divergence multisets use different directions")
    a, b = sorted(D1.entries, key=rate_key), sorted(D2.entries, key=rate_key)
    if len(a) != len(b):
        return MultisetComparison("NotEqual", witness={"reason": "size", "sizes": [len(a), len(b)]})
    for i, (x, y) in enumerate(zip(a, b)):
        if Fraction(x.k, x.w) != Fraction(y.k, y.w):
            return MultisetComparison("NotEqual", witness=_pair_witness("polynomial", i, x, y))

    one = AlgebraicReal.from_rational(1)
    for i, (x, y) in enumerate(zip(a, b)):
        if alg_pow_compare(x.lam, x.w, one, 1) is not alg_pow_compare(y.lam, y.w, one, 1):
            return MultisetComparison("NotEqual", witness=_pair_witness("expansion", i, x, y))

    if all(x.lam.is_rational and y.lam.is_rational for x, y in zip(a, b)):
        s: Fraction | None = None
        for i, (x, y) in enumerate(zip(a, b)):
            r = power_ratio(x.lam.rational_value, y.lam.rational_value)
            if r == ANY_RATIO:
                continue
            if r is not None:
                r = r * Fraction(x.w, y.w)
            if r is None or (s is not None and r != s):
                return MultisetComparison("NotEqual", witness=_pair_witness("base", i, x, y))
            s = r
        return MultisetComparison("Equal", s=s or Fraction(1))

    candidates = sorted(
        {Fraction(p, q) for p in range(1, bound + 1) for q in range(1, bound + 1) if gcd(p, q) == 1},
        key=lambda f: (f != 1, f.numerator + f.denominator, f),
    )
    for s in candidates:
        if all(
            alg_pow_compare(x.lam.pow(s.numerator), x.w * s.denominator, y.lam, y.w) is Ordering.EQ
            for x, y in zip(a, b)
        ):
            return MultisetComparison("Equal", s=s)
    return MultisetComparison("Undecided", witness={"bound": bound})


def _pair_witness(reason: str, i: int, x: GrowthRate, y: GrowthRate) -> dict:
    return {"reason": reason, "position": i + 1, "left": rate_to_json(x), "right": rate_to_json(y),
            "left_label": rate_label(x), "right_label": rate_label(y)}


# ---------------------------------------------------------------------------
# Fingerprints
# ---------------------------------------------------------------------------

def induced_structure(sc: StructureConstants, span: Matrix) -> StructureConstants:
    """Structure constants of a subalgebra in the basis given by the columns of *span*."""
    d = span.shape[1]
    table = {}
    for a in range(d):
        for b in range(a + 1, d):
            image = bracket(span[:, a], span[:, b], sc)
            coeffs = solve_in_span(image, span)
            if coeffs is None:
                raise SubalgebraClosureError(f"bracket of spanning vectors {a + 1}, {b + 1} leaves the span")
            terms = {k: Rational(coeffs[k]) for k in range(d) if coeffs[k] != 0}
            if terms:
                table[(a, b)] = terms
    return StructureConstants(d, table)


def fingerprint(sc: StructureConstants, span: Matrix | None = None) -> Fingerprint:
    """(dim, lcs quotient dims, lcs dims, center dim, abelianization dim)."""
    sub = sc if span is None else induced_structure(sc, span)
    d = sub.dim
    if d == 0:
        return Fingerprint(0, (), (0,), 0, 0)
    lcs_dims = tuple(g.shape[1] for g in lower_central_series(sub))
    graded = tuple(lcs_dims[i] - lcs_dims[i + 1] for i in range(len(lcs_dims) - 1))
    # the center is the common kernel of all ad_{e_b}
    ad_rows = [bracket_matrix(sub, unit_vector(d, b)) for b in range(d)]
    center_dim = d - rank(Matrix.vstack(*ad_rows))
    return Fingerprint(d, graded, lcs_dims, center_dim, d - lcs_dims[1] if len(lcs_dims) > 1 else d)


# ---------------------------------------------------------------------------
# Growth filtration
# ---------------------------------------------------------------------------

def vector_label(v: Matrix, labels: tuple[str, ...]) -> str:
    nonzero = [(k, v[k]) for k in range(v.shape[0]) if v[k] != 0]
    if len(nonzero) == 1 and nonzero[0][1] == 1:
        return labels[nonzero[0][0]]
    terms = []
    for k, c in nonzero:
        terms.append(labels[k] if c == 1 else f"-{labels[k]}" if c == -1 else f"{c}*{labels[k]}")
    return " + ".join(terms).replace("+ -", "- ")


def growth_filtration(E: Endomorphism, basis: AdaptedBasis | None = None) -> GrowthFiltration:
    """Nested subalgebras g_b spanned by chain vectors whose forward base is at most b."""
    basis = basis or adapted_jordan_basis(E)
    sc, labels, n = E.algebra.sc, E.algebra.labels, E.dim
    rated = chain_vector_rates(basis, "forward")

    thresholds: list[GrowthRate] = []
    for _, rate in rated:
        base = GrowthRate(rate.lam, 0, rate.w)
        if not any(rate_equal(base, t) for t in thresholds):
            thresholds.append(base)
    thresholds.sort(key=rate_key)

    spaces: list[GrowthSpace] = []
    for t in thresholds:
        members = tuple(
            i for i, (_, rate) in enumerate(rated)
            if alg_pow_compare(rate.lam, rate.w, t.lam, t.w) is not Ordering.GT
        )
        vectors = [rated[i][0] for i in members]
        span = hstack(vectors, n)
        for a in range(len(vectors)):
            for b in range(a + 1, len(vectors)):
                if not in_span(bracket(vectors[a], vectors[b], sc), span):
                    raise SubalgebraClosureError(
                        f"growth space at base {rate_label(t)} is not closed: "
                        f"[{vector_label(vectors[a], labels)}, {vector_label(vectors[b], labels)}]"
                    )
        spaces.append(GrowthSpace(
            lam=t.lam, w=t.w, members=members, vectors=vectors,
            labels=[vector_label(v, labels) for v in vectors],
            fingerprint=fingerprint(sc, span_basis(vectors, n)),
        ))
        logger.debug("Growth space at %s has dimension %d", rate_label(t), len(vectors))
    if spaces and spaces[-1].fingerprint.dim != n:
        raise SubalgebraClosureError("the top growth space is not the whole algebra")
    return GrowthFiltration(spaces=spaces)


def filtration_equivalent(F1: GrowthFiltration, F2: GrowthFiltration) -> tuple[bool, dict | None]:
    """Position-wise fingerprint agreement (a necessary condition for isomorphic growth spaces)."""
    if len(F1.spaces) != len(F2.spaces):
        return False, {"reason": "length", "lengths": [len(F1.spaces), len(F2.spaces)]}
    for i, (s1, s2) in enumerate(zip(F1.spaces, F2.spaces)):
        if s1.fingerprint != s2.fingerprint:
            return False, {
                "reason": "fingerprint", "position": i + 1,
                "left_threshold": rate_label(GrowthRate(s1.lam, 0, s1.w)),
                "right_threshold": rate_label(GrowthRate(s2.lam, 0, s2.w)),
                "left": fingerprint_to_json(s1.fingerprint), "right": fingerprint_to_json(s2.fingerprint),
            }
    return True, None


def fingerprint_to_json(fp: Fingerprint) -> dict:
    return {"dim": fp.dim, "graded_dims": list(fp.graded_dims), "lcs_dims": list(fp.lcs_dims),
            "center_dim": fp.center_dim, "abelianization_dim": fp.abelianization_dim}
