"""
Filtration-adapted Jordan bases and the permuted absolute Jordan form.

Responsibilities:
  - Greedy deepest-tail Jordan chains for q(M) on each generalized kernel
  - Verification that the chains are adapted to the tail filtration
  - Per-root weighted blocks (rational chain multiset divided by deg q)
  - Canonical weight-sorted layout, sigma and the permuted matrix
  - Power equivalence of two permuted forms (exact for rational moduli)
"""

from __future__ import annotations

import logging
from collections import Counter
from fractions import Fraction
from math import gcd

import sympy
from sympy import Matrix

from core.jordan import jordan_structure, poly_at_matrix
from core.models import (
    AdaptedBasis,
    AdaptedBasisError,
    Endomorphism,
    JordanChain,
    Ordering,
    PermutedAbsoluteJordanForm,
    PositionEntry,
    PowerEquivalence,
    WeightedBlock,
)
from core.scalar import ANY_RATIO, AlgebraicReal, alg_compare, power_ratio
from utils.config import POWER_BOUND, WEIGHT_ORDER, WEIGHT_ORDERS
from utils.linalg import (
    columns,
    hstack,
    nullspace_basis,
    rank,
    restrict_to_tail,
    unit_vector,
    vector_weight,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Adapted chains
# ---------------------------------------------------------------------------

def _factor_chains(M: Matrix, q, multiplicity: int, weights: tuple[int, ...]) -> list[tuple[list[Matrix], tuple[int, ...]]]:
    """
    Jordan chains of N = q(M) on ker q(M)^multiplicity, tops chosen greedily
    from the deepest tail first. Chains run top -> head (head = N^(len-1) top).
    """
    n = M.shape[0]
    N = poly_at_matrix(q, M)
    kernels = [sympy.zeros(n, 0)]
    power = sympy.eye(n)
    for _ in range(multiplicity):
        power = power * N
        kernels.append(nullspace_basis(power))
        if kernels[-1].shape[1] == kernels[-2].shape[1]:
            kernels.pop()
            break

    top_grade = max(weights)
    chains: list[list[Matrix]] = []
    for k in range(len(kernels) - 1, 0, -1):
        current = columns(kernels[k - 1]) + [c[len(c) - k] for c in chains]
        current_rank = rank(hstack(current, n))
        for j in range(top_grade, 0, -1):
            for v in columns(restrict_to_tail(kernels[k], weights, j)):
                if rank(hstack(current + [v], n)) == current_rank:
                    continue
                chain = [v]
                for _ in range(k - 1):
                    chain.append(N * chain[-1])
                chains.append(chain)
                current.append(v)
                current_rank += 1

    result = [(chain, tuple(vector_weight(v, weights) for v in chain)) for chain in chains]
    _check_adapted(result, kernels[-1], weights, str(q.as_expr()))
    return result


def _check_adapted(chains, root_space: Matrix, weights: tuple[int, ...], label: str) -> None:
    n = root_space.shape[0]
    for chain, ws in chains:
        if list(ws) != sorted(ws):
            raise AdaptedBasisError(f"chain weights {ws} for {label} decrease toward the head")
    for j in range(1, max(weights) + 1):
        chosen = [v for chain, ws in chains for v, w in zip(chain, ws) if w >= j]
        expected = rank(restrict_to_tail(root_space, weights, j))
        if rank(hstack(chosen, n)) != expected:
            raise AdaptedBasisError(
                f"chains for {label} span {rank(hstack(chosen, n))} dimensions of weight >= {j}, expected {expected}"
            )


def adapted_jordan_basis(E: Endomorphism) -> AdaptedBasis:
    """Chains (with vectors) and per-root weighted blocks for every eigenvalue of E."""
    M, weights = E.matrix, E.algebra.weights
    data = jordan_structure(M)
    chains: list[JordanChain] = []
    blocks: list[WeightedBlock] = []
    for factor in data.factors:
        label = str(factor.poly.as_expr())
        found = _factor_chains(M, factor.poly, factor.multiplicity, weights)
        uniform = factor.uniform_modulus
        for vectors, ws in found:
            chains.append(JordanChain(tuple(vectors), ws, uniform, factor=label))

        d = factor.poly.degree()
        counts = Counter(ws for _, ws in found)
        sizes = Counter()
        for ws, count in sorted(counts.items()):
            if count % d:
                raise AdaptedBasisError(f"{count} chains with weights {ws} cannot be shared by {d} roots of {label}")
            sizes[len(ws)] += count // d
            for modulus in factor.moduli:
                blocks.extend([WeightedBlock(modulus, len(ws), ws)] * (count // d))
        if dict(sizes) != factor.block_sizes:
            raise AdaptedBasisError(f"chain sizes {dict(sizes)} disagree with the rank chain {factor.block_sizes}")

    data.basis = chains
    logger.info("Adapted basis for %s: %d chains, %d weighted blocks", E.name or "endomorphism", len(chains), len(blocks))
    return AdaptedBasis(chains=chains, blocks=blocks, operator=M, weights=weights, labels=E.algebra.labels)


def adapted_basis_from_jordan_matrix(J, weights, labels=None) -> AdaptedBasis:
    """
    Read chains straight off a matrix in upper Jordan form with given slot weights.

    Rows act, so within a block the slots run top -> head in index order and
    the column-convention operator is J transposed.
    """
    J = Matrix(J).applyfunc(sympy.Rational)
    n = J.shape[0]
    weights = tuple(int(w) for w in weights)
    if J.shape != (n, n) or len(weights) != n:
        raise ValueError(f"need a square matrix and {J.shape[0]} weights")
    for i in range(n):
        for j in range(n):
            if i != j and not (j == i + 1 and J[i, j] in (0, 1)) and J[i, j] != 0:
                raise ValueError(f"entry ({i + 1}, {j + 1}) breaks Jordan form")

    chains: list[JordanChain] = []
    blocks: list[WeightedBlock] = []
    start = 0
    for i in range(n):
        ends = i == n - 1 or J[i, i + 1] == 0
        if not ends and J[i + 1, i + 1] != J[i, i]:
            raise ValueError(f"link ({i + 1}, {i + 2}) joins different eigenvalues")
        if ends:
            idx = tuple(range(start, i + 1))
            modulus = abs(AlgebraicReal.from_rational(J[start, start]))
            ws = tuple(weights[k] for k in idx)
            if list(ws) != sorted(ws):
                logger.warning("Block at slots %s has decreasing weights %s", [k + 1 for k in idx], ws)
            chains.append(JordanChain(tuple(unit_vector(n, k) for k in idx), ws, modulus))
            blocks.append(WeightedBlock(modulus, len(idx), ws, origin=idx))
            start = i + 1
    return AdaptedBasis(
        chains=chains,
        blocks=blocks,
        operator=J.T,
        weights=weights,
        labels=tuple(labels) if labels else tuple(f"e{k + 1}" for k in range(n)),
    )


# ---------------------------------------------------------------------------
# Permuted absolute Jordan form
# ---------------------------------------------------------------------------

def pajf_from_blocks(blocks: list[WeightedBlock], weight_order: str | None = None) -> PermutedAbsoluteJordanForm:
    """Canonical block order, slot layout, then a stable sort of slots by weight."""
    weight_order = weight_order or WEIGHT_ORDER
    if weight_order not in WEIGHT_ORDERS:
        raise ValueError(f"weight_order must be one of {sorted(WEIGHT_ORDERS)}, got {weight_order!r}")

    ordered = sorted(blocks, key=lambda b: (b.modulus, b.size, b.weight_sig))
    slots = []                       # (block index, position, weight, modulus, origin)
    layout = 0
    for bi, block in enumerate(ordered):
        for pos in range(block.size):
            origin = block.origin[pos] if block.origin is not None else layout
            slots.append((bi, pos, block.weight_sig[pos], block.modulus, origin))
            layout += 1

    sign = -1 if weight_order == "desc" else 1
    perm = sorted(range(len(slots)), key=lambda s: sign * slots[s][2])
    out_pos = {s: i for i, s in enumerate(perm)}

    table = []
    for s in perm:
        bi, pos, weight, modulus, _ = slots[s]
        linked = s + 1 < len(slots) and slots[s + 1][0] == bi
        table.append(PositionEntry(weight, modulus, out_pos[s + 1] if linked else None))

    sigma = [0] * len(slots)
    for s, slot in enumerate(slots):
        sigma[slot[4]] = out_pos[s]
    return PermutedAbsoluteJordanForm(
        blocks=ordered, position_table=table, sigma=tuple(sigma), weight_order=weight_order
    )


def compute_pajf(source, weight_order: str | None = None) -> PermutedAbsoluteJordanForm:
    """PAJF of an Endomorphism or of an already computed AdaptedBasis."""
    basis = source if isinstance(source, AdaptedBasis) else adapted_jordan_basis(source)
    return pajf_from_blocks(basis.blocks, weight_order)


def pajf_from_jordan_matrix(J, weights, weight_order: str | None = None) -> PermutedAbsoluteJordanForm:
    return pajf_from_blocks(adapted_basis_from_jordan_matrix(J, weights).blocks, weight_order)


def pajf_matrix(P: PermutedAbsoluteJordanForm) -> Matrix:
    """The permuted matrix: moduli on the diagonal, 1 at (slot, linked slot)."""
    n = len(P.position_table)
    mat = sympy.zeros(n, n)
    for i, entry in enumerate(P.position_table):
        mat[i, i] = entry.modulus.to_expr()
        if entry.link is not None:
            mat[i, entry.link] = 1
    return mat


def pajf_equal(P1: PermutedAbsoluteJordanForm, P2: PermutedAbsoluteJordanForm) -> bool:
    if len(P1.position_table) != len(P2.position_table):
        return False
    return all(
        a.weight == b.weight and a.link == b.link and alg_compare(a.modulus, b.modulus) is Ordering.EQ
        for a, b in zip(P1.position_table, P2.position_table)
    )


def power_pajf(P: PermutedAbsoluteJordanForm, r: int) -> PermutedAbsoluteJordanForm:
    """PAJF of M^r: same layout, moduli raised to r."""
    blocks = [WeightedBlock(b.modulus.pow(r), b.size, b.weight_sig, b.origin) for b in P.blocks]
    return pajf_from_blocks(blocks, P.weight_order)


# ---------------------------------------------------------------------------
# Power equivalence
# ---------------------------------------------------------------------------

def pajf_power_equivalent(
    P1: PermutedAbsoluteJordanForm,
    P2: PermutedAbsoluteJordanForm,
    bound: int | None = None,
) -> PowerEquivalence:
    """Search r1, r2 with M1^r1 and M2^r2 sharing one permuted absolute Jordan form."""
    bound = bound or POWER_BOUND
    if P1.weight_order != P2.weight_order:
        raise ValueError("permuted forms use different weight orders")
    t1, t2 = P1.position_table, P2.position_table
    if len(t1) != len(t2):
        return PowerEquivalence("NotEquivalent", witness={"reason": "dimension", "dims": [len(t1), len(t2)]})
    for i, (a, b) in enumerate(zip(t1, t2)):
        if a.weight != b.weight or a.link != b.link:
            return PowerEquivalence(
                "NotEquivalent",
                witness={"reason": "structure", "slot": i + 1,
                         "left": {"weight": a.weight, "link": a.link},
                         "right": {"weight": b.weight, "link": b.link}},
            )

    one = AlgebraicReal.from_rational(1)
    for i, (a, b) in enumerate(zip(t1, t2)):
        if alg_compare(a.modulus, one) is not alg_compare(b.modulus, one):
            return PowerEquivalence(
                "NotEquivalent",
                witness={"reason": "expansion", "slot": i + 1,
                         "left": a.modulus.to_json(), "right": b.modulus.to_json()},
            )

    pairs = [(a.modulus, b.modulus) for a, b in zip(t1, t2)]
    if all(m1.is_rational and m2.is_rational for m1, m2 in pairs):
        eq = _exact_rational_equivalence(pairs)
        if eq.outcome == "Equivalent" and max(eq.r1, eq.r2) > bound:
            # exact powers are not limited by the search bound
            logger.info("Exact powers (%d, %d) exceed the search bound %d", eq.r1, eq.r2, bound)
            eq.witness = {"bound": bound, "bound_bypassed": True}
        return eq

    for total in range(2, 2 * bound + 1):
        for r1 in range(max(1, total - bound), min(bound, total - 1) + 1):
            r2 = total - r1
            if gcd(r1, r2) != 1:
                continue
            logger.debug("Trying powers (%d, %d)", r1, r2)
            if all(alg_compare(m1.pow(r1), m2.pow(r2)) is Ordering.EQ for m1, m2 in pairs):
                return PowerEquivalence("Equivalent", r1=r1, r2=r2)
    return PowerEquivalence("UndecidedWithinBound", witness={"bound": bound})


def _exact_rational_equivalence(pairs) -> PowerEquivalence:
    ratio: Fraction | None = None
    for i, (m1, m2) in enumerate(pairs):
        r = power_ratio(m1.rational_value, m2.rational_value)
        if r == ANY_RATIO:
            continue
        if r is None or (ratio is not None and r != ratio):
            return PowerEquivalence(
                "NotEquivalent",
                witness={"reason": "moduli", "slot": i + 1, "left": str(m1), "right": str(m2),
                         "required_ratio": None if r is None else str(r),
                         "established_ratio": None if ratio is None else str(ratio)},
                exact=True,
            )
        ratio = r
    ratio = ratio or Fraction(1)
    return PowerEquivalence("Equivalent", r1=ratio.numerator, r2=ratio.denominator, exact=True)
