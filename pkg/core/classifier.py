"""
Quasi-isometry verdicts for pairs of endomorphisms.

Responsibilities:
  - Standing-assumption report (plus the advisory Jacobi check)
  - Same-Carnot-group check on canonical structure constants
  - Pipeline: permuted forms -> divergence multisets -> growth filtrations
  - Evidence trail attached to every verdict
"""

from __future__ import annotations

import logging

from core.endomorphism import (
    determinant,
    is_homomorphism,
    is_injective,
    is_nonsurjective,
    is_unipotent_free,
    tree_valence,
)
from core.growth import (
    basis_rates,
    filtration_equivalent,
    fingerprint_to_json,
    growth_filtration,
    multiset_equal_up_to_power,
    rate_label,
)
from core.lie_algebra import is_carnot, jacobi_violations
from core.models import (
    AssumptionReport,
    AssumptionViolationError,
    Endomorphism,
    Evidence,
    GradedAlgebra,
    NilqiError,
    Verdict,
)
from core.pajf import adapted_jordan_basis, pajf_from_blocks, pajf_power_equivalent
from utils.config import POWER_BOUND

logger = logging.getLogger(__name__)


def check_standing_assumptions(E: Endomorphism) -> AssumptionReport:
    """Homomorphism, injective, nonsurjective, unipotent-free and Carnot checks as data."""
    checks: dict[str, bool] = {}
    details: dict[str, object] = {}

    hom = is_homomorphism(E)
    checks["homomorphism"] = hom.ok
    if not hom.ok:
        details["homomorphism"] = {"first_violation": list(hom.witness)}

    checks["injective"] = is_injective(E)
    det = determinant(E)
    details["det"] = str(det)
    checks["nonsurjective"] = is_nonsurjective(E)
    checks["unipotent_free"] = checks["injective"] and is_unipotent_free(E)

    cert = is_carnot(E.algebra)
    checks["carnot"] = cert.is_carnot
    if not cert.is_carnot:
        details["carnot"] = [{"grade": g, "reason": r} for g, r in cert.failures]

    jacobi = jacobi_violations(E.algebra.sc)
    advisory = {"jacobi": not jacobi}
    if jacobi:
        details["jacobi"] = [list(v.indices) for v in jacobi]
    return AssumptionReport(checks=checks, details=details, advisory=advisory)


def same_carnot_group(g1: GradedAlgebra, g2: GradedAlgebra) -> bool:
    """Identical canonical weight vectors and structure-constant tables."""
    return g1.dim == g2.dim and g1.weights == g2.weights and g1.sc.table == g2.sc.table


def classify(E1: Endomorphism, E2: Endomorphism, bound: int | None = None, weight_order: str | None = None) -> Verdict:
    bound = bound or POWER_BOUND
    reports = [check_standing_assumptions(E1), check_standing_assumptions(E2)]
    failed = [f"{side}:{name}" for side, rep in zip(("left", "right"), reports) for name in rep.failed]
    if failed:
        raise AssumptionViolationError(failed)
    if not same_carnot_group(E1.algebra, E2.algebra):
        raise AssumptionViolationError(["same_carnot_group"])

    evidence = [Evidence("standing_assumptions", "pass",
                         {"left": reports[0].details, "right": reports[1].details})]
    lie_algebra_ok = reports[0].advisory["jacobi"] and reports[1].advisory["jacobi"]
    if not lie_algebra_ok:
        evidence.append(Evidence("jacobi_advisory", "fail", {
            "left": reports[0].details.get("jacobi", []), "right": reports[1].details.get("jacobi", []),
        }))

    b1, b2 = adapted_jordan_basis(E1), adapted_jordan_basis(E2)

    # (1) permuted absolute Jordan forms
    P1, P2 = pajf_from_blocks(b1.blocks, weight_order), pajf_from_blocks(b2.blocks, weight_order)
    eq = pajf_power_equivalent(P1, P2, bound)
    evidence.append(Evidence("pajf_power_equivalent", eq.outcome,
                             {"r1": eq.r1, "r2": eq.r2, "witness": eq.witness, "exact": eq.exact}))
    if eq.outcome == "Equivalent":
        v1, v2 = tree_valence(E1), tree_valence(E2)
        compatible = v1 ** eq.r1 == v2 ** eq.r2
        evidence.append(Evidence("tree_valence", "compatible" if compatible else "incompatible",
                                 {"left": v1, "right": v2}))
        logger.info("Verdict: QuasiIsometric(%d, %d)", eq.r1, eq.r2)
        return Verdict("QuasiIsometric", r1=eq.r1, r2=eq.r2, evidence=evidence)
    undecided = eq.outcome == "UndecidedWithinBound"

    # (2) divergence multisets
    D1, D2 = basis_rates(b1, "forward"), basis_rates(b2, "forward")
    dm = multiset_equal_up_to_power(D1, D2, bound)
    evidence.append(Evidence("divergence_multiset", dm.outcome, {
        "s": None if dm.s is None else str(dm.s), "witness": dm.witness,
        "left": [rate_label(r) for r in D1.entries], "right": [rate_label(r) for r in D2.entries],
    }))
    candidate: Verdict | None = None
    if dm.outcome == "NotEqual":
        candidate = Verdict("NotQuasiIsometric", witness={"invariant": "divergence_multiset", **dm.witness})
    undecided = undecided or dm.outcome == "Undecided"

    # (3) growth filtrations
    if candidate is None:
        try:
            F1, F2 = growth_filtration(E1, b1), growth_filtration(E2, b2)
        except NilqiError as exc:
            evidence.append(Evidence("growth_filtration", "unavailable", {"error": str(exc)}))
        else:
            same, mismatch = filtration_equivalent(F1, F2)
            evidence.append(Evidence("growth_filtration", "equivalent" if same else "different", {
                "left": [fingerprint_to_json(s.fingerprint) for s in F1.spaces],
                "right": [fingerprint_to_json(s.fingerprint) for s in F2.spaces],
                "mismatch": mismatch,
            }))
            if not same:
                candidate = Verdict("NotQuasiIsometric", witness={"invariant": "growth_filtration", **mismatch})

    if candidate is not None and lie_algebra_ok:
        candidate.evidence = evidence
        logger.info("Verdict: NotQuasiIsometric (%s)", candidate.witness["invariant"])
        return candidate
    if candidate is not None:
        evidence.append(Evidence("suppressed_conclusion", "NotQuasiIsometric", candidate.witness))
        logger.warning("Invariant mismatch ignored: the algebra fails Jacobi, so the invariants are not proven")

    logger.info("Verdict: Unknown")
    return Verdict("Unknown", evidence=evidence, undecided=undecided)
