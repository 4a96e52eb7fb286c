"""
Report Store.

Responsibilities:
  - Convert domain results (algebras, Jordan data, PAJF, rates, filtrations,
    verdicts, oracle tables) into JSON-safe dicts with 1-based indices
  - Emit reports on a stream or write them atomically to disk
  - CSV emission for oracle time series
  - Read a written PAJF back (reports re-parse into domain objects)
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import IO

from core.growth import fingerprint_to_json, rate_label, rate_to_json
from core.jordan import absolute_jordan_form
from core.models import (
    AssumptionReport,
    DivergenceMultiset,
    GradedAlgebra,
    GrowthFiltration,
    GrowthRate,
    PermutedAbsoluteJordanForm,
    PositionEntry,
    RateCheck,
    RealJordanData,
    Verdict,
    Violation,
    WeightedBlock,
)
from core.pajf import pajf_matrix
from core.scalar import AlgebraicReal

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Serializers
# ---------------------------------------------------------------------------

def violation_to_json(v: Violation) -> dict:
    return {"kind": v.kind, "indices": list(v.indices), "detail": v.detail}


def algebra_to_json(g: GradedAlgebra) -> dict:
    return {
        "name": g.name,
        "dim": g.dim,
        "labels": list(g.labels),
        "weights": list(g.weights),
        "grade_dims": list(g.grade_dims),
        "nilpotency_class": g.nilpotency_class,
        "input_order": [k + 1 for k in g.permutation],
        "violations": [violation_to_json(v) for v in g.violations],
    }


def assumptions_to_json(report: AssumptionReport) -> dict:
    return {"ok": bool(report.ok),
            "checks": {name: bool(v) for name, v in report.checks.items()},
            "advisory": {name: bool(v) for name, v in report.advisory.items()},
            "details": report.details}


def jordan_to_json(data: RealJordanData) -> dict:
    blocks = []
    for b in data.blocks:
        entry = {"kind": b.kind, "size": b.size, "modulus": b.modulus.to_json()}
        if b.kind == "real":
            entry["value"] = b.value.to_json()
        else:
            entry["re"], entry["im"] = b.re.to_json(), b.im.to_json()
        blocks.append(entry)
    return {
        "char_poly": [str(c) for c in data.char_poly.all_coeffs()],
        "factors": [
            {"poly": str(f.poly.as_expr()), "multiplicity": f.multiplicity,
             "nullities": list(f.nullities),
             "block_sizes": {str(size): count for size, count in sorted(f.block_sizes.items())}}
            for f in data.factors
        ],
        "blocks": blocks,
        "absolute_form": [{"modulus": m.to_json(), "size": s} for m, s in absolute_jordan_form(data)],
    }


def pajf_to_json(P: PermutedAbsoluteJordanForm) -> dict:
    return {
        "weight_order": P.weight_order,
        "blocks": [{"modulus": b.modulus.to_json(), "size": b.size, "weight_sig": list(b.weight_sig)}
                   for b in P.blocks],
        "positions": [
            {"slot": i + 1, "weight": e.weight, "modulus": e.modulus.to_json(),
             "link": None if e.link is None else e.link + 1}
            for i, e in enumerate(P.position_table)
        ],
        "sigma": {str(i + 1): s + 1 for i, s in enumerate(P.sigma)},
        "matrix": [[str(c) for c in pajf_matrix(P).row(i)] for i in range(len(P.position_table))],
    }


def pajf_from_json(data: dict) -> PermutedAbsoluteJordanForm:
    """Inverse of pajf_to_json (the matrix is derived, so it is not read)."""
    blocks = [WeightedBlock(AlgebraicReal.from_json(b["modulus"]), int(b["size"]), tuple(b["weight_sig"]))
              for b in data["blocks"]]
    table = [PositionEntry(int(e["weight"]), AlgebraicReal.from_json(e["modulus"]),
                           None if e["link"] is None else int(e["link"]) - 1)
             for e in data["positions"]]
    sigma = tuple(int(data["sigma"][str(i + 1)]) - 1 for i in range(len(table)))
    return PermutedAbsoluteJordanForm(blocks=blocks, position_table=table, sigma=sigma,
                                      weight_order=data["weight_order"])


def rate_entry(rate: GrowthRate) -> dict:
    return {**rate_to_json(rate), "label": rate_label(rate)}


def rates_to_json(D: DivergenceMultiset, vectors: list[tuple[str, GrowthRate]] | None = None) -> dict:
    out = {"direction": D.direction, "multiset": [rate_entry(r) for r in D.entries]}
    if vectors is not None:
        out["vectors"] = [{"vector": label, **rate_entry(r)} for label, r in vectors]
    return out


def filtration_to_json(F: GrowthFiltration) -> dict:
    return {
        "spaces": [
            {"threshold": rate_label(GrowthRate(s.lam, 0, s.w)),
             "lambda": s.lam.to_json(), "w": s.w,
             "span": list(s.labels),
             "fingerprint": fingerprint_to_json(s.fingerprint)}
            for s in F.spaces
        ]
    }


def verdict_to_json(v: Verdict) -> dict:
    outcome = v.outcome
    if outcome == "QuasiIsometric":
        outcome = f"QuasiIsometric({v.r1},{v.r2})"
    return {
        "outcome": outcome,
        "r1": v.r1,
        "r2": v.r2,
        "witness": v.witness,
        "undecided": v.undecided,
        "evidence": [{"check": e.check, "result": e.result, "data": e.data} for e in v.evidence],
    }


def oracle_to_json(rows: list[RateCheck]) -> dict:
    entries = []
    for r in rows:
        entry = {"vector": r.vector, "passed": r.passed}
        if r.skipped:
            entry["skipped"] = r.skipped
        else:
            entry.update({
                "rate": rate_entry(r.rate),
                "base_est": r.estimate.base_est,
                "polydeg_est": r.estimate.polydeg_est,
                "r2": r.estimate.r2,
                "t_range": list(r.estimate.t_range),
                "expected_base": r.expected_base,
                "expected_degree": r.expected_degree,
                "base_rel_err": r.base_rel_err,
                "degree_abs_err": r.degree_abs_err,
            })
        entries.append(entry)
    checked = [r for r in rows if not r.skipped]
    return {"all_passed": all(r.passed for r in checked), "checked": len(checked),
            "skipped": len(rows) - len(checked), "vectors": entries}


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _atomic_write_text(path: Path, text: str, suffix: str) -> None:
    """Write to a sibling temp file, then os.replace() over *path*."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_fd, tmp_path = tempfile.mkstemp(dir=path.parent, prefix=".tmp_", suffix=suffix)
    try:
        with os.fdopen(tmp_fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp_path, path)
    except Exception:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def dumps(report) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def emit_json(report, stream: IO[str]) -> None:
    stream.write(dumps(report))


def write_report(report, path) -> Path:
    """Write a JSON report atomically and return its path."""
    path = Path(path)
    _atomic_write_text(path, dumps(report), ".json")
    logger.info("Report written to %s", path)
    return path


def read_report(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def csv_text(rows: list[dict], fieldnames: list[str]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def write_csv(rows: list[dict], fieldnames: list[str], path) -> Path:
    path = Path(path)
    _atomic_write_text(path, csv_text(rows, fieldnames), ".csv")
    logger.info("CSV written to %s (%d rows)", path, len(rows))
    return path
