#!/usr/bin/env python3
"""
Oracle Benchmark: Numeric Cross-Check of the Exact Growth Rates
===============================================================

Loads every document under data/corpus/, runs the flow-line oracle over each
endomorphism in both directions, and prints a Markdown table of pass counts,
worst errors and timings.

Usage:
    python benchmark_oracle.py [corpus_dir]
"""

import sys
import time
from pathlib import Path

from dotenv import load_dotenv

# ---------------------------------------------------------------------------
# Bootstrap: make sure project root is on sys.path
# ---------------------------------------------------------------------------
PROJECT_ROOT = Path(__file__).resolve().parent
sys.path.insert(0, str(PROJECT_ROOT))

load_dotenv()

from core.models import NilqiError, NonNilpotentError  # noqa: E402
from core.oracle import validate_rates  # noqa: E402
from core.pajf import adapted_jordan_basis  # noqa: E402
from storage.document_store import get_endomorphism, load_document  # noqa: E402
from utils.config import CORPUS_DIR  # noqa: E402

DIRECTIONS = ["forward", "backward"]

# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _worst(values: list[float | None]) -> str:
    present = [v for v in values if v is not None]
    return f"{max(present):.4f}" if present else "n/a"


def _bench_one(doc, name: str, direction: str) -> dict:
    entry = {"document": doc.name, "endomorphism": name, "direction": direction, "error": None}
    t0 = time.perf_counter()
    try:
        basis = adapted_jordan_basis(get_endomorphism(doc, name))
        t1 = time.perf_counter()
        rows = validate_rates(basis, direction)
    except NilqiError as exc:
        entry["error"] = str(exc)
        entry["total_s"] = time.perf_counter() - t0
        return entry
    t2 = time.perf_counter()
    checked = [r for r in rows if not r.skipped]
    entry.update(
        vectors=len(rows),
        checked=len(checked),
        passed=sum(r.passed for r in checked),
        base_err=_worst([r.base_rel_err for r in checked]),
        degree_err=_worst([r.degree_abs_err for r in checked]),
        exact_s=t1 - t0,
        oracle_s=t2 - t1,
        total_s=t2 - t0,
    )
    return entry


# ---------------------------------------------------------------------------
# Main benchmark
# ---------------------------------------------------------------------------

def main(argv: list[str]) -> int:
    corpus_dir = Path(argv[0]) if argv else PROJECT_ROOT / CORPUS_DIR

    print("=" * 80)
    print("  nilqi: Oracle Benchmark")
    print("=" * 80)
    print(f"\nCorpus: {corpus_dir}\n")

    results = []
    for path in sorted(corpus_dir.glob("*.json")):
        try:
            doc = load_document(path)
        except NilqiError as exc:
            print(f"  {path.name:20s}  skipped: {exc}")
            continue
        try:
            doc.graded()
        except NonNilpotentError:
            print(f"  {path.name:20s}  skipped: not nilpotent")
            continue
        for name in sorted(doc.endomorphisms):
            for direction in DIRECTIONS:
                entry = _bench_one(doc, name, direction)
                results.append(entry)
                status = "ERR" if entry["error"] else f"{entry['passed']}/{entry['checked']}"
                print(f"  {doc.name:12s} {name:12s} {direction:8s}  {entry['total_s']:6.2f}s  {status}")

    _print_report(results)
    return 0 if all(not r["error"] and r["passed"] == r["checked"] for r in results) else 1


def _print_report(results: list[dict]):
    print()
    print("| Document | Endomorphism | Direction | Passed | Worst base err | Worst degree err | Exact | Oracle |")
    print("|----------|--------------|-----------|--------|----------------|------------------|-------|--------|")
    for r in results:
        head = f"| {r['document']} | {r['endomorphism']} | {r['direction']} "
        if r["error"]:
            print(head + f"| ERROR: {r['error'][:40]} | | | | |")
            continue
        print(head + f"| {r['passed']}/{r['checked']} ({r['vectors'] - r['checked']} skipped) "
                     f"| {r['base_err']} | {r['degree_err']} | {r['exact_s']:.2f}s | {r['oracle_s']:.2f}s |")
    print()


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
