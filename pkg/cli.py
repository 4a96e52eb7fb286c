"""
nilqi: command-line entry point.

Responsibilities:
  - Parse algebra/endomorphism documents and dispatch subcommands
  - Print one JSON (or oracle CSV) report on stdout, diagnostics on stderr
  - Map domain errors onto the exit-code contract

Run:
  python cli.py validate data/corpus/heisenberg.json
  python cli.py compare data/corpus/h3_phi.json --endo phi data/corpus/h3_theta.json --endo theta

Exit codes:
  0  success
  1  validation or standing-assumption failure
  2  parse error (document, schema, unknown endomorphism, bad flags)
  3  unsupported eigenvalue, or a power search undecided within its bound
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import IO

from core.classifier import check_standing_assumptions, classify
from core.growth import basis_rates, chain_vector_rates, growth_filtration, vector_label
from core.jordan import jordan_structure
from core.lie_algebra import validate
from core.models import (
    AssumptionViolationError,
    DocumentParseError,
    NilqiError,
    NonNilpotentError,
    UnsupportedEigenvalueError,
    Violation,
)
from core.oracle import build_grid, series_rows, validate_rates
from core.pajf import adapted_jordan_basis, compute_pajf
from storage import report_store
from storage.document_store import InputDocument, get_endomorphism, load_document
from utils.config import LOG_FORMAT, LOG_LEVEL, POWER_BOUND, WEIGHT_ORDER

logger = logging.getLogger("nilqi")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_UNDECIDED = 3

_DIRECTIONS = {"fwd": "forward", "forward": "forward", "bwd": "backward", "backward": "backward"}


class _Usage(Exception):
    """Flag combinations argparse cannot express."""


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nilqi",
        description="Quasi-isometry invariants of nilpotent-by-cyclic groups.",
    )
    ap.add_argument("--log-level", default=LOG_LEVEL, help="logging level for stderr (default %(default)s)")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--out", default=None, help="also write the report to this path (atomic)")

    p = sub.add_parser("validate", help="structural checks of the algebra and every endomorphism")
    p.add_argument("file")
    common(p)

    p = sub.add_parser("weights", help="weight vector and grade dimensions")
    p.add_argument("file")
    common(p)

    for name, text in (("jordan", "Jordan data of one endomorphism"),
                       ("growth", "growth-space filtration")):
        p = sub.add_parser(name, help=text)
        p.add_argument("file")
        p.add_argument("--endo", action="append", required=True)
        common(p)

    p = sub.add_parser("pajf", help="permuted absolute Jordan form")
    p.add_argument("file")
    p.add_argument("--endo", action="append", required=True)
    p.add_argument("--weight-order", choices=["asc", "desc"], default=WEIGHT_ORDER)
    common(p)

    p = sub.add_parser("rates", help="divergence-rate multiset")
    p.add_argument("file")
    p.add_argument("--endo", action="append", required=True)
    p.add_argument("--direction", choices=sorted(_DIRECTIONS), default="fwd")
    common(p)

    p = sub.add_parser("compare", help="quasi-isometry verdict for two endomorphisms")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--endo", action="append", required=True, help="given twice: NAME_A then NAME_B")
    p.add_argument("--power-bound", type=int, default=POWER_BOUND)
    p.add_argument("--weight-order", choices=["asc", "desc"], default=WEIGHT_ORDER)
    common(p)

    p = sub.add_parser("oracle", help="numeric cross-check of every chain-vector rate")
    p.add_argument("file")
    p.add_argument("--endo", action="append", required=True)
    p.add_argument("--direction", choices=sorted(_DIRECTIONS), default="fwd")
    p.add_argument("--t-min", type=int, default=None)
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--seed", type=int, default=None, help="draw a reproducible subset of the t-grid")
    common(p)
    return ap


def _single_endo(args) -> str:
    if len(args.endo) != 1:
        raise _Usage(f"{args.command} takes exactly one --endo, got {len(args.endo)}")
    return args.endo[0]


# ---------------------------------------------------------------------------
# Subcommands (each returns (report, exit code))
# ---------------------------------------------------------------------------

def _to_input_indices(v: Violation, permutation: tuple[int, ...]) -> Violation:
    return Violation(v.kind, tuple(permutation[i - 1] + 1 for i in v.indices), v.detail)


def cmd_validate(doc: InputDocument, args) -> tuple[dict, int]:
    try:
        g = doc.graded()
    except NonNilpotentError as exc:
        violations = validate(doc.sc) + [Violation("nilpotency", (), str(exc))]
        report = {"algebra": doc.name, "valid": False, "violations":
                  [report_store.violation_to_json(v) for v in violations], "endomorphisms": {}}
        return report, EXIT_INVALID

    # triangularity is judged after the weight reordering, other checks in input order
    violations = [v for v in validate(doc.sc) if v.kind != "triangularity"]
    violations += [_to_input_indices(v, g.permutation) for v in g.violations if v.kind == "triangularity"]
    violations += [v for v in g.violations if v.kind in ("filtration", "weights")]

    endos = {}
    ok = not violations
    for name in doc.endomorphisms:
        assumptions = check_standing_assumptions(get_endomorphism(doc, name))
        endos[name] = report_store.assumptions_to_json(assumptions)
        ok = ok and assumptions.ok
    report = {
        "algebra": doc.name,
        "valid": not violations,
        "violations": [report_store.violation_to_json(v) for v in violations],
        "ignored_diagonal_brackets": [list(p) for p in doc.dropped],
        "endomorphisms": endos,
    }
    for v in violations:
        logger.error("%s violation at %s %s", v.kind, list(v.indices), v.detail)
    return report, EXIT_OK if ok else EXIT_INVALID


def cmd_weights(doc: InputDocument, args) -> tuple[dict, int]:
    g = doc.graded()
    report = report_store.algebra_to_json(g)
    report["weights_by_label"] = dict(zip(g.labels, g.weights))
    return report, EXIT_OK


def cmd_jordan(doc: InputDocument, args) -> tuple[dict, int]:
    E = get_endomorphism(doc, _single_endo(args))
    return {"endomorphism": E.name, **report_store.jordan_to_json(jordan_structure(E.matrix))}, EXIT_OK


def cmd_pajf(doc: InputDocument, args) -> tuple[dict, int]:
    E = get_endomorphism(doc, _single_endo(args))
    return {"endomorphism": E.name, **report_store.pajf_to_json(compute_pajf(E, args.weight_order))}, EXIT_OK


def cmd_rates(doc: InputDocument, args) -> tuple[dict, int]:
    E = get_endomorphism(doc, _single_endo(args))
    direction = _DIRECTIONS[args.direction]
    basis = adapted_jordan_basis(E)
    try:
        vectors = [(vector_label(v, basis.labels), r) for v, r in chain_vector_rates(basis, direction)]
    except UnsupportedEigenvalueError as exc:
        logger.warning("Per-vector rates unavailable: %s", exc)
        vectors = None
    report = report_store.rates_to_json(basis_rates(basis, direction), vectors)
    return {"endomorphism": E.name, **report}, EXIT_OK


def cmd_growth(doc: InputDocument, args) -> tuple[dict, int]:
    E = get_endomorphism(doc, _single_endo(args))
    return {"endomorphism": E.name, **report_store.filtration_to_json(growth_filtration(E))}, EXIT_OK


def cmd_compare(docs: tuple[InputDocument, InputDocument], args) -> tuple[dict, int]:
    if len(args.endo) != 2:
        raise _Usage(f"compare needs --endo twice (one per file), got {len(args.endo)}")
    E1 = get_endomorphism(docs[0], args.endo[0])
    E2 = get_endomorphism(docs[1], args.endo[1])
    verdict = classify(E1, E2, args.power_bound, args.weight_order)
    code = EXIT_UNDECIDED if verdict.outcome == "Unknown" and verdict.undecided else EXIT_OK
    return report_store.verdict_to_json(verdict), code


def cmd_oracle(doc: InputDocument, args):
    E = get_endomorphism(doc, _single_endo(args))
    direction = _DIRECTIONS[args.direction]
    grid = build_grid(args.t_min, args.t_max, args.seed)
    basis = adapted_jordan_basis(E)
    if args.format == "csv":
        return series_rows(basis, direction, grid), EXIT_OK
    report = report_store.oracle_to_json(validate_rates(basis, direction, grid=grid))
    return {"endomorphism": E.name, "direction": direction, **report}, \
        EXIT_OK if report["all_passed"] else EXIT_INVALID


_COMMANDS = {
    "validate": cmd_validate,
    "weights": cmd_weights,
    "jordan": cmd_jordan,
    "pajf": cmd_pajf,
    "rates": cmd_rates,
    "growth": cmd_growth,
    "oracle": cmd_oracle,
}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _emit(report, args, stdout: IO[str]) -> None:
    if args.format == "csv":
        text = report_store.csv_text(report, ["vector", "t", "log_norm"])
        stdout.write(text)
        if args.out:
            report_store.write_csv(report, ["vector", "t", "log_norm"], args.out)
        return
    report_store.emit_json(report, stdout)
    if args.out:
        report_store.write_report(report, args.out)


def _dispatch(args):
    if args.format == "csv" and args.command != "oracle":
        raise _Usage("CSV output is only available for the oracle time series")
    if args.command == "compare":
        return cmd_compare((load_document(args.file_a), load_document(args.file_b)), args)
    return _COMMANDS[args.command](load_document(args.file), args)


def run(argv: list[str] | None = None, stdout: IO[str] | None = None) -> int:
    """Run one subcommand; returns the exit code instead of exiting."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE

    logging.basicConfig(level=args.log_level.upper(), format=LOG_FORMAT, stream=sys.stderr)

    try:
        report, code = _dispatch(args)
    except (DocumentParseError, _Usage, FileNotFoundError, KeyError) as exc:
        logger.error("%s", exc.args[0] if isinstance(exc, KeyError) and exc.args else exc)
        return EXIT_PARSE
    except UnsupportedEigenvalueError as exc:
        logger.error("Unsupported eigenvalue: %s", exc)
        return EXIT_UNDECIDED
    except AssumptionViolationError as exc:
        logger.error("Standing assumptions failed: %s", ", ".join(exc.failed))
        return EXIT_INVALID
    except NilqiError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_INVALID
    except ValueError as exc:
        logger.error("%s", exc)
        return EXIT_PARSE

    _emit(report, args, stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
