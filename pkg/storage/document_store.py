"""
Input documents.

Responsibilities:
  - Read an algebra/endomorphism JSON document from disk (extension + size checks)
  - Validate the schema: 1-based indices, exact rationals, no unknown fields
  - Build the canonical GradedAlgebra once per document
  - Turn named matrix / base_action entries into Endomorphisms (canonical order)

Document schema::

    {
        "algebra": {
            "name": str,
            "dim": int,
            "brackets": [{"i": int, "j": int, "terms": [{"k": int, "c": "p/q"}]}],
            "weights": [int, ...],          # optional, checked against the computed ones
            "basis": [str, ...]             # optional labels
        },
        "endomorphisms": {
            "<name>": {"matrix": [[...]]} | {"base_action": [[...]]},
            ...                             # each may carry "description": str
        }
    }

Matrix columns are images of the input basis vectors, in input coordinates.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from sympy import Matrix, Rational

from core.endomorphism import carnot_complete, make_endomorphism
from core.lie_algebra import grade_indices, load_algebra
from core.models import (
    DocumentParseError,
    Endomorphism,
    GradedAlgebra,
    StructureConstants,
    Violation,
)
from utils.config import ALLOWED_EXTENSIONS, MAX_FILE_SIZE_MB
from utils.parsing import parse_matrix, parse_rational, validate_label, validate_name

logger = logging.getLogger(__name__)

# ---------------------------------------------------------------------------
# Schema constants
# ---------------------------------------------------------------------------

_TOP_FIELDS = {"algebra", "endomorphisms"}
_ALGEBRA_FIELDS = {"name", "dim", "brackets", "weights", "basis"}
_BRACKET_FIELDS = {"i", "j", "terms"}
_TERM_FIELDS = {"k", "c"}
_ENDO_KINDS = {"matrix", "base_action"}
_ENDO_FIELDS = _ENDO_KINDS | {"description"}


@dataclass
class EndomorphismSpec:
    name: str
    kind: str                              # "matrix" | "base_action"
    rows: list[list[Rational]]
    description: str = ""


@dataclass
class InputDocument:
    """A parsed document; the algebra is kept in input order until graded() is called."""
    name: str
    sc: StructureConstants
    labels: tuple[str, ...]
    declared_weights: tuple[int, ...] | None = None
    endomorphisms: dict[str, EndomorphismSpec] = field(default_factory=dict)
    source: str = ""
    dropped: list[tuple[int, int]] = field(default_factory=list)   # 1-based diagonal entries ignored
    _graded: GradedAlgebra | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.sc.dim

    def graded(self) -> GradedAlgebra:
        """Canonical graded algebra; propagates NonNilpotentError."""
        if self._graded is None:
            g = load_algebra(self.sc, self.labels, self.name)
            if self.declared_weights is not None:
                computed = [0] * self.dim
                for canonical, original in enumerate(g.permutation):
                    computed[original] = g.weights[canonical]
                if tuple(computed) != self.declared_weights:
                    g.violations.append(Violation(
                        "weights", (),
                        f"declared {list(self.declared_weights)}, computed {computed}",
                    ))
            self._graded = g
        return self._graded


# ---------------------------------------------------------------------------
# Field helpers
# ---------------------------------------------------------------------------

def _require_mapping(value, where: str, allowed: set[str], required: set[str]) -> dict:
    if not isinstance(value, dict):
        raise DocumentParseError(f"{where}: expected an object")
    unknown = set(value) - allowed
    if unknown:
        raise DocumentParseError(f"{where}: unknown field(s) {sorted(unknown)}")
    missing = required - set(value)
    if missing:
        raise DocumentParseError(f"{where}: missing field(s) {sorted(missing)}")
    return value


def _require_index(value, dim: int, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise DocumentParseError(f"{where}: index must be an integer")
    if not 1 <= value <= dim:
        raise DocumentParseError(f"{where}: index {value} outside 1..{dim}")
    return value


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def parse_structure_constants(algebra: dict, dim: int) -> tuple[StructureConstants, list[tuple[int, int]]]:
    """0-based sparse table from the 1-based bracket list; diagonal entries are dropped."""
    brackets = algebra.get("brackets", [])
    if not isinstance(brackets, list):
        raise DocumentParseError("algebra.brackets: expected a list")
    table: dict[tuple[int, int], dict[int, Rational]] = {}
    dropped: list[tuple[int, int]] = []
    for n, entry in enumerate(brackets):
        where = f"algebra.brackets[{n}]"
        entry = _require_mapping(entry, where, _BRACKET_FIELDS, _BRACKET_FIELDS)
        i = _require_index(entry["i"], dim, f"{where}.i")
        j = _require_index(entry["j"], dim, f"{where}.j")
        if not isinstance(entry["terms"], list):
            raise DocumentParseError(f"{where}.terms: expected a list")
        terms: dict[int, Rational] = {}
        for m, term in enumerate(entry["terms"]):
            tw = f"{where}.terms[{m}]"
            term = _require_mapping(term, tw, _TERM_FIELDS, _TERM_FIELDS)
            k = _require_index(term["k"], dim, f"{tw}.k")
            if k - 1 in terms:
                raise DocumentParseError(f"{tw}: e{k} appears twice")
            c = parse_rational(term["c"], f"{tw}.c")
            if c != 0:
                terms[k - 1] = c
        if i == j:
            logger.warning("Ignoring [e%d, e%d]: a basis vector brackets to zero with itself", i, j)
            dropped.append((i, j))
            continue
        if i > j:
            raise DocumentParseError(f"{where}: brackets must be listed with i < j, got ({i}, {j})")
        if (i - 1, j - 1) in table:
            raise DocumentParseError(f"{where}: bracket ({i}, {j}) listed twice")
        if terms:
            table[(i - 1, j - 1)] = terms
    return StructureConstants(dim, table), dropped


def _parse_endomorphism(name: str, entry) -> EndomorphismSpec:
    where = f"endomorphisms.{name}"
    entry = _require_mapping(entry, where, _ENDO_FIELDS, set())
    kinds = _ENDO_KINDS & set(entry)
    if len(kinds) != 1:
        raise DocumentParseError(f"{where}: give exactly one of 'matrix' or 'base_action'")
    kind = kinds.pop()
    description = entry.get("description", "")
    if not isinstance(description, str):
        raise DocumentParseError(f"{where}.description: expected a string")
    return EndomorphismSpec(name=name, kind=kind, rows=parse_matrix(entry[kind], where=f"{where}.{kind}"),
                            description=description)


def parse_document(data, source: str = "") -> InputDocument:
    """Validate a decoded JSON document and return it in input order."""
    data = _require_mapping(data, "document", _TOP_FIELDS, {"algebra"})
    algebra = _require_mapping(data["algebra"], "algebra", _ALGEBRA_FIELDS, {"dim"})

    dim = algebra["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise DocumentParseError("algebra.dim: expected a positive integer")
    name = validate_name(algebra.get("name", Path(source).stem or "algebra"))

    labels: tuple[str, ...] = tuple(f"e{k + 1}" for k in range(dim))
    if "basis" in algebra:
        basis = algebra["basis"]
        if not isinstance(basis, list) or len(basis) != dim:
            raise DocumentParseError(f"algebra.basis: expected {dim} labels")
        labels = tuple(validate_label(b) for b in basis)
        if len(set(labels)) != dim:
            raise DocumentParseError("algebra.basis: labels must be distinct")

    declared = None
    if "weights" in algebra:
        weights = algebra["weights"]
        if (not isinstance(weights, list) or len(weights) != dim
                or not all(isinstance(w, int) and not isinstance(w, bool) and w >= 1 for w in weights)):
            raise DocumentParseError(f"algebra.weights: expected {dim} positive integers")
        declared = tuple(weights)

    sc, dropped = parse_structure_constants(algebra, dim)

    endos_raw = data.get("endomorphisms", {})
    if not isinstance(endos_raw, dict):
        raise DocumentParseError("endomorphisms: expected an object keyed by name")
    endomorphisms = {}
    for key, entry in endos_raw.items():
        key = validate_name(key)
        endomorphisms[key] = _parse_endomorphism(key, entry)

    logger.info("Parsed %s: dim %d, %d brackets, %d endomorphisms",
                source or name, dim, len(sc.table), len(endomorphisms))
    return InputDocument(name=name, sc=sc, labels=labels, declared_weights=declared,
                         endomorphisms=endomorphisms, source=source, dropped=dropped)


def load_document(path) -> InputDocument:
    """
    Read and validate a document from disk.

    Raises:
        DocumentParseError – wrong extension, too large, invalid JSON or schema
        FileNotFoundError  – path does not exist
    """
    src = Path(path)
    if not src.exists():
        raise FileNotFoundError(f"no such document: {src}")
    ext = src.suffix.lower()
    if ext not in ALLOWED_EXTENSIONS:
        raise DocumentParseError(
            f"Unsupported file type '{ext}'. Allowed: {', '.join(sorted(ALLOWED_EXTENSIONS))}"
        )
    size_mb = src.stat().st_size / (1024 * 1024)
    if size_mb > MAX_FILE_SIZE_MB:
        raise DocumentParseError(f"File size ({size_mb:.1f} MB) exceeds the {MAX_FILE_SIZE_MB} MB limit.")
    try:
        data = json.loads(src.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DocumentParseError(f"{src.name}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return parse_document(data, source=str(src))


# ---------------------------------------------------------------------------
# Endomorphisms in canonical order
# ---------------------------------------------------------------------------

def get_endomorphism(doc: InputDocument, name: str) -> Endomorphism:
    """
    The named endomorphism on the canonical algebra.

    Raises:
        KeyError – no endomorphism with that name
    """
    if name not in doc.endomorphisms:
        raise KeyError(f"no endomorphism {name!r} in {doc.source or doc.name}; "
                       f"available: {sorted(doc.endomorphisms)}")
    entry = doc.endomorphisms[name]
    g = doc.graded()
    order = list(g.permutation)
    rows = Matrix(entry.rows)

    if entry.kind == "matrix":
        if rows.shape != (doc.dim, doc.dim):
            raise DocumentParseError(f"endomorphisms.{name}.matrix: expected {doc.dim}x{doc.dim}, got {rows.shape}")
        return make_endomorphism(g, rows.extract(order, order), name=name)

    # V_1 vectors keep their relative input order under the stable weight sort
    d1 = len(grade_indices(g, 1))
    if rows.shape == (doc.dim, d1):
        rows = rows.extract(order, list(range(d1)))
    elif rows.shape != (d1, d1):
        raise DocumentParseError(
            f"endomorphisms.{name}.base_action: expected {d1}x{d1} or {doc.dim}x{d1}, got {rows.shape}"
        )
    return carnot_complete(g, rows, name=name)
