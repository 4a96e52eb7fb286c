"""
Input parsing helpers.

Responsibilities:
  - Parse exact rationals written as "p" or "p/q" (ints are accepted too)
  - Validate basis labels and endomorphism names
"""

import re

from sympy import Rational

from core.models import DocumentParseError

# ---------------------------------------------------------------------------
# Internal constants
# ---------------------------------------------------------------------------

_RATIONAL = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")

# Labels: a letter, then letters, digits, underscores or primes
_LABEL = re.compile(r"^[A-Za-z][A-Za-z0-9_']*$")

_MAX_NAME_LEN = 64


# ===========================================================================
# Public API
# ===========================================================================

def parse_rational(value, where: str = "") -> Rational:
    """
    Parse *value* into a sympy Rational.

    Accepts Python ints and strings "p" or "p/q" with q > 0. Floats are
    rejected: every input entry must be exact.
    """
    if isinstance(value, bool):
        raise DocumentParseError(f"{where or 'value'}: expected a rational, got a boolean")
    if isinstance(value, int):
        return Rational(value)
    if not isinstance(value, str):
        raise DocumentParseError(f"{where or 'value'}: expected a rational string, got {type(value).__name__}")
    match = _RATIONAL.match(value)
    if not match:
        raise DocumentParseError(f"{where or 'value'}: {value!r} is not of the form 'p' or 'p/q'")
    num, den = match.group(1), match.group(2)
    if den is not None and int(den) == 0:
        raise DocumentParseError(f"{where or 'value'}: zero denominator in {value!r}")
    return Rational(int(num), int(den) if den else 1)


def parse_matrix(rows, shape: tuple[int, int] | None = None, where: str = "matrix") -> list[list[Rational]]:
    """A list of equal-length rows of rationals, optionally of a fixed shape."""
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise DocumentParseError(f"{where}: expected a non-empty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DocumentParseError(f"{where}: rows have different lengths")
    if shape is not None and (len(rows), width) != shape:
        raise DocumentParseError(f"{where}: expected {shape[0]}x{shape[1]}, got {len(rows)}x{width}")
    return [[parse_rational(c, f"{where}[{i + 1}][{j + 1}]") for j, c in enumerate(row)]
            for i, row in enumerate(rows)]


def validate_label(label: str) -> str:
    if not isinstance(label, str) or not _LABEL.match(label):
        raise DocumentParseError(f"invalid basis label {label!r}")
    return label


def validate_name(name: str) -> str:
    """Endomorphism and algebra names: printable, non-empty, bounded."""
    if not isinstance(name, str) or not name.strip():
        raise DocumentParseError("names must be non-empty strings")
    if len(name) > _MAX_NAME_LEN or not name.isprintable():
        raise DocumentParseError(f"invalid name {name[:_MAX_NAME_LEN]!r}")
    return name.strip()
