"""Tests for utils/parsing.py"""

import sys
from pathlib import Path

import pytest
from sympy import Rational

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.models import DocumentParseError
from utils.parsing import parse_matrix, parse_rational, validate_label, validate_name


# ===========================================================================
# parse_rational
# ===========================================================================

class TestParseRational:
    @pytest.mark.parametrize("value, expected", [
        (3, Rational(3)),
        (-7, Rational(-7)),
        ("5", Rational(5)),
        ("-1/3", Rational(-1, 3)),
        (" 4 / 6 ", Rational(2, 3)),
        ("+2", Rational(2)),
    ])
    def test_accepted(self, value, expected):
        assert parse_rational(value) == expected

    def test_returns_rational(self):
        assert isinstance(parse_rational("1/2"), Rational)

    @pytest.mark.parametrize("value", [0.5, True, None, [1], "1.5", "1/-2", "abc", "", "1/"])
    def test_rejected(self, value):
        with pytest.raises(DocumentParseError):
            parse_rational(value)

    def test_zero_denominator(self):
        with pytest.raises(DocumentParseError, match="zero denominator"):
            parse_rational("1/0")

    def test_location_in_message(self):
        with pytest.raises(DocumentParseError, match=r"matrix\[1\]\[2\]"):
            parse_rational("x", "matrix[1][2]")


# ===========================================================================
# parse_matrix
# ===========================================================================

class TestParseMatrix:
    def test_rectangular(self):
        rows = parse_matrix([["1", "0"], [2, "3/4"]])
        assert rows == [[1, 0], [2, Rational(3, 4)]]

    def test_ragged_rows(self):
        with pytest.raises(DocumentParseError, match="different lengths"):
            parse_matrix([[1, 2], [3]])

    @pytest.mark.parametrize("rows", [[], "1,2", [1, 2], None])
    def test_not_a_list_of_rows(self, rows):
        with pytest.raises(DocumentParseError):
            parse_matrix(rows)

    def test_fixed_shape(self):
        with pytest.raises(DocumentParseError, match="expected 2x2"):
            parse_matrix([[1, 2, 3], [4, 5, 6]], shape=(2, 2))

    def test_bad_entry_reports_position(self):
        with pytest.raises(DocumentParseError, match=r"base_action\[2\]\[1\]"):
            parse_matrix([[1], [0.25]], where="base_action")


# ===========================================================================
# Labels and names
# ===========================================================================

class TestLabels:
    @pytest.mark.parametrize("label", ["x", "a1", "e_12", "x'"])
    def test_valid(self, label):
        assert validate_label(label) == label

    @pytest.mark.parametrize("label", ["", "1a", "x y", "x-1", "../x", 3, None])
    def test_invalid(self, label):
        with pytest.raises(DocumentParseError):
            validate_label(label)


class TestNames:
    def test_stripped(self):
        assert validate_name("  phi ") == "phi"

    @pytest.mark.parametrize("name", ["", "   ", "a\x00b", "tab\tname", "x" * 65, 7])
    def test_invalid(self, name):
        with pytest.raises(DocumentParseError):
            validate_name(name)

    def test_length_limit_inclusive(self):
        assert validate_name("n" * 64) == "n" * 64
