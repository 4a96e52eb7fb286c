"""
Exact scalars.

Responsibilities:
  - Rationals (sympy.Rational) and real algebraic numbers (AlgebraicReal)
  - Decidable comparison: interval refinement, equality by polynomial gcd
  - Integer powers through resultants, absolute value, reciprocal, square root
  - Root selection for algebraic expressions (complex eigenvalue parts, moduli)
  - Prime-exponent ratios for exact power-equivalence decisions on rationals
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import sympy
from sympy import CRootOf, Poly, Rational

from core.models import Ordering
from utils.config import ROOT_PRECISION

logger = logging.getLogger(__name__)

_X = sympy.Symbol("x")
_Y = sympy.Symbol("y")

# Returned by power_ratio when both numbers are 1 (every exponent works).
ANY_RATIO = "any"


# ---------------------------------------------------------------------------
# Polynomial helpers
# ---------------------------------------------------------------------------

def integer_poly(poly) -> Poly:
    """Primitive integer polynomial in x with positive leading coefficient."""
    expr = poly.as_expr() if isinstance(poly, Poly) else poly
    gens = poly.gens if isinstance(poly, Poly) else (_X,)
    expr = expr.subs(gens[0], _X) if gens[0] != _X else expr
    _, p = Poly(expr, _X, domain="QQ").clear_denoms(convert=True)
    _, p = p.primitive()
    if p.LC() < 0:
        p = -p
    return p


def _coeffs_low_first(poly: Poly) -> tuple[int, ...]:
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def _poly_from_coeffs(coeffs: tuple[int, ...]) -> Poly:
    return Poly(list(reversed(coeffs)), _X, domain="ZZ")


def _to_rational(value) -> Rational:
    if isinstance(value, Fraction):
        return Rational(value.numerator, value.denominator)
    return Rational(value)


# ---------------------------------------------------------------------------
# AlgebraicReal
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AlgebraicReal:
    """
    The unique real root of *min_poly* inside [lo, hi].

    min_poly holds integer coefficients from the constant term upward and is
    irreducible, primitive and has a positive leading coefficient, so two
    AlgebraicReals are equal exactly when their polynomials agree and their
    intervals isolate the same root.
    """
    min_poly: tuple[int, ...]
    lo: Rational
    hi: Rational

    # ── constructors ─────────────────────────────────────────
    @classmethod
    def from_rational(cls, value) -> AlgebraicReal:
        q = _to_rational(value)
        return cls((int(-q.p), int(q.q)), q, q)

    @classmethod
    def from_poly_root(cls, poly, lo, hi) -> AlgebraicReal:
        """Pick the root of *poly* in [lo, hi]; the interval must isolate exactly one."""
        lo, hi = _to_rational(lo), _to_rational(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        p = integer_poly(poly)
        if p.sqf_part().count_roots(lo, hi) != 1:
            raise ValueError(f"[{lo}, {hi}] does not isolate a single root of {p.as_expr()}")
        for factor, _ in p.factor_list()[1]:
            factor = integer_poly(factor)
            if factor.count_roots(lo, hi) == 0:
                continue
            if factor.degree() == 1:
                c0, c1 = _coeffs_low_first(factor)
                return cls.from_rational(Rational(-c0, c1))
            return cls(_coeffs_low_first(factor), lo, hi)
        raise ValueError(f"no root of {p.as_expr()} in [{lo}, {hi}]")

    @classmethod
    def from_expr(cls, expr) -> AlgebraicReal:
        """Exact real algebraic number for a sympy expression (CRootOf, I, sqrt allowed)."""
        expr = sympy.sympify(expr)
        if expr.is_Rational:
            return cls.from_rational(expr)
        approx = sympy.re(expr.evalf(ROOT_PRECISION))
        poly = sympy.minimal_polynomial(expr, _X, polys=True)
        return _select_root(poly, approx)

    # ── basic properties ─────────────────────────────────────
    @property
    def poly(self) -> Poly:
        return _poly_from_coeffs(self.min_poly)

    @property
    def degree(self) -> int:
        return len(self.min_poly) - 1

    @property
    def is_rational(self) -> bool:
        return self.degree == 1

    @property
    def rational_value(self) -> Rational:
        if not self.is_rational:
            raise ValueError("not a rational number")
        c0, c1 = self.min_poly
        return Rational(-c0, c1)

    @property
    def width(self) -> Rational:
        return self.hi - self.lo

    def sign(self) -> int:
        if self.is_rational:
            return int(sympy.sign(self.rational_value))
        a = self
        while a.lo <= 0 <= a.hi:
            a = a.refine(4)
        return 1 if a.lo > 0 else -1

    # ── refinement ───────────────────────────────────────────
    def refine(self, steps: int = 1) -> AlgebraicReal:
        """Halve the isolating interval *steps* times."""
        if self.is_rational:
            return self
        p = self.poly
        lo, hi = self.lo, self.hi
        sign_lo = sympy.sign(p.eval(lo))
        for _ in range(steps):
            mid = (lo + hi) / 2
            sign_mid = sympy.sign(p.eval(mid))
            if sign_mid == 0:
                return AlgebraicReal.from_rational(mid)
            if sign_mid != sign_lo:
                hi = mid
            else:
                lo, sign_lo = mid, sign_mid
        return AlgebraicReal(self.min_poly, lo, hi)

    def refine_to(self, eps) -> AlgebraicReal:
        a = self
        eps = _to_rational(eps)
        while a.width > eps:
            a = a.refine(8)
        return a

    # ── conversions ──────────────────────────────────────────
    @cached_property
    def root_index(self) -> int:
        """Position among the real roots of min_poly, as used by CRootOf."""
        if self.is_rational:
            return 0
        return int(self.poly.count_roots(None, self.lo))

    def to_expr(self):
        if self.is_rational:
            return self.rational_value
        return CRootOf(self.poly.as_expr(), self.root_index)

    @cached_property
    def _float(self) -> float:
        if self.is_rational:
            return float(self.rational_value)
        scale = max(abs(self.lo), abs(self.hi), Rational(1))
        a = self.refine_to(scale / Rational(2) ** 60)
        return float((a.lo + a.hi) / 2)

    def __float__(self) -> float:
        return self._float

    # ── arithmetic ───────────────────────────────────────────
    def __abs__(self) -> AlgebraicReal:
        if self.sign() >= 0:
            return self
        if self.is_rational:
            return AlgebraicReal.from_rational(-self.rational_value)
        p = integer_poly(self.poly.as_expr().subs(_X, -_X))
        return AlgebraicReal(_coeffs_low_first(p), -self.hi, -self.lo)

    def reciprocal(self) -> AlgebraicReal:
        if self.is_rational:
            value = self.rational_value
            if value == 0:
                raise ZeroDivisionError("reciprocal of zero")
            return AlgebraicReal.from_rational(1 / value)
        a = self
        while a.lo <= 0 <= a.hi:
            a = a.refine(4)
        p = integer_poly(Poly(list(a.min_poly), _X))    # reversed coefficients
        return AlgebraicReal(_coeffs_low_first(p), 1 / a.hi, 1 / a.lo)

    def pow(self, k: int) -> AlgebraicReal:
        """self**k for a positive number and k >= 1, via Res_x(p(x), y - x^k)."""
        if k < 1:
            raise ValueError(f"exponent must be positive, got {k}")
        if self.is_rational:
            return AlgebraicReal.from_rational(self.rational_value ** k)
        if k == 1:
            return self
        if self.sign() <= 0:
            raise ValueError("pow is defined here for positive numbers only")
        res = sympy.resultant(self.poly.as_expr(), _Y - _X ** k, _X)
        target = Poly(res.subs(_Y, _X), _X)
        sqf = integer_poly(target).sqf_part()
        a = self
        while a.lo <= 0:
            a = a.refine(4)
        while sqf.count_roots(a.lo ** k, a.hi ** k) != 1:
            a = a.refine(4)
        return AlgebraicReal.from_poly_root(target, a.lo ** k, a.hi ** k)

    def sqrt(self) -> AlgebraicReal:
        if self.sign() < 0:
            raise ValueError("square root of a negative number")
        if self.is_rational:
            value = self.rational_value
            root = sympy.sqrt(value)
            if root.is_Rational:
                return AlgebraicReal.from_rational(root)
        target = Poly(self.poly.as_expr().subs(_X, _X ** 2), _X)
        approx = sympy.sqrt(self.to_expr()).evalf(ROOT_PRECISION)
        return _select_root(target, approx, positive=True)

    # ── comparison protocol ──────────────────────────────────
    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return alg_compare(self, other) is Ordering.EQ

    def __hash__(self) -> int:
        return hash(self.min_poly)

    def __lt__(self, other) -> bool:
        return alg_compare(self, _coerce_strict(other)) is Ordering.LT

    def __le__(self, other) -> bool:
        return alg_compare(self, _coerce_strict(other)) is not Ordering.GT

    def __gt__(self, other) -> bool:
        return alg_compare(self, _coerce_strict(other)) is Ordering.GT

    def __ge__(self, other) -> bool:
        return alg_compare(self, _coerce_strict(other)) is not Ordering.LT

    def __repr__(self) -> str:
        if self.is_rational:
            return f"AlgebraicReal({self.rational_value})"
        return f"AlgebraicReal(root of {self.poly.as_expr()} in [{self.lo}, {self.hi}])"

    def __str__(self) -> str:
        if self.is_rational:
            return str(self.rational_value)
        return f"{float(self):.6g}"

    # ── serialization ────────────────────────────────────────
    def to_json(self):
        if self.is_rational:
            return str(self.rational_value)
        return {"min_poly": list(self.min_poly), "lo": str(self.lo), "hi": str(self.hi)}

    @classmethod
    def from_json(cls, data) -> AlgebraicReal:
        if isinstance(data, (str, int)):
            return cls.from_rational(Rational(data))
        coeffs = [int(c) for c in data["min_poly"]]
        return cls.from_poly_root(_poly_from_coeffs(tuple(coeffs)), Rational(data["lo"]), Rational(data["hi"]))


def _coerce(value) -> AlgebraicReal | None:
    if isinstance(value, AlgebraicReal):
        return value
    if isinstance(value, (int, Fraction, Rational)) or getattr(value, "is_Rational", False):
        return AlgebraicReal.from_rational(value)
    return None


def _coerce_strict(value) -> AlgebraicReal:
    result = _coerce(value)
    if result is None:
        raise TypeError(f"cannot compare AlgebraicReal with {type(value).__name__}")
    return result


def _select_root(poly: Poly, approx, positive: bool = False) -> AlgebraicReal:
    """The real root of *poly* closest to the high-precision value *approx*."""
    approx = Rational(sympy.Float(approx, ROOT_PRECISION))
    eps = Rational(1, 10 ** (ROOT_PRECISION // 2))
    best: tuple[Rational, AlgebraicReal] | None = None
    _, factors = integer_poly(poly).factor_list()
    for factor, _ in factors:
        factor = integer_poly(factor)
        if factor.degree() == 1:
            c0, c1 = _coeffs_low_first(factor)
            candidates = [(Rational(-c0, c1), Rational(-c0, c1))]
        else:
            candidates = [factor.refine_root(a, b, eps=eps) for (a, b), _ in factor.intervals()]
        for a, b in candidates:
            a, b = Rational(a), Rational(b)
            if positive and b <= 0:
                continue
            distance = Rational(0) if a <= approx <= b else min(abs(approx - a), abs(approx - b))
            if best is None or distance < best[0]:
                if factor.degree() == 1:
                    value = AlgebraicReal.from_rational(a)
                else:
                    value = AlgebraicReal(_coeffs_low_first(factor), a, b)
                best = (distance, value)
    if best is None:
        raise ValueError(f"{poly.as_expr()} has no real root near {sympy.Float(approx, 12)}")
    return best[1]


# ---------------------------------------------------------------------------
# Comparison operations
# ---------------------------------------------------------------------------

def _same_number(a: AlgebraicReal, b: AlgebraicReal) -> bool:
    g = sympy.gcd(a.poly, b.poly)
    if g.degree() < 1:
        return False
    lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
    if lo > hi:
        return False
    return integer_poly(g).count_roots(lo, hi) >= 1


def alg_compare(a: AlgebraicReal, b: AlgebraicReal) -> Ordering:
    """Exact ordering of two algebraic reals."""
    if a.is_rational and b.is_rational:
        x, y = a.rational_value, b.rational_value
        return Ordering.LT if x < y else Ordering.GT if x > y else Ordering.EQ
    if _same_number(a, b):
        return Ordering.EQ
    while not (a.hi < b.lo or b.hi < a.lo):
        a, b = a.refine(4), b.refine(4)
    return Ordering.LT if a.hi < b.lo else Ordering.GT


def alg_pow_compare(l1: AlgebraicReal, w1: int, l2: AlgebraicReal, w2: int) -> Ordering:
    """Order l1^(1/w1) against l2^(1/w2) by comparing l1^w2 with l2^w1."""
    if l1.sign() <= 0 or l2.sign() <= 0:
        raise ValueError("alg_pow_compare needs positive bases")
    return alg_compare(l1.pow(w2), l2.pow(w1))


# ---------------------------------------------------------------------------
# Exact exponent ratios for rationals
# ---------------------------------------------------------------------------

def prime_exponents(value: Rational) -> dict[int, int]:
    value = _to_rational(value)
    if value <= 0:
        raise ValueError(f"prime exponents need a positive rational, got {value}")
    exps = dict(sympy.factorint(value.p))
    for prime, e in sympy.factorint(value.q).items():
        exps[prime] = exps.get(prime, 0) - e
    return {p: e for p, e in exps.items() if e != 0 and p != 1}


def power_ratio(a: Rational, b: Rational) -> Fraction | str | None:
    """
    The unique s > 0 with a^s = b, for positive rationals.

    Returns ANY_RATIO when a = b = 1 and None when no such s exists.
    """
    ea, eb = prime_exponents(a), prime_exponents(b)
    if not ea and not eb:
        return ANY_RATIO
    if not ea or not eb or set(ea) != set(eb):
        return None
    ratio: Fraction | None = None
    for prime, e in ea.items():
        candidate = Fraction(eb[prime], e)
        if ratio is None:
            ratio = candidate
        elif candidate != ratio:
            return None
    if ratio is None or ratio <= 0:
        return None
    return ratio
