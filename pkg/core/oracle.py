"""
Numeric flow-line oracle.

Responsibilities:
  - Simulate ||M^(+-t) x|| under the ball-box norm with exact integer iteration
  - Regress exponential base and polynomial degree over a t-grid
  - Cross-check every symbolic chain-vector rate against the simulation
"""

from __future__ import annotations

import logging
import math

import numpy as np
from sympy import Matrix, Rational

from core.growth import chain_vector_rates, slot_rates, vector_label
from core.lie_algebra import log_nilpotent_norm
from core.models import AdaptedBasis, DegenerateFitError, FlowEstimate, GrowthRate, RateCheck
from utils.config import (
    DIRECTIONS,
    ORACLE_BASE_TOL,
    ORACLE_DEGREE_TOL,
    ORACLE_MIN_POINTS,
    ORACLE_T_MAX,
    ORACLE_T_MIN,
    RATE_DIRECTION,
)

logger = logging.getLogger(__name__)


def build_grid(t_min: int | None = None, t_max: int | None = None, seed: int | None = None) -> np.ndarray:
    """Integer times in [t_min, t_max]; a seed draws a reproducible subset."""
    t_min = ORACLE_T_MIN if t_min is None else t_min
    t_max = ORACLE_T_MAX if t_max is None else t_max
    if t_min < 1 or t_max < t_min:
        raise ValueError(f"invalid grid [{t_min}, {t_max}]")
    grid = np.arange(t_min, t_max + 1)
    if seed is None or len(grid) <= ORACLE_MIN_POINTS:
        return grid
    rng = np.random.default_rng(seed)
    size = max(ORACLE_MIN_POINTS, (3 * len(grid)) // 4)
    return np.sort(rng.choice(grid, size=size, replace=False))


def _integer_step(operator: Matrix, direction: str) -> tuple[list[list[int]], int]:
    """d*A as nested int lists and the common denominator d, A = M or M^-1."""
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {sorted(DIRECTIONS)}, got {direction!r}")
    A = (operator if direction == "forward" else operator.inv()).applyfunc(Rational)
    d = math.lcm(*(int(entry.q) for entry in A))
    return [[int(A[i, j] * d) for j in range(A.shape[1])] for i in range(A.shape[0])], d


def _log_abs(c: int) -> float:
    return math.log(abs(c)) if c else float("-inf")


def log_norm_series(operator: Matrix, x, weights, direction: str, grid) -> np.ndarray:
    """
    log ||A^t x|| on the grid, A = M or M^-1.

    Iterates in exact integers: x is cleared of denominators once and A is
    scaled by the lcm of its denominators, so the true vector at time t is
    v_t / (D * d^t). Only the final per-coordinate logs are floats.
    """
    A, d = _integer_step(operator, direction)
    x = [Rational(c) for c in x]
    if not any(x):
        raise ValueError("the oracle needs a nonzero vector")
    D = math.lcm(*(int(c.q) for c in x))
    v = [int(c * D) for c in x]
    log_D, log_d = math.log(D), math.log(d)

    wanted = {int(t) for t in grid}
    out: dict[int, float] = {}
    for t in range(1, max(wanted) + 1):
        v = [sum(a * c for a, c in zip(row, v)) for row in A]
        if not any(v):
            break
        if t in wanted:
            offset = log_D + t * log_d
            out[t] = log_nilpotent_norm([_log_abs(c) - offset for c in v], weights)
    return np.array([out.get(int(t), -np.inf) for t in grid])


def fit_growth(grid, log_norms) -> FlowEstimate:
    """Least squares for log y = t log(base) + deg log t + c/t + const."""
    t = np.asarray(grid, dtype=float)
    y = np.asarray(log_norms, dtype=float)
    usable = np.isfinite(y)
    if usable.sum() < ORACLE_MIN_POINTS:
        raise DegenerateFitError(f"only {int(usable.sum())} usable grid points, need {ORACLE_MIN_POINTS}")
    t, y = t[usable], y[usable]
    design = np.column_stack([t, np.log(t), 1.0 / t, np.ones_like(t)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = y - design @ coef
    total = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 if total == 0 else float(max(0.0, 1.0 - np.sum(residual ** 2) / total))
    return FlowEstimate(
        base_est=float(np.exp(coef[0])),
        polydeg_est=float(coef[1]),
        r2=r2,
        t_range=(int(t.min()), int(t.max())),
    )


def flow_divergence(operator: Matrix, x, weights, direction: str | None = None, grid=None) -> FlowEstimate:
    direction = direction or RATE_DIRECTION
    grid = build_grid() if grid is None else grid
    return fit_growth(grid, log_norm_series(operator, x, weights, direction, grid))


def _check(label: str, rate: GrowthRate, estimate: FlowEstimate) -> RateCheck:
    expected_base = float(rate.lam) ** (1.0 / rate.w)
    expected_degree = rate.k / rate.w
    base_err = abs(estimate.base_est - expected_base) / expected_base
    degree_err = abs(estimate.polydeg_est - expected_degree)
    return RateCheck(
        vector=label, rate=rate, estimate=estimate,
        expected_base=expected_base, expected_degree=expected_degree,
        base_rel_err=base_err, degree_abs_err=degree_err,
        passed=base_err <= ORACLE_BASE_TOL and degree_err <= ORACLE_DEGREE_TOL,
    )


def validate_rates(
    basis: AdaptedBasis,
    direction: str | None = None,
    symbolic: list[GrowthRate] | None = None,
    grid=None,
) -> list[RateCheck]:
    """
    One row per chain vector. *symbolic* overrides the computed rates (in
    chain order) so that a corrupted table can be checked as a control.
    """
    direction = direction or RATE_DIRECTION
    grid = build_grid() if grid is None else grid
    rows: list[RateCheck] = []
    vectors: list[tuple[str, Matrix, GrowthRate | None, str]] = []
    for chain in basis.chains:
        if chain.modulus is None:
            for v in chain.vectors:
                vectors.append((vector_label(v, basis.labels), v, None, f"roots of {chain.factor} differ in modulus"))
            continue
        for v, rate in zip(chain.vectors, slot_rates(chain.modulus, chain.weights, direction)):
            vectors.append((vector_label(v, basis.labels), v, rate, ""))

    if symbolic is not None:
        rated = [entry for entry in vectors if entry[2] is not None]
        if len(symbolic) != len(rated):
            raise ValueError(f"expected {len(rated)} symbolic rates, got {len(symbolic)}")
        replacements = iter(symbolic)
        vectors = [(lbl, v, next(replacements) if rate is not None else None, why) for lbl, v, rate, why in vectors]

    for label, v, rate, reason in vectors:
        if rate is None:
            logger.warning("Oracle skipped %s: %s", label, reason)
            rows.append(RateCheck(vector=label, rate=None, skipped=reason))
            continue
        estimate = flow_divergence(basis.operator, list(v), basis.weights, direction, grid)
        row = _check(label, rate, estimate)
        if not row.passed:
            logger.warning("Oracle disagrees on %s: base %.4g vs %.4g, degree %.3f vs %.3f",
                           label, estimate.base_est, row.expected_base, estimate.polydeg_est, row.expected_degree)
        rows.append(row)
    return rows


def symbolic_rates(basis: AdaptedBasis, direction: str | None = None) -> list[GrowthRate]:
    """Chain-vector rates in the order validate_rates uses."""
    return [rate for _, rate in chain_vector_rates(basis, direction)]


def series_rows(basis: AdaptedBasis, direction: str | None = None, grid=None) -> list[dict]:
    """(vector, t, log_norm) rows for CSV emission."""
    direction = direction or RATE_DIRECTION
    grid = build_grid() if grid is None else grid
    rows = []
    for chain in basis.chains:
        for v in chain.vectors:
            label = vector_label(v, basis.labels)
            for t, value in zip(grid, log_norm_series(basis.operator, list(v), basis.weights, direction, grid)):
                rows.append({"vector": label, "t": int(t), "log_norm": float(value)})
    return rows
