"""
Shared data models for the invariant modules.

Indices are 0-based inside the library and 1-based in every report and
input document; the conversion happens in storage/.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from sympy import Matrix, Poly, Rational

    from core.scalar import AlgebraicReal


# ---------------------------------------------------------------------------
# Exceptions
# ---------------------------------------------------------------------------

class NilqiError(Exception):
    """Base class for every domain error raised by this package."""


class NonNilpotentError(NilqiError):
    """Raised when the lower central series does not reach zero."""


class InconsistentExtensionError(NilqiError):
    """Raised when two bracket expressions for one basis vector disagree."""


class NonIntegerIndexError(NilqiError):
    """Raised when |det M| is not a positive integer."""


class UnsupportedEigenvalueError(NilqiError):
    """Raised when an eigenvalue lies outside the supported scalar field."""


class SubalgebraClosureError(NilqiError):
    """Raised when a growth space is not closed under the bracket."""


class AdaptedBasisError(NilqiError):
    """Raised when no filtration-adapted Jordan basis could be assembled."""


class DegenerateFitError(NilqiError):
    """Raised when the oracle has too few usable grid points to regress."""


class AssumptionViolationError(NilqiError):
    """Raised when classification is attempted outside the standing assumptions."""

    def __init__(self, failed: list[str], message: str = ""):
        self.failed = list(failed)
        super().__init__(message or f"standing assumptions failed: {', '.join(self.failed)}")


class DocumentParseError(NilqiError, ValueError):
    """Raised when an input document does not match the schema."""


class Ordering(IntEnum):
    LT = -1
    EQ = 0
    GT = 1


# ---------------------------------------------------------------------------
# Lie algebras
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """One failed structural check; indices are 1-based for reporting."""
    kind: str
    indices: tuple[int, ...]
    detail: str = ""


@dataclass
class StructureConstants:
    """Sparse bracket table: (i, j) -> {k: c} meaning [e_i, e_j] = sum c e_k."""
    dim: int
    table: dict[tuple[int, int], dict[int, Rational]] = field(default_factory=dict)


@dataclass
class GradedAlgebra:
    """A structure-constant table in canonical (weight-sorted) basis order."""
    sc: StructureConstants
    weights: tuple[int, ...]
    grade_dims: tuple[int, ...]
    nilpotency_class: int
    labels: tuple[str, ...] = ()
    permutation: tuple[int, ...] = ()     # canonical index -> input index
    name: str = ""
    violations: list[Violation] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.sc.dim


@dataclass
class CarnotCertificate:
    is_carnot: bool
    failures: list[tuple[int, str]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Endomorphisms and Jordan data
# ---------------------------------------------------------------------------

@dataclass
class Endomorphism:
    """Column j of *matrix* holds the coordinates of phi(e_j), canonical order."""
    algebra: GradedAlgebra
    matrix: Matrix
    name: str = ""

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass
class CheckResult:
    ok: bool
    witness: Any = None


@dataclass
class JordanBlockData:
    """kind is "real" (value set) or "complex_pair" (re, im set, im > 0)."""
    kind: str
    size: int
    modulus: AlgebraicReal
    value: AlgebraicReal | None = None
    re: AlgebraicReal | None = None
    im: AlgebraicReal | None = None

    @property
    def dimension(self) -> int:
        return 2 * self.size if self.kind == "complex_pair" else self.size


@dataclass
class FactorData:
    """Jordan data attached to one irreducible factor of the characteristic polynomial."""
    poly: Poly
    multiplicity: int
    nullities: tuple[int, ...]
    block_sizes: dict[int, int]          # size -> number of blocks per root
    moduli: list[AlgebraicReal]          # one per root, complex roots counted individually

    @property
    def uniform_modulus(self) -> AlgebraicReal | None:
        first = self.moduli[0]
        return first if all(m == first for m in self.moduli[1:]) else None


@dataclass
class RealJordanData:
    blocks: list[JordanBlockData]
    char_poly: Poly
    factors: list[FactorData] = field(default_factory=list)
    basis: Any = None


@dataclass
class JordanChain:
    """Rational chain for q(M); vectors run from the top of the chain to its head."""
    vectors: tuple[Matrix, ...]
    weights: tuple[int, ...]
    modulus: AlgebraicReal | None
    factor: str = ""


@dataclass(frozen=True)
class WeightedBlock:
    modulus: AlgebraicReal
    size: int
    weight_sig: tuple[int, ...]
    origin: tuple[int, ...] | None = None


@dataclass
class AdaptedBasis:
    chains: list[JordanChain]
    blocks: list[WeightedBlock]
    operator: Matrix                      # acts on column vectors
    weights: tuple[int, ...]              # weights of the coordinate basis
    labels: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# Permuted absolute Jordan form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PositionEntry:
    weight: int
    modulus: AlgebraicReal
    link: int | None                      # output slot of the next chain vector


@dataclass
class PermutedAbsoluteJordanForm:
    blocks: list[WeightedBlock]
    position_table: list[PositionEntry]
    sigma: tuple[int, ...]                # original slot -> output slot
    weight_order: str = "asc"


@dataclass
class PowerEquivalence:
    """outcome: Equivalent | NotEquivalent | UndecidedWithinBound."""
    outcome: str
    r1: int | None = None
    r2: int | None = None
    witness: dict | None = None
    exact: bool = False


# ---------------------------------------------------------------------------
# Growth
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthRate:
    """The class [(t^k lam^t)^(1/w)]."""
    lam: AlgebraicReal
    k: int
    w: int


@dataclass
class DivergenceMultiset:
    entries: list[GrowthRate]
    direction: str = "forward"


@dataclass
class MultisetComparison:
    """outcome: Equal | NotEqual | Undecided."""
    outcome: str
    s: Fraction | None = None
    witness: dict | None = None


@dataclass(frozen=True)
class Fingerprint:
    dim: int
    graded_dims: tuple[int, ...]
    lcs_dims: tuple[int, ...]
    center_dim: int
    abelianization_dim: int


@dataclass
class GrowthSpace:
    lam: AlgebraicReal
    w: int
    members: tuple[int, ...]              # indices into the flattened chain-vector list
    vectors: list[Matrix]
    labels: list[str]
    fingerprint: Fingerprint


@dataclass
class GrowthFiltration:
    spaces: list[GrowthSpace]

    @property
    def thresholds(self) -> list[tuple[AlgebraicReal, int]]:
        return [(s.lam, s.w) for s in self.spaces]


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

@dataclass
class AssumptionReport:
    checks: dict[str, bool]
    details: dict[str, Any] = field(default_factory=dict)
    advisory: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def failed(self) -> list[str]:
        return [name for name, passed in self.checks.items() if not passed]


@dataclass
class Evidence:
    check: str
    result: str
    data: Any = None


@dataclass
class Verdict:
    """outcome: QuasiIsometric | NotQuasiIsometric | Unknown."""
    outcome: str
    r1: int | None = None
    r2: int | None = None
    witness: dict | None = None
    evidence: list[Evidence] = field(default_factory=list)
    undecided: bool = False


# ---------------------------------------------------------------------------
# Oracle
# ---------------------------------------------------------------------------

@dataclass
class FlowEstimate:
    base_est: float
    polydeg_est: float
    r2: float
    t_range: tuple[int, int]


@dataclass
class RateCheck:
    vector: str
    rate: GrowthRate | None
    estimate: FlowEstimate | None = None
    expected_base: float | None = None
    expected_degree: float | None = None
    base_rel_err: float | None = None
    degree_abs_err: float | None = None
    passed: bool = False
    skipped: str = ""
