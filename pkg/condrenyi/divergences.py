"""Quantum Rényi divergences in the original (Petz) and sandwiched forms, the α-z family,
the limits α ∈ {0, 1, ∞} and unconditional Rényi entropies. All logarithms are base 2.
"""

from __future__ import annotations

import enum
import functools
import itertools
import logging
import math
from dataclasses import dataclass
from typing import ClassVar, Sequence, Union

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .operators import (
    INDEPENDENCE_CUTOFF,
    SUPPORT_CUTOFF,
    TOLERANCE,
    ComplexMatrix,
    OperatorError,
    SubsystemLayout,
    dominates,
    eigenspaces,
    gram_factor,
    hermitian,
    operator_log,
    operator_norm,
    operator_power,
    partial_trace,
    permute,
    positive_eig,
    schatten_power,
    support_basis,
    support_projector,
)

__all__ = [
    "ALPHA_WINDOW",
    "AlphaError",
    "AlphaKind",
    "AlphaLike",
    "AlphaParam",
    "CapabilityError",
    "DensityOperator",
    "DivergenceError",
    "DominationError",
    "EXHAUSTIVE_RANK_LIMIT",
    "OVERLAP_CUTOFF",
    "StateError",
    "d_alpha_z",
    "d_old",
    "d_sandwiched",
    "relative_entropy",
    "renyi_entropy",
    "von_neumann_entropy",
]

# finite orders closer than this to 1 are rejected; use AlphaParam.ONE
ALPHA_WINDOW = 1e-6

# ‖P_j|i⟩‖ above this counts as a nonzero overlap between eigenvectors
OVERLAP_CUTOFF = 1e-8

# largest rank of sigma for the exhaustive subset search at α = 0 (sandwiched)
EXHAUSTIVE_RANK_LIMIT = 14

STATE_TRACE_TOLERANCE = 1e-9

logger = logging.getLogger(__name__)


class AlphaError(ValueError):
    """Invalid Rényi order"""

    pass


class StateError(ValueError):
    """Matrix is not a valid density operator"""

    pass


class DivergenceError(Exception):
    """Base class for divergence evaluation errors"""

    pass


class DominationError(DivergenceError):
    """rho << sigma is required but the kernel of sigma is not inside the kernel of rho"""

    pass


class CapabilityError(DivergenceError):
    """Input exceeds what an exhaustive evaluation supports"""

    pass


class AlphaKind(enum.Enum):
    FINITE = "finite"
    ZERO = "zero"
    ONE = "one"
    INFINITY = "infinity"


@functools.total_ordering
@dataclass(frozen=True)
class AlphaParam:
    """Rényi order: a positive real other than 1, or one of the limits ZERO, ONE, INFINITY"""

    kind: AlphaKind
    value: float | None = None

    ZERO: ClassVar[AlphaParam]
    ONE: ClassVar[AlphaParam]
    INFINITY: ClassVar[AlphaParam]

    def __post_init__(self):
        if self.kind is not AlphaKind.FINITE:
            if self.value is not None:
                raise AlphaError(f"{self.kind.name} takes no value")
            return
        if self.value is None or not math.isfinite(self.value) or self.value <= 0:
            raise AlphaError(f"finite alpha must be a positive real, got {self.value}")
        if abs(self.value - 1) < ALPHA_WINDOW:
            raise AlphaError(
                f"alpha={self.value} lies within {ALPHA_WINDOW} of 1; use the ONE limit instead"
            )
        object.__setattr__(self, "value", float(self.value))

    @classmethod
    def of(cls, alpha: AlphaLike) -> AlphaParam:
        """Coerce a number, string or AlphaParam; 0, 1 and inf map to the limits"""
        if isinstance(alpha, AlphaParam):
            return alpha
        if isinstance(alpha, str):
            return cls.parse(alpha)
        try:
            x = float(alpha)
        except (TypeError, ValueError) as e:
            raise AlphaError(f"cannot interpret {alpha!r} as a Rényi order") from e
        if math.isnan(x) or x < 0:
            raise AlphaError(f"alpha must be nonnegative, got {x}")
        if x == 0:
            return cls.ZERO
        if x == 1:
            return cls.ONE
        if math.isinf(x):
            return cls.INFINITY
        return cls(AlphaKind.FINITE, x)

    @classmethod
    def parse(cls, text: str) -> AlphaParam:
        """Parse "0", "1", "inf", "∞" or a decimal string"""
        normalized = text.strip().lower().replace("−", "-")
        if normalized in {"inf", "+inf", "infinity", "∞"}:
            return cls.INFINITY
        try:
            x = float(normalized)
        except ValueError as e:
            raise AlphaError(f"cannot parse a Rényi order from {text!r}") from e
        return cls.of(x)

    def __float__(self) -> float:
        match self.kind:
            case AlphaKind.ZERO:
                return 0.0
            case AlphaKind.ONE:
                return 1.0
            case AlphaKind.INFINITY:
                return math.inf
        return self.value

    def __lt__(self, other: AlphaParam) -> bool:
        if not isinstance(other, AlphaParam):
            return NotImplemented
        return float(self) < float(other)

    def __str__(self) -> str:
        return repr(float(self))

    @property
    def is_finite(self) -> bool:
        return self.kind is AlphaKind.FINITE


AlphaParam.ZERO = AlphaParam(AlphaKind.ZERO)
AlphaParam.ONE = AlphaParam(AlphaKind.ONE)
AlphaParam.INFINITY = AlphaParam(AlphaKind.INFINITY)

AlphaLike = Union[AlphaParam, float, int, str]


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Positive semi-definite unit-trace operator with a subsystem layout"""

    op: ComplexMatrix
    layout: SubsystemLayout

    def __post_init__(self):
        try:
            decomposition = positive_eig(self.op)
        except OperatorError as e:
            raise StateError(f"invalid density operator: {e}") from e
        self.layout.check(decomposition.eigenvectors.shape[0])
        trace = float(np.sum(decomposition.eigenvalues))
        if abs(trace - 1) > STATE_TRACE_TOLERANCE:
            raise StateError(f"density operator must have unit trace, got {trace!r}")
        object.__setattr__(self, "op", hermitian(self.op))

    @classmethod
    def from_matrix(
        cls,
        matrix: npt.ArrayLike,
        dims: Sequence[int] | None = None,
        labels: Sequence[str] | None = None,
    ) -> DensityOperator:
        matrix = np.asarray(matrix, dtype=np.complex128)
        dims = tuple(dims) if dims is not None else (matrix.shape[0],)
        return cls(matrix, SubsystemLayout.from_dims(dims, labels))

    @property
    def dim(self) -> int:
        return self.layout.dim

    def marginal(self, keep: str | Sequence[str]) -> DensityOperator:
        return DensityOperator(
            partial_trace(self.op, self.layout, keep), self.layout.select(keep)
        )

    def reorder(self, order: Sequence[str]) -> DensityOperator:
        return DensityOperator(permute(self.op, self.layout, order), self.layout.reorder(order))

    def spectrum(self) -> npt.NDArray[np.float64]:
        """Eigenvalues, descending, rounding noise clipped"""
        return positive_eig(self.op).eigenvalues


def _matrix(operator: DensityOperator | npt.ArrayLike) -> ComplexMatrix:
    if isinstance(operator, DensityOperator):
        return operator.op
    return hermitian(operator)


def _reference(sigma: DensityOperator | npt.ArrayLike) -> ComplexMatrix:
    """Validate the second argument: PSD, nonzero, unnormalized allowed"""
    sigma = positive_eig(_matrix(sigma))
    if sigma.rank == 0:
        raise DivergenceError("sigma is the zero operator")
    return sigma.rebuild()


def _require_domination(rho: ComplexMatrix, sigma: ComplexMatrix, what: str):
    if not dominates(rho, sigma):
        raise DominationError(f"{what} requires rho << sigma (kernel of sigma inside kernel of rho)")


def _disjoint(rho: ComplexMatrix, sigma: ComplexMatrix) -> bool:
    """True when the supports of rho and sigma are orthogonal"""
    overlap = support_basis(sigma).conj().T @ support_basis(rho)
    return operator_norm(overlap) <= TOLERANCE


def _renyi_log(q: float, alpha: float, caller: str) -> float:
    """(1/(α-1)) log₂ q, with +inf for a vanishing trace functional"""
    if q <= 0:
        logger.warning(f"{caller}: trace functional vanishes at {alpha=}; returning inf")
        return math.inf
    return math.log2(q) / (alpha - 1)


def relative_entropy(rho: DensityOperator | npt.ArrayLike, sigma: DensityOperator | npt.ArrayLike) -> float:
    """Umegaki relative entropy tr ρ(log₂ρ − log₂σ)

    Raises:
        DominationError: rho is not dominated by sigma
    """
    rho = _matrix(rho)
    sigma = _reference(sigma)
    _require_domination(rho, sigma, "relative entropy")
    decomposition = positive_eig(rho)
    values = decomposition.eigenvalues[decomposition.support]
    negentropy = float(np.sum(values * np.log2(values)))
    cross = float(np.real(np.trace(rho @ operator_log(sigma))))
    return negentropy - cross


def _max_eigenvalue_ratio(rho: ComplexMatrix, sigma: ComplexMatrix) -> float:
    """log₂ max ν_i/μ_j over overlapping eigenspaces of rho and sigma"""
    best = 0.0
    rho_spaces = _support_spaces(rho)
    sigma_spaces = _support_spaces(sigma)
    for nu, rho_basis in rho_spaces:
        for mu, sigma_basis in sigma_spaces:
            if operator_norm(sigma_basis.conj().T @ rho_basis) > OVERLAP_CUTOFF:
                best = max(best, nu / mu)
    return math.log2(best)


def _support_spaces(matrix: ComplexMatrix) -> list[tuple[float, ComplexMatrix]]:
    spaces = eigenspaces(matrix)
    top = spaces[0][0]
    return [(value, basis) for value, basis in spaces if value > SUPPORT_CUTOFF * top]


def d_old(
    rho: DensityOperator | npt.ArrayLike,
    sigma: DensityOperator | npt.ArrayLike,
    alpha: AlphaLike,
) -> float:
    """Petz Rényi divergence (1/(α-1)) log₂ tr ρ^α σ^{1-α} and its limits

    ZERO gives -log₂ tr Π_ρ σ, ONE the relative entropy and INFINITY the largest ratio of
    eigenvalues of rho and sigma over overlapping eigenspaces. sigma may be unnormalized.
    For α in (0, 1) disjoint supports give +inf.

    Raises:
        DominationError: α > 1 (or ONE, INFINITY) and rho is not dominated by sigma
        DivergenceError: sigma is zero
    """
    alpha = AlphaParam.of(alpha)
    rho = _matrix(rho)
    sigma = _reference(sigma)
    match alpha.kind:
        case AlphaKind.ONE:
            return relative_entropy(rho, sigma)
        case AlphaKind.INFINITY:
            _require_domination(rho, sigma, "D_inf")
            return _max_eigenvalue_ratio(rho, sigma)
        case AlphaKind.ZERO:
            if _disjoint(rho, sigma):
                return math.inf
            overlap = float(np.real(np.trace(support_projector(rho) @ sigma)))
            return -math.log2(overlap)
    a = alpha.value
    if a > 1:
        _require_domination(rho, sigma, f"D_alpha at alpha={a}")
    elif _disjoint(rho, sigma):
        return math.inf
    q = float(np.real(np.trace(operator_power(rho, a) @ operator_power(sigma, 1 - a))))
    return _renyi_log(q, a, "d_old")


def _sandwiched_zero(rho: ComplexMatrix, sigma: ComplexMatrix) -> float:
    """α → 0 limit of the sandwiched divergence by exhaustive search over eigenvector subsets"""
    projector = support_projector(rho)
    decomposition = positive_eig(sigma)
    mask = decomposition.support
    weights = decomposition.eigenvalues[mask]
    if len(weights) > EXHAUSTIVE_RANK_LIMIT:
        raise CapabilityError(
            f"sandwiched D_0 searches subsets of sigma's eigenvectors; rank {len(weights)} exceeds {EXHAUSTIVE_RANK_LIMIT}"
        )
    projected = projector @ decomposition.eigenvectors[:, mask]
    values = scipy.linalg.svdvals(projected)
    size = int(np.count_nonzero(values > INDEPENDENCE_CUTOFF))
    if size == 0:
        return math.inf
    best = 0.0
    for subset in itertools.combinations(range(len(weights)), size):
        weight = float(weights[list(subset)].sum())
        if weight <= best:
            continue
        if scipy.linalg.svdvals(projected[:, subset])[-1] > INDEPENDENCE_CUTOFF:
            best = weight
    if best == 0:
        logger.warning(f"_sandwiched_zero: no independent subset of size {size} found")
        return math.inf
    return -math.log2(best)


def d_sandwiched(
    rho: DensityOperator | npt.ArrayLike,
    sigma: DensityOperator | npt.ArrayLike,
    alpha: AlphaLike,
) -> float:
    """Sandwiched Rényi divergence (1/(α-1)) log₂ tr (σ^{(1-α)/2α} ρ σ^{(1-α)/2α})^α

    INFINITY gives log₂ λmax(σ^{-1/2} ρ σ^{-1/2}), ZERO the maximum-weight linearly
    independent subset formula, ONE the relative entropy.

    Raises:
        DominationError: α > 1 (or ONE, INFINITY) and rho is not dominated by sigma
        CapabilityError: ZERO with rank(sigma) above EXHAUSTIVE_RANK_LIMIT
    """
    alpha = AlphaParam.of(alpha)
    rho = _matrix(rho)
    sigma = _reference(sigma)
    match alpha.kind:
        case AlphaKind.ONE:
            return relative_entropy(rho, sigma)
        case AlphaKind.ZERO:
            return _sandwiched_zero(rho, sigma)
        case AlphaKind.INFINITY:
            _require_domination(rho, sigma, "sandwiched D_inf")
            factor = operator_power(sigma, -0.5) @ gram_factor(rho)
            return 2 * math.log2(operator_norm(factor))
    a = alpha.value
    if a > 1:
        _require_domination(rho, sigma, f"sandwiched D_alpha at alpha={a}")
    elif _disjoint(rho, sigma):
        return math.inf
    factor = operator_power(sigma, (1 - a) / (2 * a)) @ gram_factor(rho)
    return _renyi_log(schatten_power(factor, 2 * a), a, "d_sandwiched")


def d_alpha_z(
    rho: DensityOperator | npt.ArrayLike,
    sigma: DensityOperator | npt.ArrayLike,
    alpha: AlphaLike,
    z: float,
) -> float:
    """α-z Rényi divergence (1/(α-1)) log₂ tr (σ^{(1-α)/2z} ρ^{α/z} σ^{(1-α)/2z})^z

    z = 1 gives d_old and z = α gives d_sandwiched. ONE gives the relative entropy for any z.

    Raises:
        AlphaError: α is ZERO or INFINITY, or z is not positive
    """
    alpha = AlphaParam.of(alpha)
    if not (z > 0 and math.isfinite(z)):
        raise AlphaError(f"z must be a positive real, got {z}")
    if alpha.kind is AlphaKind.ONE:
        return relative_entropy(rho, sigma)
    if not alpha.is_finite:
        raise AlphaError(f"the alpha-z family takes a finite alpha, got {alpha}")
    rho = _matrix(rho)
    sigma = _reference(sigma)
    a = alpha.value
    if a > 1:
        _require_domination(rho, sigma, f"alpha-z divergence at alpha={a}")
    elif _disjoint(rho, sigma):
        return math.inf
    factor = operator_power(sigma, (1 - a) / (2 * z)) @ gram_factor(rho, a / z)
    return _renyi_log(schatten_power(factor, 2 * z), a, "d_alpha_z")


def renyi_entropy(rho: DensityOperator | npt.ArrayLike, alpha: AlphaLike) -> float:
    """Rényi entropy (1/(1-α)) log₂ tr ρ^α with the rank, von Neumann and min-entropy limits"""
    alpha = AlphaParam.of(alpha)
    decomposition = positive_eig(_matrix(rho))
    values = decomposition.eigenvalues[decomposition.support]
    match alpha.kind:
        case AlphaKind.ZERO:
            return math.log2(len(values))
        case AlphaKind.ONE:
            return float(-np.sum(values * np.log2(values)))
        case AlphaKind.INFINITY:
            return -math.log2(values[0])
    a = alpha.value
    return math.log2(float(np.sum(values**a))) / (1 - a)


def von_neumann_entropy(rho: DensityOperator | npt.ArrayLike) -> float:
    return renyi_entropy(rho, AlphaParam.ONE)
