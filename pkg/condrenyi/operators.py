"""Dense Hermitian linear algebra and operator functions on finite-dimensional systems.

Functions of positive semi-definite operators follow the support convention: the
function is applied to eigenvalues above the support cutoff and every other
eigenvalue maps to zero. This holds for every exponent, so M^p with p < 0 is a
generalized inverse power and 0^p = 0 throughout.
"""

from __future__ import annotations

import enum
import functools
import logging
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np
import numpy.typing as npt
import scipy.linalg

__all__ = [
    "ComplexMatrix",
    "DEGENERACY_TOLERANCE",
    "Direction",
    "EigensolverError",
    "HolderCheck",
    "INDEPENDENCE_CUTOFF",
    "LayoutError",
    "NotHermitianError",
    "NotPositiveError",
    "OperatorError",
    "PreconditionError",
    "SUPPORT_CUTOFF",
    "SpectralDecomposition",
    "SubsystemLayout",
    "TOLERANCE",
    "as_labels",
    "dominates",
    "eig_hermitian",
    "eigenprojectors",
    "eigenspaces",
    "fidelity",
    "gram_factor",
    "hermitian",
    "holder_pair_check",
    "local_operator",
    "numerical_rank",
    "operator_function",
    "operator_log",
    "operator_norm",
    "operator_power",
    "partial_trace",
    "permute",
    "pinch",
    "positive_eig",
    "schatten_power",
    "support_basis",
    "support_projector",
    "tensor",
    "trace_norm",
    "trace_power",
]

ComplexMatrix = npt.NDArray[np.complex128]
Labels = Union[str, Sequence[str]]

# eigenvalues at or below SUPPORT_CUTOFF * lambda_max count as zero
SUPPORT_CUTOFF = 1e-10

# hermiticity, reconstruction, clipping and domination tolerance on unit-normalized inputs
TOLERANCE = 1e-9

# eigenvalues within this relative distance share an eigenprojector
DEGENERACY_TOLERANCE = 1e-8

# smallest singular value for a set of vectors to count as linearly independent
INDEPENDENCE_CUTOFF = 1e-8

DEFAULT_LABELS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"

logger = logging.getLogger(__name__)


class OperatorError(Exception):
    """Base class for errors raised by the operator core"""

    pass


class NotHermitianError(OperatorError):
    """Matrix is not square or deviates from its conjugate transpose beyond tolerance"""

    pass


class NotPositiveError(OperatorError):
    """Operator has an eigenvalue below -TOLERANCE"""

    pass


class EigensolverError(OperatorError):
    """The Hermitian eigensolver did not converge"""

    def __init__(self, dim: int, reason: str = ""):
        self.dim = dim
        message = f"eigensolver did not converge for a matrix of dimension {dim}"
        super().__init__(f"{message}: {reason}" if reason else message)


class LayoutError(OperatorError, ValueError):
    """Subsystem layout is inconsistent with an operator or with a label request"""

    pass


class PreconditionError(OperatorError, ValueError):
    """A documented precondition of an operation does not hold"""

    pass


def as_labels(labels: Labels) -> tuple[str, ...]:
    """Normalize one label or a sequence of labels to a tuple of labels"""
    if isinstance(labels, str):
        return (labels,)
    return tuple(str(label) for label in labels)


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered labeled subsystem dimensions defining a tensor factorization"""

    labels: tuple[str, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", as_labels(self.labels))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not self.labels:
            raise LayoutError("layout needs at least one subsystem")
        if len(self.labels) != len(self.dims):
            raise LayoutError(
                f"{len(self.labels)} labels for {len(self.dims)} dimensions"
            )
        if len(set(self.labels)) != len(self.labels):
            raise LayoutError(f"labels must be distinct: {self.labels}")
        if any(d < 1 for d in self.dims):
            raise LayoutError(f"dimensions must be positive: {self.dims}")

    @classmethod
    def from_dims(
        cls, dims: Sequence[int], labels: Sequence[str] | None = None
    ) -> SubsystemLayout:
        """Layout with the given dims, labeled A, B, C, ... unless labels are given"""
        dims = tuple(dims)
        if labels is None:
            if len(dims) > len(DEFAULT_LABELS):
                raise LayoutError(f"too many subsystems for default labels: {dims}")
            labels = tuple(DEFAULT_LABELS[: len(dims)])
        return cls(tuple(labels), dims)

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError as e:
            raise LayoutError(f"unknown subsystem {label!r}; layout has {self.labels}") from e

    def dim_of(self, labels: Labels) -> int:
        """Product of the dimensions of the named subsystems (1 for none)"""
        return math.prod(self.dims[self.index(label)] for label in as_labels(labels))

    def select(self, labels: Labels) -> SubsystemLayout:
        """Layout of the named subsystems, kept in layout order"""
        wanted = set(as_labels(labels))
        for label in wanted:
            self.index(label)
        kept = [(l, d) for l, d in zip(self.labels, self.dims) if l in wanted]
        if not kept:
            raise LayoutError("selection must name at least one subsystem")
        return SubsystemLayout(tuple(l for l, _ in kept), tuple(d for _, d in kept))

    def reorder(self, order: Labels) -> SubsystemLayout:
        order = as_labels(order)
        if sorted(order) != sorted(self.labels):
            raise LayoutError(f"{order} is not a permutation of {self.labels}")
        return SubsystemLayout(order, tuple(self.dims[self.index(l)] for l in order))

    def replace(self, label: str, dim: int, new_label: str | None = None) -> SubsystemLayout:
        """Layout with one subsystem resized and optionally renamed"""
        i = self.index(label)
        labels = list(self.labels)
        dims = list(self.dims)
        labels[i] = new_label or label
        dims[i] = dim
        return SubsystemLayout(tuple(labels), tuple(dims))

    def append(self, label: str, dim: int) -> SubsystemLayout:
        return SubsystemLayout(self.labels + (label,), self.dims + (dim,))

    def check(self, dim: int):
        """Raise LayoutError unless the layout describes a space of dimension dim"""
        if self.dim != dim:
            raise LayoutError(
                f"layout {dict(zip(self.labels, self.dims))} has dimension {self.dim}, operator has {dim}"
            )

    def asdict(self) -> dict:
        return {"labels": list(self.labels), "dims": list(self.dims)}


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in descending order with orthonormal eigenvector columns"""

    eigenvalues: npt.NDArray[np.float64]
    eigenvectors: ComplexMatrix

    @property
    def support(self) -> npt.NDArray[np.bool_]:
        """Mask of eigenvalues above the support cutoff"""
        top = self.eigenvalues.max(initial=0.0)
        if top <= 0:
            return np.zeros(len(self.eigenvalues), dtype=bool)
        return self.eigenvalues > SUPPORT_CUTOFF * top

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.support))

    def rebuild(self, values: npt.ArrayLike | None = None) -> ComplexMatrix:
        """V diag(values) V†, using the stored eigenvalues when values is None"""
        values = self.eigenvalues if values is None else np.asarray(values)
        return (self.eigenvectors * values) @ self.eigenvectors.conj().T

    def apply(self, func: Callable[[np.ndarray], np.ndarray]) -> ComplexMatrix:
        """func on the support, zero elsewhere"""
        mask = self.support
        values = np.zeros_like(self.eigenvalues)
        values[mask] = func(self.eigenvalues[mask])
        return self.rebuild(values)


def hermitian(matrix: npt.ArrayLike, tol: float = TOLERANCE) -> ComplexMatrix:
    """Validate a Hermitian matrix and return its symmetrized copy (M + M†)/2

    Raises:
        NotHermitianError: not square, empty, or not Hermitian within tol (relative to the
            largest entry when that exceeds one)
        OperatorError: NaN or infinite entries
    """
    m = np.asarray(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise NotHermitianError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise OperatorError("matrix has NaN or infinite entries")
    deviation = float(np.max(np.abs(m - m.conj().T)))
    scale = max(1.0, float(np.max(np.abs(m))))
    if deviation > tol * scale:
        raise NotHermitianError(f"matrix is not Hermitian: {deviation=:.3e}")
    return (m + m.conj().T) / 2


def eig_hermitian(matrix: npt.ArrayLike) -> SpectralDecomposition:
    """Full eigendecomposition of a Hermitian matrix, eigenvalues descending

    Raises:
        EigensolverError: LAPACK did not converge; carries the matrix dimension
    """
    m = hermitian(matrix)
    try:
        values, vectors = scipy.linalg.eigh(m)
    except np.linalg.LinAlgError as e:
        raise EigensolverError(m.shape[0], str(e)) from e
    return SpectralDecomposition(values[::-1].copy(), vectors[:, ::-1].copy())


def positive_eig(matrix: npt.ArrayLike) -> SpectralDecomposition:
    """Eigendecomposition of a PSD operator with rounding noise in [-TOLERANCE, 0) clipped

    Raises:
        NotPositiveError: an eigenvalue lies below -TOLERANCE (scaled by the spectral radius
            when that exceeds one)
    """
    decomposition = eig_hermitian(matrix)
    values = decomposition.eigenvalues
    scale = max(1.0, float(np.max(np.abs(values))))
    if values[-1] < -TOLERANCE * scale:
        raise NotPositiveError(f"operator is not positive semi-definite: min eigenvalue {values[-1]:.3e}")
    return SpectralDecomposition(np.clip(values, 0.0, None), decomposition.eigenvectors)


def operator_function(
    matrix: npt.ArrayLike, func: Callable[[np.ndarray], np.ndarray]
) -> ComplexMatrix:
    """Apply func to the eigenvalues of a PSD operator on its support"""
    return positive_eig(matrix).apply(func)


def operator_power(matrix: npt.ArrayLike, p: float) -> ComplexMatrix:
    """M^p under the support convention; the zero operator maps to zero for every p"""
    if not math.isfinite(p):
        raise PreconditionError(f"exponent must be finite, got {p}")
    if p == 1:
        return positive_eig(matrix).apply(lambda x: x)
    return operator_function(matrix, lambda x: x**p)


def operator_log(matrix: npt.ArrayLike, base: float = 2) -> ComplexMatrix:
    """Logarithm on the support of a PSD operator, zero on its kernel"""
    return operator_function(matrix, lambda x: np.log(x) / math.log(base))


def support_projector(matrix: npt.ArrayLike) -> ComplexMatrix:
    return operator_function(matrix, np.ones_like)


def support_basis(matrix: npt.ArrayLike) -> ComplexMatrix:
    """Orthonormal columns spanning the support of a PSD operator"""
    decomposition = positive_eig(matrix)
    return decomposition.eigenvectors[:, decomposition.support]


def trace_power(matrix: npt.ArrayLike, p: float) -> float:
    """tr M^p for PSD M, summed over the support"""
    decomposition = positive_eig(matrix)
    return float(np.sum(decomposition.eigenvalues[decomposition.support] ** p))


def gram_factor(matrix: npt.ArrayLike, p: float = 1.0) -> ComplexMatrix:
    """R with R R† = M^p, one column per support eigenvector of the PSD operator M"""
    decomposition = positive_eig(matrix)
    mask = decomposition.support
    return decomposition.eigenvectors[:, mask] * decomposition.eigenvalues[mask] ** (p / 2)


def schatten_power(matrix: npt.ArrayLike, p: float) -> float:
    """Sum of s^p over the singular values s above the support cutoff

    Equals tr (Y Y†)^{p/2} for Y = matrix. Taking the cutoff on singular values rather than
    on eigenvalues of Y Y† keeps rounding noise on the kernel from entering small powers.
    """
    values = scipy.linalg.svdvals(np.asarray(matrix, dtype=np.complex128))
    if values.size == 0 or values[0] <= 0:
        return 0.0
    kept = values[values > SUPPORT_CUTOFF * values[0]]
    return float(np.sum(kept**p))


def numerical_rank(matrix: npt.ArrayLike, cutoff: float = INDEPENDENCE_CUTOFF) -> int:
    """Number of singular values above cutoff times the largest one"""
    m = np.asarray(matrix, dtype=np.complex128)
    if m.size == 0:
        return 0
    values = scipy.linalg.svdvals(m)
    if values[0] <= 0:
        return 0
    return int(np.count_nonzero(values > cutoff * values[0]))


def dominates(rho: npt.ArrayLike, sigma: npt.ArrayLike, tol: float = TOLERANCE) -> bool:
    """True iff the kernel of sigma lies in the kernel of rho (rho << sigma)"""
    rho = hermitian(rho)
    projector = support_projector(sigma)
    deviation = float(np.max(np.abs(projector @ rho @ projector - rho)))
    return deviation <= tol * max(1.0, float(np.max(np.abs(rho))))


def tensor(*operators: npt.ArrayLike) -> ComplexMatrix:
    """Kronecker product of the operators, left to right"""
    if not operators:
        raise PreconditionError("tensor needs at least one operator")
    return functools.reduce(
        np.kron, (np.asarray(op, dtype=np.complex128) for op in operators)
    )


def _square(matrix: npt.ArrayLike, layout: SubsystemLayout) -> ComplexMatrix:
    m = np.asarray(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise LayoutError(f"expected a square matrix, got shape {m.shape}")
    layout.check(m.shape[0])
    return m


def partial_trace(
    matrix: npt.ArrayLike, layout: SubsystemLayout, keep: Labels
) -> ComplexMatrix:
    """Trace out every subsystem not named in keep

    The kept factors stay in layout order; layout.select(keep) describes the result.
    """
    m = _square(matrix, layout)
    keep = as_labels(keep)
    if not keep:
        raise LayoutError("keep must name at least one subsystem")
    kept = layout.select(keep)
    n = len(layout.dims)
    t = m.reshape(layout.dims + layout.dims)
    traced = [i for i, label in enumerate(layout.labels) if label not in kept.labels]
    for count, axis in enumerate(sorted(traced, reverse=True)):
        t = np.trace(t, axis1=axis, axis2=axis + n - count)
    return t.reshape(kept.dim, kept.dim)


def permute(matrix: npt.ArrayLike, layout: SubsystemLayout, order: Labels) -> ComplexMatrix:
    """Reorder tensor factors; layout.reorder(order) describes the result"""
    m = _square(matrix, layout)
    target = layout.reorder(order)
    perm = [layout.index(label) for label in target.labels]
    n = len(perm)
    t = m.reshape(layout.dims + layout.dims).transpose(perm + [p + n for p in perm])
    return t.reshape(m.shape)


def local_operator(
    operator: npt.ArrayLike, layout: SubsystemLayout, label: str
) -> ComplexMatrix:
    """Embed an operator acting on one subsystem as 1 ⊗ K ⊗ 1

    K may be rectangular (d_out × d_in) with d_in the dimension of the named subsystem.
    """
    i = layout.index(label)
    k = np.asarray(operator, dtype=np.complex128)
    if k.ndim != 2 or k.shape[1] != layout.dims[i]:
        raise LayoutError(
            f"operator of shape {k.shape} cannot act on {label!r} of dimension {layout.dims[i]}"
        )
    before = np.eye(math.prod(layout.dims[:i]))
    after = np.eye(math.prod(layout.dims[i + 1 :]))
    return tensor(before, k, after)


def eigenspaces(matrix: npt.ArrayLike) -> list[tuple[float, ComplexMatrix]]:
    """Eigenvalues (descending) with orthonormal bases of their eigenspaces

    Eigenvalues within DEGENERACY_TOLERANCE of the spectral radius share a block.
    """
    decomposition = eig_hermitian(matrix)
    values, vectors = decomposition.eigenvalues, decomposition.eigenvectors
    scale = max(float(np.max(np.abs(values))), np.finfo(float).tiny)
    spaces = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[start] - values[i] > DEGENERACY_TOLERANCE * scale:
            spaces.append((float(np.mean(values[start:i])), vectors[:, start:i]))
            start = i
    return spaces


def eigenprojectors(matrix: npt.ArrayLike) -> list[tuple[float, ComplexMatrix]]:
    """Eigenvalues (descending) with the projectors onto their eigenspaces"""
    return [(value, basis @ basis.conj().T) for value, basis in eigenspaces(matrix)]


def pinch(matrix: npt.ArrayLike, basis_of: npt.ArrayLike) -> ComplexMatrix:
    """Sum of P M P over the eigenprojectors P of basis_of"""
    m = hermitian(matrix)
    reference = hermitian(basis_of)
    if m.shape != reference.shape:
        raise PreconditionError(f"cannot pinch {m.shape} in the eigenbasis of {reference.shape}")
    return sum(p @ m @ p for _, p in eigenprojectors(reference))


def fidelity(rho: npt.ArrayLike, sigma: npt.ArrayLike) -> float:
    """tr|√ρ √σ|; sigma need not have unit trace"""
    product = operator_power(rho, 0.5) @ operator_power(sigma, 0.5)
    return float(np.sum(scipy.linalg.svdvals(product)))


def trace_norm(matrix: npt.ArrayLike) -> float:
    return float(np.sum(scipy.linalg.svdvals(np.asarray(matrix, dtype=np.complex128))))


def operator_norm(matrix: npt.ArrayLike) -> float:
    """Largest singular value"""
    m = np.asarray(matrix, dtype=np.complex128)
    if m.size == 0:
        return 0.0
    return float(scipy.linalg.svdvals(m)[0])


class Direction(enum.Enum):
    """Direction of an inequality lhs ? rhs, or an equality"""

    LEQ = "<="
    GEQ = ">="
    EQ = "=="

    def slack(self, lhs: float, rhs: float) -> float:
        """Signed slack, negative when the relation is violated (EQ: minus the gap)"""
        match self:
            case Direction.LEQ:
                return rhs - lhs
            case Direction.GEQ:
                return lhs - rhs
            case Direction.EQ:
                return -abs(lhs - rhs)


class HolderCheck(NamedTuple):
    lhs: float
    rhs: float
    direction: Direction


def _schatten_norm(matrix: ComplexMatrix, p: float) -> float:
    total = trace_power(matrix, p)
    return total ** (1 / p) if total > 0 else 0.0


def holder_pair_check(a: npt.ArrayLike, b: npt.ArrayLike, p: float) -> HolderCheck:
    """tr AB against (tr A^p)^{1/p} (tr B^q)^{1/q} with q = p/(p-1)

    Direction is LEQ for p > 1 and GEQ for 0 < p < 1, where the reverse inequality needs
    B >> A and negative powers of B act on its support.

    Raises:
        PreconditionError: p outside (0, 1) ∪ (1, ∞), or p < 1 without B >> A
        NotPositiveError: A or B not positive semi-definite
    """
    if not (p > 0 and p != 1 and math.isfinite(p)):
        raise PreconditionError(f"Hölder exponent must lie in (0, 1) or (1, inf), got {p}")
    q = p / (p - 1)
    a = positive_eig(a).rebuild()
    b = positive_eig(b).rebuild()
    if p < 1 and not dominates(a, b):
        raise PreconditionError("reverse Hölder inequality requires B >> A")
    lhs = float(np.real(np.trace(a @ b)))
    rhs = _schatten_norm(a, p) * _schatten_norm(b, q)
    direction = Direction.LEQ if p > 1 else Direction.GEQ
    logger.debug(f"holder_pair_check: {p=}, {lhs=}, {rhs=}")
    return HolderCheck(lhs, rhs, direction)
