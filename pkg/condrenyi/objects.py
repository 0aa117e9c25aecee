"""Random quantum objects and measurement helpers.

Every generator takes an explicit numpy Generator (or a SeededRng) so that a trial is a pure
function of its parameters and seed.
"""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .divergences import DensityOperator, StateError
from .operators import (
    TOLERANCE,
    ComplexMatrix,
    LayoutError,
    OperatorError,
    SubsystemLayout,
    as_labels,
    local_operator,
    operator_norm,
    operator_power,
    partial_trace,
    positive_eig,
)

__all__ = [
    "ChannelError",
    "KrausChannel",
    "MeasurementError",
    "Povm",
    "PureState",
    "SeededRng",
    "apply",
    "bell_state",
    "classical_state",
    "digest",
    "haar_isometry",
    "haar_unitary",
    "overlap",
    "post_measurement_state",
    "post_measurement_states",
    "purify",
    "random_channel",
    "random_density",
    "random_distribution",
    "random_pure_state",
]

PURE_NORM_TOLERANCE = 1e-12

logger = logging.getLogger(__name__)


class ChannelError(ValueError):
    """Kraus operators do not form a trace-preserving map"""

    pass


class MeasurementError(ValueError):
    """POVM elements are invalid or do not fit the measured subsystem"""

    pass


@dataclass(frozen=True)
class SeededRng:
    """A seed for numpy's PCG64 generator; child(index) derives independent trial streams"""

    seed: int
    algorithm: str = "PCG64"

    def __post_init__(self):
        if int(self.seed) < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")
        if self.algorithm != "PCG64":
            raise ValueError(f"unsupported generator {self.algorithm!r}")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(int(self.seed)))

    def child(self, index: int) -> SeededRng:
        """Stream for trial index, a function of (seed, index) only"""
        state = np.random.SeedSequence([int(self.seed), int(index)]).generate_state(1, dtype=np.uint64)
        return SeededRng(int(state[0]), self.algorithm)


RngLike = Union[SeededRng, np.random.Generator]


def _generator(rng: RngLike) -> np.random.Generator:
    return rng.generator() if isinstance(rng, SeededRng) else rng


def digest(*arrays: npt.ArrayLike) -> str:
    """Short content hash of the arrays, used to identify trial inputs"""
    h = hashlib.sha256()
    for array in arrays:
        h.update(np.ascontiguousarray(np.asarray(array, dtype=np.complex128)).tobytes())
    return h.hexdigest()[:16]


def _ginibre(rows: int, cols: int, rng: np.random.Generator) -> ComplexMatrix:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / math.sqrt(2)


def haar_unitary(dim: int, rng: RngLike) -> ComplexMatrix:
    """Haar unitary from the QR decomposition of a Ginibre matrix with R's phases removed"""
    q, r = scipy.linalg.qr(_ginibre(dim, dim, _generator(rng)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_isometry(dim_in: int, dim_out: int, rng: RngLike) -> ComplexMatrix:
    """First dim_in columns of a Haar unitary on dim_out"""
    if dim_out < dim_in:
        raise LayoutError(f"no isometry from dimension {dim_in} into {dim_out}")
    return haar_unitary(dim_out, rng)[:, :dim_in]


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector with a subsystem layout"""

    vector: npt.NDArray[np.complex128]
    layout: SubsystemLayout

    def __post_init__(self):
        vector = np.asarray(self.vector, dtype=np.complex128).reshape(-1)
        self.layout.check(vector.shape[0])
        norm = float(np.linalg.norm(vector))
        if abs(norm - 1) > PURE_NORM_TOLERANCE:
            raise StateError(f"pure state must have unit norm, got {norm!r}")
        object.__setattr__(self, "vector", vector)

    def density(self) -> DensityOperator:
        return DensityOperator(np.outer(self.vector, self.vector.conj()), self.layout)

    def marginal(self, keep: str | Sequence[str]) -> DensityOperator:
        """Reduced state on keep (layout order) computed from the amplitude matrix"""
        kept = self.layout.select(keep)
        axes = [self.layout.index(label) for label in kept.labels]
        rest = [i for i in range(len(self.layout.dims)) if i not in axes]
        amplitudes = self.vector.reshape(self.layout.dims).transpose(axes + rest)
        amplitudes = amplitudes.reshape(kept.dim, -1)
        return DensityOperator(amplitudes @ amplitudes.conj().T, kept)

    def apply_isometry(
        self, isometry: npt.ArrayLike, label: str, out_dim: int, env_label: str
    ) -> PureState:
        """Apply V: label → label' ⊗ env with label' of dimension out_dim; env is appended last"""
        v = np.asarray(isometry, dtype=np.complex128)
        i = self.layout.index(label)
        if v.shape[1] != self.layout.dims[i] or v.shape[0] % out_dim:
            raise LayoutError(f"isometry of shape {v.shape} does not fit {label!r} -> {out_dim} x env")
        env_dim = v.shape[0] // out_dim
        t = self.vector.reshape(self.layout.dims)
        t = np.tensordot(t, v.reshape(out_dim, env_dim, v.shape[1]), axes=([i], [2]))
        t = np.moveaxis(t, -2, i)
        layout = self.layout.replace(label, out_dim).append(env_label, env_dim)
        return PureState(t.reshape(-1), layout)


def bell_state(labels: Sequence[str] = ("A", "B")) -> PureState:
    """(|00⟩ + |11⟩)/√2"""
    vector = np.zeros(4, dtype=np.complex128)
    vector[0] = vector[3] = 1 / math.sqrt(2)
    return PureState(vector, SubsystemLayout(tuple(labels), (2, 2)))


def random_pure_state(layout: SubsystemLayout | Sequence[int], rng: RngLike) -> PureState:
    """Haar-random pure state: normalized complex Gaussian amplitudes"""
    if not isinstance(layout, SubsystemLayout):
        layout = SubsystemLayout.from_dims(tuple(layout))
    if layout.dim == 1:
        return PureState(np.ones(1, dtype=np.complex128), layout)
    g = _ginibre(layout.dim, 1, _generator(rng)).reshape(-1)
    return PureState(g / np.linalg.norm(g), layout)


def random_density(
    layout: SubsystemLayout | Sequence[int] | int, rank: int | None, rng: RngLike
) -> DensityOperator:
    """Random state of the given rank: marginal of a Haar pure state on dim × rank

    rank None gives the full-rank Hilbert-Schmidt ensemble.
    """
    if isinstance(layout, int):
        layout = SubsystemLayout.from_dims((layout,))
    elif not isinstance(layout, SubsystemLayout):
        layout = SubsystemLayout.from_dims(tuple(layout))
    rank = layout.dim if rank is None else rank
    if not 1 <= rank <= layout.dim:
        raise ValueError(f"rank must lie in [1, {layout.dim}], got {rank}")
    psi = random_pure_state((layout.dim, rank), rng)
    amplitudes = psi.vector.reshape(layout.dim, rank)
    return DensityOperator(amplitudes @ amplitudes.conj().T, layout)


def purify(rho: DensityOperator, env_label: str = "R") -> PureState:
    """Σ √ν_i |i⟩|i⟩ over the support of rho; the environment has dimension rank(rho)"""
    decomposition = positive_eig(rho.op)
    mask = decomposition.support
    weights = np.sqrt(decomposition.eigenvalues[mask])
    vectors = decomposition.eigenvectors[:, mask]
    rank = int(np.count_nonzero(mask))
    amplitudes = vectors * weights
    vector = amplitudes.reshape(-1)
    vector = vector / np.linalg.norm(vector)
    return PureState(vector, rho.layout.append(env_label, rank))


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Completely positive trace-preserving map given by its Kraus operators"""

    kraus_ops: tuple[ComplexMatrix, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=np.complex128) for k in self.kraus_ops)
        if not ops:
            raise ChannelError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.ndim != 2 or k.shape != shape for k in ops):
            raise ChannelError("Kraus operators must be matrices of one common shape")
        completeness = sum(k.conj().T @ k for k in ops)
        deviation = float(np.max(np.abs(completeness - np.eye(shape[1]))))
        if deviation > TOLERANCE:
            raise ChannelError(f"Kraus operators are not trace preserving: {deviation=:.3e}")
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def dim_in(self) -> int:
        return self.kraus_ops[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus_ops[0].shape[0]

    @classmethod
    def identity(cls, dim: int) -> KrausChannel:
        return cls((np.eye(dim),))

    @classmethod
    def depolarizing(cls, dim: int) -> KrausChannel:
        """Full depolarization ρ ↦ tr(ρ) 1/d with Kraus operators |i⟩⟨j|/√d"""
        ops = []
        for i in range(dim):
            for j in range(dim):
                k = np.zeros((dim, dim), dtype=np.complex128)
                k[i, j] = 1 / math.sqrt(dim)
                ops.append(k)
        return cls(tuple(ops))

    @classmethod
    def from_isometry(cls, isometry: npt.ArrayLike, dim_out: int) -> KrausChannel:
        """Kraus operators (1 ⊗ ⟨e|) V of an isometry V: in → out ⊗ env"""
        v = np.asarray(isometry, dtype=np.complex128)
        if v.shape[0] % dim_out:
            raise ChannelError(f"isometry with {v.shape[0]} rows does not factor through {dim_out}")
        env = v.shape[0] // dim_out
        blocks = v.reshape(dim_out, env, v.shape[1])
        return cls(tuple(blocks[:, e, :] for e in range(env)))

    def stinespring(self) -> ComplexMatrix:
        """Isometry V: in → out ⊗ env with env indexing the Kraus operators"""
        return np.stack(self.kraus_ops, axis=1).reshape(self.dim_out * len(self.kraus_ops), self.dim_in)

    def apply_matrix(self, matrix: npt.ArrayLike) -> ComplexMatrix:
        m = np.asarray(matrix, dtype=np.complex128)
        return sum(k @ m @ k.conj().T for k in self.kraus_ops)


def random_channel(
    dim_in: int, dim_out: int, env_dim: int | None, rng: RngLike
) -> KrausChannel:
    """Channel from a Haar isometry in → out ⊗ env; env defaults to dim_in"""
    env_dim = env_dim or dim_in
    if min(dim_in, dim_out, env_dim) < 1:
        raise ChannelError(f"channel dimensions must be positive: {dim_in=}, {dim_out=}, {env_dim=}")
    return KrausChannel.from_isometry(haar_isometry(dim_in, dim_out * env_dim, rng), dim_out)


def apply(
    channel: KrausChannel,
    rho: DensityOperator,
    on: str,
    layout: SubsystemLayout | None = None,
) -> DensityOperator:
    """Apply the channel to one subsystem of rho"""
    layout = layout or rho.layout
    i = layout.index(on)
    if channel.dim_in != layout.dims[i]:
        raise ChannelError(
            f"channel takes dimension {channel.dim_in}, subsystem {on!r} has {layout.dims[i]}"
        )
    out = sum(
        lifted @ rho.op @ lifted.conj().T
        for lifted in (local_operator(k, layout, on) for k in channel.kraus_ops)
    )
    return DensityOperator(out, layout.replace(on, channel.dim_out))


@dataclass(frozen=True, eq=False)
class Povm:
    """Positive operators summing to the identity"""

    elements: tuple[ComplexMatrix, ...]

    def __post_init__(self):
        if not self.elements:
            raise MeasurementError("a POVM needs at least one element")
        elements = []
        for index, element in enumerate(self.elements):
            try:
                elements.append(positive_eig(element).rebuild())
            except OperatorError as e:
                raise MeasurementError(f"POVM element {index} is not positive: {e}") from e
        dims = {e.shape[0] for e in elements}
        if len(dims) != 1:
            raise MeasurementError(f"POVM elements have different dimensions: {sorted(dims)}")
        deviation = float(np.max(np.abs(sum(elements) - np.eye(dims.pop()))))
        if deviation > TOLERANCE:
            raise MeasurementError(f"POVM elements do not sum to the identity: {deviation=:.3e}")
        object.__setattr__(self, "elements", tuple(elements))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)

    @classmethod
    def from_basis(cls, unitary: npt.ArrayLike) -> Povm:
        """Projective measurement onto the columns of a unitary"""
        u = np.asarray(unitary, dtype=np.complex128)
        return cls(tuple(np.outer(u[:, k], u[:, k].conj()) for k in range(u.shape[1])))

    @classmethod
    def computational(cls, dim: int) -> Povm:
        return cls.from_basis(np.eye(dim))

    @classmethod
    def fourier(cls, dim: int) -> Povm:
        """Discrete Fourier basis, overlap 1/√d with the computational basis"""
        k = np.arange(dim)
        return cls.from_basis(np.exp(2j * np.pi * np.outer(k, k) / dim) / math.sqrt(dim))

    @classmethod
    def trivial(cls, dim: int) -> Povm:
        return cls((np.eye(dim),))


def overlap(m: Povm, n: Povm) -> float:
    """c = max over element pairs of ‖√M_x √N_y‖"""
    if m.dim != n.dim:
        raise MeasurementError(f"POVMs act on different dimensions: {m.dim} and {n.dim}")
    roots_m = [operator_power(e, 0.5) for e in m.elements]
    roots_n = [operator_power(e, 0.5) for e in n.elements]
    return max(operator_norm(a @ b) for a in roots_m for b in roots_n)


def post_measurement_state(
    state: PureState | DensityOperator,
    povm: Povm,
    measured: str = "A",
    keep: str | Sequence[str] = (),
    register: str = "X",
) -> DensityOperator:
    """Classical-quantum state ⊕_x tr_{rest}{(M_x ⊗ 1) ρ} on register ⊗ keep

    M_x acts on the measured subsystem tensored with the identity elsewhere; every
    subsystem other than keep is traced out.
    """
    keep = as_labels(keep)
    layout = state.layout
    if measured in keep:
        raise LayoutError(f"measured subsystem {measured!r} cannot also be kept")
    if povm.dim != layout.dims[layout.index(measured)]:
        raise MeasurementError(
            f"POVM of dimension {povm.dim} cannot measure {measured!r} of dimension {layout.dims[layout.index(measured)]}"
        )
    labels = (measured,) + keep
    rho = state.marginal(labels).reorder(labels)
    part = rho.layout
    blocks = []
    for element in povm.elements:
        root = local_operator(operator_power(element, 0.5), part, measured)
        measured_state = root @ rho.op @ root
        if keep:
            blocks.append(partial_trace(measured_state, part, keep))
        else:
            blocks.append(np.trace(measured_state).reshape(1, 1))
    matrix = scipy.linalg.block_diag(*blocks)
    keep_dims = tuple(part.dims[part.index(label)] for label in keep)
    return DensityOperator(matrix, SubsystemLayout((register,) + keep, (len(povm),) + keep_dims))


def post_measurement_states(
    state: PureState | DensityOperator,
    m: Povm,
    n: Povm,
    measured: str = "A",
    first: str | Sequence[str] = "B",
    second: str | Sequence[str] = "C",
) -> tuple[DensityOperator, DensityOperator]:
    """(ρ_XB, ρ_YC): measure M or N on the measured system, keep first or second"""
    return (
        post_measurement_state(state, m, measured, first, "X"),
        post_measurement_state(state, n, measured, second, "Y"),
    )


def random_distribution(shape: Sequence[int], rng: RngLike) -> npt.NDArray[np.float64]:
    """Joint distribution drawn from the flat Dirichlet distribution"""
    shape = tuple(shape)
    return _generator(rng).dirichlet(np.ones(math.prod(shape))).reshape(shape)


def classical_state(p: npt.ArrayLike, labels: Sequence[str] | None = None) -> DensityOperator:
    """Diagonal density operator of a joint distribution, one subsystem per axis"""
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise StateError("probabilities must be nonnegative")
    return DensityOperator.from_matrix(np.diag(p.reshape(-1)), p.shape, labels)
