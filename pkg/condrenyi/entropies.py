"""Conditional Rényi entropies H(A|B) of multipartite states.

Four variants come from two divergences (original Petz form and sandwiched form) and two
ways of treating the conditioning system: DOWN fixes the reference to 1_A ⊗ ρ_B, UP
optimizes it over 1_A ⊗ σ_B. At α = 1 all four equal the von Neumann conditional entropy.

Every function takes the state, its layout (optional for a DensityOperator), the target
labels and the conditioning labels. Subsystems named in neither are traced out.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Sequence, Union

import numpy as np
import numpy.typing as npt

from .divergences import (
    AlphaKind,
    AlphaLike,
    AlphaParam,
    DensityOperator,
    d_old,
    d_sandwiched,
    renyi_entropy,
    von_neumann_entropy,
)
from .operators import (
    SUPPORT_CUTOFF,
    ComplexMatrix,
    LayoutError,
    SubsystemLayout,
    as_labels,
    eig_hermitian,
    eigenspaces,
    fidelity,
    gram_factor,
    hermitian,
    numerical_rank,
    operator_power,
    partial_trace,
    permute,
    positive_eig,
    support_projector,
)
from .optimize import (
    OptimizerConfig,
    cond_marginal,
    minimize_max_divergence,
    minimize_sandwiched,
)

__all__ = [
    "Arrow",
    "Bipartition",
    "Divergence",
    "EntropyKind",
    "EntropyResult",
    "OptimizerConfig",
    "bipartition",
    "closed_form_optimizer",
    "collision_entropy",
    "conditional_von_neumann",
    "entropy",
    "h_down_old",
    "h_down_sandwiched",
    "h_up_old",
    "h_up_sandwiched",
    "max_entropy_objective",
]

# agreement required between the α = 1/2 optimum and its fidelity form
FIDELITY_CROSS_CHECK = 1e-8

logger = logging.getLogger(__name__)

State = Union[DensityOperator, npt.ArrayLike]
Labels = Union[str, Sequence[str]]


class Divergence(enum.Enum):
    OLD = "old"
    SANDWICHED = "sandwiched"


class Arrow(enum.Enum):
    UP = "up"
    DOWN = "down"


class EntropyKind(enum.Enum):
    """The four conditional entropies, named by divergence and arrow"""

    OLD_DOWN = (Divergence.OLD, Arrow.DOWN)
    OLD_UP = (Divergence.OLD, Arrow.UP)
    SANDWICHED_DOWN = (Divergence.SANDWICHED, Arrow.DOWN)
    SANDWICHED_UP = (Divergence.SANDWICHED, Arrow.UP)

    @property
    def divergence(self) -> Divergence:
        return self.value[0]

    @property
    def arrow(self) -> Arrow:
        return self.value[1]

    @property
    def slug(self) -> str:
        """Command-line name, e.g. "sandwiched-down" """
        return f"{self.divergence.value}-{self.arrow.value}"

    @classmethod
    def parse(cls, text: str) -> EntropyKind:
        normalized = text.strip().lower().replace("_", "-")
        for kind in cls:
            if normalized in (kind.slug, kind.name.lower().replace("_", "-")):
                return kind
        raise ValueError(
            f"unknown entropy kind {text!r}; expected one of {', '.join(k.slug for k in cls)}"
        )


@dataclass
class EntropyResult:
    """Value in bits with the optimizing σ_B for UP entropies that needed one"""

    value: float
    optimizer_sigma: DensityOperator | None = None
    iterations: int | None = None
    converged: bool = True
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def __float__(self) -> float:
        return self.value


class Bipartition(NamedTuple):
    """A state reordered to target ⊗ cond with the dimensions of each side"""

    matrix: ComplexMatrix
    dim_target: int
    dim_cond: int
    cond_layout: SubsystemLayout | None


def bipartition(
    rho: State, layout: SubsystemLayout | None, target: Labels, cond: Labels
) -> Bipartition:
    """Trace out everything but target and cond and order the factors target first

    cond may be empty, giving a trivial conditioning system of dimension 1.
    """
    if isinstance(rho, DensityOperator):
        layout = layout or rho.layout
        matrix = rho.op
    else:
        if layout is None:
            raise LayoutError("a layout is required for a bare matrix")
        matrix = hermitian(rho)
    target = as_labels(target)
    cond = as_labels(cond)
    if not target:
        raise LayoutError("target must name at least one subsystem")
    if overlap := set(target) & set(cond):
        raise LayoutError(f"target and conditioning systems overlap: {sorted(overlap)}")
    keep = target + cond
    reduced = partial_trace(matrix, layout, keep)
    reduced = permute(reduced, layout.select(keep), keep)
    cond_layout = layout.select(cond).reorder(cond) if cond else None
    return Bipartition(reduced, layout.dim_of(target), layout.dim_of(cond), cond_layout)


def _lift(matrix: ComplexMatrix, dim_target: int) -> ComplexMatrix:
    return np.kron(np.eye(dim_target), matrix)


def _cond_state(part: Bipartition, sigma: ComplexMatrix) -> DensityOperator | None:
    if part.cond_layout is None:
        return None
    return DensityOperator(sigma / np.real(np.trace(sigma)), part.cond_layout)


def h_down_old(
    rho: State,
    layout: SubsystemLayout | None,
    target: Labels,
    cond: Labels,
    alpha: AlphaLike,
) -> float:
    """H↓_α(A|B) = -D_α(ρ_AB‖1_A⊗ρ_B)"""
    part = bipartition(rho, layout, target, cond)
    marginal = cond_marginal(part.matrix, part.dim_target, part.dim_cond)
    value = -d_old(part.matrix, _lift(marginal, part.dim_target), alpha)
    logger.debug(f"h_down_old: {alpha=}, {value=}")
    return value


def h_down_sandwiched(
    rho: State,
    layout: SubsystemLayout | None,
    target: Labels,
    cond: Labels,
    alpha: AlphaLike,
) -> float:
    """H̃↓_α(A|B) = -D̃_α(ρ_AB‖1_A⊗ρ_B)

    α = 2 is the conditional collision entropy and α = ∞ the min-entropy relative to ρ_B.
    """
    part = bipartition(rho, layout, target, cond)
    marginal = cond_marginal(part.matrix, part.dim_target, part.dim_cond)
    value = -d_sandwiched(part.matrix, _lift(marginal, part.dim_target), alpha)
    logger.debug(f"h_down_sandwiched: {alpha=}, {value=}")
    return value


def _von_neumann_result(part: Bipartition) -> EntropyResult:
    marginal = cond_marginal(part.matrix, part.dim_target, part.dim_cond)
    value = von_neumann_entropy(part.matrix) - von_neumann_entropy(marginal)
    return EntropyResult(value, _cond_state(part, marginal))


def conditional_von_neumann(
    rho: State, layout: SubsystemLayout | None, target: Labels, cond: Labels
) -> float:
    """H(A|B) = H(AB) - H(B)"""
    return _von_neumann_result(bipartition(rho, layout, target, cond)).value


def collision_entropy(
    rho: State, layout: SubsystemLayout | None, target: Labels, cond: Labels
) -> float:
    """-log₂ tr (ρ_AB (1_A⊗ρ_B^{-1/2}))², the conditional collision entropy"""
    part = bipartition(rho, layout, target, cond)
    marginal = cond_marginal(part.matrix, part.dim_target, part.dim_cond)
    product = part.matrix @ _lift(operator_power(marginal, -0.5), part.dim_target)
    return -math.log2(float(np.real(np.trace(product @ product))))


def max_entropy_objective(
    rho: State,
    layout: SubsystemLayout | None,
    target: Labels,
    cond: Labels,
    sigma: DensityOperator | npt.ArrayLike,
) -> float:
    """2 log₂ F(ρ_AB, 1_A⊗σ_B), whose supremum over σ_B is the max-entropy"""
    part = bipartition(rho, layout, target, cond)
    sigma = sigma.op if isinstance(sigma, DensityOperator) else hermitian(sigma)
    return 2 * math.log2(fidelity(part.matrix, _lift(sigma, part.dim_target)))


def _closed_form_root(part: Bipartition, alpha: float) -> tuple[ComplexMatrix, float]:
    """(tr_A ρ^α)^{1/α} / λmax and log₂ λmax, evaluated through singular values

    ρ is scaled by its largest eigenvalue so that large α stays representable, and
    tr_A ρ^α = W W† with W the target blocks of a Gram factor of ρ^α placed side by side.
    """
    top = float(eig_hermitian(part.matrix).eigenvalues[0])
    factor = gram_factor(part.matrix / top, alpha)
    rank = factor.shape[1]
    w = factor.reshape(part.dim_target, part.dim_cond, rank).transpose(1, 0, 2)
    w = w.reshape(part.dim_cond, part.dim_target * rank)
    u, singular, _ = np.linalg.svd(w, full_matrices=False)
    keep = singular > SUPPORT_CUTOFF * singular[0]
    u, singular = u[:, keep], singular[keep]
    root = (u * singular ** (2 / alpha)) @ u.conj().T
    return root, math.log2(top)


def closed_form_optimizer(
    rho: State,
    layout: SubsystemLayout | None,
    target: Labels,
    cond: Labels,
    alpha: AlphaLike,
) -> DensityOperator:
    """The maximizing σ_B = (tr_A ρ^α)^{1/α} / tr (tr_A ρ^α)^{1/α} of the UP-old entropy"""
    alpha = AlphaParam.of(alpha)
    if not alpha.is_finite:
        raise ValueError(f"the closed-form optimizer needs a finite alpha, got {alpha}")
    part = bipartition(rho, layout, target, cond)
    if part.cond_layout is None:
        raise LayoutError("the closed-form optimizer needs a conditioning system")
    root, _ = _closed_form_root(part, alpha.value)
    return _cond_state(part, root)


def _h_up_old_infinity(part: Bipartition) -> float:
    """α → ∞ limit of the closed form

    Eigenspaces of ρ_AB are taken by decreasing eigenvalue; each eigenvalue counts with the
    rank it adds to the support of the conditioning marginal of the spaces so far.
    """
    total = 0.0
    rank = 0
    columns = np.zeros((part.dim_cond, 0), dtype=np.complex128)
    for value, vectors in eigenspaces(part.matrix):
        if value <= 0 or rank == part.dim_cond:
            break
        k = vectors.shape[1]
        block = vectors.reshape(part.dim_target, part.dim_cond, k).transpose(1, 0, 2)
        columns = np.hstack([columns, block.reshape(part.dim_cond, part.dim_target * k)])
        new_rank = numerical_rank(columns)
        total += value * (new_rank - rank)
        rank = new_rank
    return -math.log2(total)


def h_up_old(
    rho: State,
    layout: SubsystemLayout | None,
    target: Labels,
    cond: Labels,
    alpha: AlphaLike,
) -> EntropyResult:
    """H↑_α(A|B) = sup_σ -D_α(ρ_AB‖1_A⊗σ_B) in closed form

    For finite α the value is α/(1-α) log₂ tr (tr_A ρ^α)^{1/α} and the maximizer is
    returned. α = 0 gives log₂ λmax(tr_A Π_ρ), α = 1 the von Neumann conditional entropy
    and α = ∞ the exact limit of the closed form.
    """
    alpha = AlphaParam.of(alpha)
    part = bipartition(rho, layout, target, cond)
    match alpha.kind:
        case AlphaKind.ZERO:
            marginal = cond_marginal(support_projector(part.matrix), part.dim_target, part.dim_cond)
            return EntropyResult(math.log2(eig_hermitian(marginal).eigenvalues[0]))
        case AlphaKind.ONE:
            return _von_neumann_result(part)
        case AlphaKind.INFINITY:
            return EntropyResult(_h_up_old_infinity(part))
    a = alpha.value
    root, log_scale = _closed_form_root(part, a)
    total = float(np.real(np.trace(root)))
    value = a / (1 - a) * (log_scale + math.log2(total))
    logger.debug(f"h_up_old: {a=}, {value=}")
    return EntropyResult(value, _cond_state(part, root))


def _h_up_sandwiched_zero(part: Bipartition) -> EntropyResult:
    """α → 0 limit: log₂ of the generic rank of Π_ρ (1_A⊗|b⟩)"""
    projector = support_projector(part.matrix)
    candidates = list(np.eye(part.dim_cond, dtype=np.complex128))
    rng = np.random.default_rng(0)
    generic = rng.standard_normal(part.dim_cond) + 1j * rng.standard_normal(part.dim_cond)
    candidates.append(generic / np.linalg.norm(generic))
    best = 0
    for vector in candidates:
        columns = projector @ np.kron(np.eye(part.dim_target), vector.reshape(-1, 1))
        best = max(best, numerical_rank(columns))
    return EntropyResult(
        math.log2(best), diagnostics={"interpretation": "alpha-zero-limit"}
    )


def h_up_sandwiched(
    rho: State,
    layout: SubsystemLayout | None,
    target: Labels,
    cond: Labels,
    alpha: AlphaLike,
    config: OptimizerConfig | None = None,
) -> EntropyResult:
    """H̃↑_α(A|B) = sup_σ -D̃_α(ρ_AB‖1_A⊗σ_B) by numerical optimization over σ_B

    α = 1/2 gives the max-entropy and is cross-checked against its fidelity form; α = ∞
    gives the min-entropy. Below α = 1/2 the objective need not be convex and the result is
    marked best-effort. Non-convergence is reported in the result, never raised.
    """
    alpha = AlphaParam.of(alpha)
    config = config or OptimizerConfig()
    part = bipartition(rho, layout, target, cond)
    if part.dim_cond == 1:
        value = renyi_entropy(part.matrix, alpha)
        return EntropyResult(value, _cond_state(part, np.ones((1, 1))))
    match alpha.kind:
        case AlphaKind.ONE:
            return _von_neumann_result(part)
        case AlphaKind.ZERO:
            return _h_up_sandwiched_zero(part)
        case AlphaKind.INFINITY:
            result = minimize_max_divergence(part.matrix, part.dim_target, part.dim_cond, config)
        case _:
            result = minimize_sandwiched(
                part.matrix, part.dim_target, part.dim_cond, alpha.value, config
            )
    diagnostics: dict[str, Any] = {"restart_values": [-v for v in result.restart_values]}
    converged = result.converged
    if alpha.is_finite and alpha.value < 0.5:
        diagnostics["best_effort"] = True
    if alpha.is_finite and alpha.value == 0.5:
        via_fidelity = 2 * math.log2(fidelity(part.matrix, _lift(result.sigma, part.dim_target)))
        residual = abs(via_fidelity + result.value)
        diagnostics["fidelity_residual"] = residual
        if residual > FIDELITY_CROSS_CHECK:
            logger.warning(f"h_up_sandwiched: fidelity form disagrees by {residual:.3e}")
            converged = False
    sigma = _cond_state(part, positive_eig(result.sigma).rebuild())
    logger.debug(f"h_up_sandwiched: {alpha=}, value={-result.value}, {converged=}")
    return EntropyResult(-result.value, sigma, result.iterations, converged, diagnostics)


def entropy(
    kind: EntropyKind,
    rho: State,
    layout: SubsystemLayout | None,
    target: Labels,
    cond: Labels,
    alpha: AlphaLike,
    config: OptimizerConfig | None = None,
) -> EntropyResult:
    """Evaluate one of the four conditional entropies; DOWN results carry only a value"""
    match kind:
        case EntropyKind.OLD_DOWN:
            return EntropyResult(h_down_old(rho, layout, target, cond, alpha))
        case EntropyKind.SANDWICHED_DOWN:
            return EntropyResult(h_down_sandwiched(rho, layout, target, cond, alpha))
        case EntropyKind.OLD_UP:
            return h_up_old(rho, layout, target, cond, alpha)
        case EntropyKind.SANDWICHED_UP:
            return h_up_sandwiched(rho, layout, target, cond, alpha, config)
    raise ValueError(f"unknown entropy kind {kind!r}")
