"""Minimization of sandwiched divergences over density operators of the conditioning system.

minimize_sandwiched() runs projected gradient descent on σ ↦ D̃_α(ρ_AB‖1_A⊗σ_B) over the
density simplex, restarted from several points. minimize_max_divergence() handles α = ∞ by a
log-det barrier method on the epigraph form min tr τ subject to 1_A⊗τ ≥ ρ_AB.

Both work on the support of ρ_B: σ_B is optimized on that support and embedded back.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Any

import numpy as np
import scipy.linalg

from .operators import (
    SUPPORT_CUTOFF,
    ComplexMatrix,
    SubsystemLayout,
    gram_factor,
    operator_norm,
    operator_power,
    partial_trace,
    support_basis,
)

__all__ = [
    "EIGENVALUE_FLOOR",
    "OptimizationResult",
    "OptimizerConfig",
    "STEP_RULES",
    "SandwichedObjective",
    "hermitian_basis",
    "minimize_max_divergence",
    "minimize_sandwiched",
    "project_to_states",
]

STEP_RULES = ("barzilai-borwein", "backtracking")

# every iterate keeps its eigenvalues at or above this floor
EIGENVALUE_FLOOR = 1e-12

# sufficient-decrease constant of the Armijo test
ARMIJO = 1e-4

# extra seeded pure and mixed starting points for α < 1/2
NONCONVEX_STARTS = 2

MIN_STEP = 1e-16
MAX_STEP = 1e8

# barrier weight multiplier between centering rounds
BARRIER_GROWTH = 10.0

NEWTON_TOLERANCE = 1e-12
NEWTON_MAX_STEPS = 60

# half the squared Newton decrement accepted as centered when the line search stalls
APPROXIMATE_CENTER = 1e-6

# the barrier stops once its duality gap is this fraction of tolerance · tr τ
BARRIER_GAP_FACTOR = 1e-1

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for the minimization over σ_B

    Attributes:
        max_iterations: iteration budget per restart (Newton steps in total for α = ∞)
        tolerance: relative objective change for descent, relative duality gap for the barrier
        restarts: number of starting points (marginal, maximally mixed, closed-form guess, then
            seeded random states); below α = 1/2 pure and random starts are added
        step_rule: "barzilai-borwein" or "backtracking"
    """

    max_iterations: int = 3000
    tolerance: float = 1e-9
    restarts: int = 3
    step_rule: str = "barzilai-borwein"

    def __post_init__(self):
        if int(self.max_iterations) < 1:
            raise ValueError(f"max_iterations must be at least 1, got {self.max_iterations}")
        if not float(self.tolerance) > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if int(self.restarts) < 1:
            raise ValueError(f"restarts must be at least 1, got {self.restarts}")
        if self.step_rule not in STEP_RULES:
            raise ValueError(f"step_rule must be one of {STEP_RULES}, got {self.step_rule!r}")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> OptimizerConfig:
        """Build from a config table, ignoring unknown keys"""
        names = {f.name for f in fields(cls)}
        if unknown := sorted(set(data) - names):
            logger.warning(f"from_dict: ignoring unknown optimizer settings {unknown}")
        return cls(**{key: value for key, value in data.items() if key in names})

    def asdict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class OptimizationResult:
    """Minimizer σ_B and the minimized divergence in bits"""

    sigma: ComplexMatrix
    value: float
    iterations: int
    converged: bool
    restart_values: list[float] = field(default_factory=list)


def cond_marginal(matrix: ComplexMatrix, dim_target: int, dim_cond: int) -> ComplexMatrix:
    """tr_A of an operator on A ⊗ B with A first"""
    layout = SubsystemLayout(("target", "cond"), (dim_target, dim_cond))
    return partial_trace(matrix, layout, "cond")


def _lift(matrix: ComplexMatrix, dim_target: int) -> ComplexMatrix:
    return np.kron(np.eye(dim_target), matrix)


def _project_simplex(values: np.ndarray, total: float) -> np.ndarray:
    """Euclidean projection of a real vector onto {x ≥ 0, Σx = total}"""
    ordered = np.sort(values)[::-1]
    excess = np.cumsum(ordered) - total
    index = np.arange(1, len(values) + 1)
    active = ordered - excess / index > 0
    count = index[active][-1]
    theta = excess[active][-1] / count
    return np.maximum(values - theta, 0.0)


def project_to_states(matrix: ComplexMatrix, floor: float = EIGENVALUE_FLOOR) -> ComplexMatrix:
    """Frobenius-nearest density operator whose eigenvalues are all at least floor"""
    m = (matrix + matrix.conj().T) / 2
    values, vectors = scipy.linalg.eigh(m)
    n = len(values)
    projected = _project_simplex(values - floor, 1 - n * floor) + floor
    return (vectors * projected) @ vectors.conj().T


def _first_divided_differences(values: np.ndarray, exponent: float) -> np.ndarray:
    """Matrix of (f(x_i) - f(x_j)) / (x_i - x_j) for f(x) = x^exponent, f' on the diagonal"""
    xi = values[:, None]
    xj = values[None, :]
    diff = xi - xj
    close = np.abs(diff) <= 1e-8 * np.maximum(xi, xj)
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = (xi**exponent - xj**exponent) / diff
    midpoint = (xi + xj) / 2
    return np.where(close, exponent * midpoint ** (exponent - 1), quotient)


class SandwichedObjective:
    """σ ↦ D̃_α(ρ‖1_A⊗σ) on positive definite σ of the conditioning system, with gradient

    With S = σ^γ, γ = (1-α)/2α, and ρ = R R†, the trace functional is
    Q = tr (R† (1⊗S)² R)^α and the divergence is log₂ Q / (α-1).
    """

    def __init__(self, rho: ComplexMatrix, dim_target: int, dim_cond: int, alpha: float):
        self.alpha = alpha
        self.gamma = (1 - alpha) / (2 * alpha)
        self.dim_target = dim_target
        self.dim_cond = dim_cond
        self.factor = gram_factor(rho)

    def _power(self, sigma: ComplexMatrix) -> tuple[np.ndarray, ComplexMatrix, ComplexMatrix]:
        values, vectors = scipy.linalg.eigh((sigma + sigma.conj().T) / 2)
        values = np.clip(values, EIGENVALUE_FLOOR, None)
        power = (vectors * values**self.gamma) @ vectors.conj().T
        return values, vectors, power

    def value(self, sigma: ComplexMatrix) -> float:
        _, _, power = self._power(sigma)
        y = _lift(power, self.dim_target) @ self.factor
        singular = scipy.linalg.svdvals(y)
        singular = singular[singular > SUPPORT_CUTOFF * singular[0]]
        return math.log2(float(np.sum(singular ** (2 * self.alpha)))) / (self.alpha - 1)

    def value_and_gradient(self, sigma: ComplexMatrix) -> tuple[float, ComplexMatrix]:
        a = self.alpha
        values, vectors, power = self._power(sigma)
        lifted = _lift(power, self.dim_target)
        y = lifted @ self.factor
        _, singular, vh = scipy.linalg.svd(y, full_matrices=False)
        keep = singular > SUPPORT_CUTOFF * singular[0]
        singular, vh = singular[keep], vh[keep]
        q = float(np.sum(singular ** (2 * a)))

        # dQ = tr G d(1⊗S) with G = α(S̃K + KS̃), K = R (R†S̃²R)^{α-1} R†
        gram_power = (vh.conj().T * singular ** (2 * (a - 1))) @ vh
        k = self.factor @ gram_power @ self.factor.conj().T
        g_lifted = a * (lifted @ k + k @ lifted)
        g_power = cond_marginal(g_lifted, self.dim_target, self.dim_cond)

        rotated = vectors.conj().T @ g_power @ vectors
        g_sigma = vectors @ (_first_divided_differences(values, self.gamma) * rotated) @ vectors.conj().T
        gradient = g_sigma / ((a - 1) * q * math.log(2))
        return math.log2(q) / (a - 1), (gradient + gradient.conj().T) / 2


def _gradient_mapping(sigma: ComplexMatrix, gradient: ComplexMatrix) -> float:
    return float(np.linalg.norm(sigma - project_to_states(sigma - gradient)))


def _descend(
    objective: SandwichedObjective, start: ComplexMatrix, config: OptimizerConfig
) -> OptimizationResult:
    """Projected gradient descent with Armijo backtracking from one starting point"""
    sigma = project_to_states(start)
    value, gradient = objective.value_and_gradient(sigma)
    step = 1.0
    previous: tuple[ComplexMatrix, ComplexMatrix] | None = None
    converged = False
    iterations = 0
    stationarity = math.sqrt(config.tolerance)
    for iterations in range(1, config.max_iterations + 1):
        if config.step_rule == "barzilai-borwein" and previous is not None:
            s = sigma - previous[0]
            y = gradient - previous[1]
            sy = float(np.real(np.vdot(s, y)))
            step = float(np.real(np.vdot(s, s))) / sy if sy > 0 else 2 * step
        else:
            step = 2 * step
        step = min(max(step, MIN_STEP), MAX_STEP)

        candidate = None
        while step >= MIN_STEP:
            trial = project_to_states(sigma - step * gradient)
            decrease = float(np.real(np.vdot(gradient, sigma - trial)))
            trial_value = objective.value(trial)
            if trial_value <= value - ARMIJO * decrease:
                candidate = trial
                break
            step /= 2
        if candidate is None:
            # no representable descent left
            converged = _gradient_mapping(sigma, gradient) <= 10 * stationarity
            break

        previous = (sigma, gradient)
        change = value - trial_value
        sigma = candidate
        value, gradient = objective.value_and_gradient(sigma)
        if (
            change <= config.tolerance * max(1.0, abs(value))
            and _gradient_mapping(sigma, gradient) <= stationarity
        ):
            converged = True
            break
    logger.debug(f"_descend: {value=}, {iterations=}, {converged=}")
    return OptimizationResult(sigma, value, iterations, converged)


def _random_state(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    w = g @ g.conj().T
    return w / np.real(np.trace(w))


def _random_pure_state(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return np.outer(v, v.conj()) / np.real(np.vdot(v, v))


def _starting_points(
    rho: ComplexMatrix, dim_target: int, dim_cond: int, alpha: float, count: int
) -> list[ComplexMatrix]:
    """count starting points, plus pure and random extras when α < 1/2

    Below 1/2 the objective is not convex in σ and the first three points coincide for
    symmetric states, where they can sit on a stationary point that is not the minimum.
    """
    marginal = cond_marginal(rho, dim_target, dim_cond)
    closed_form = operator_power(cond_marginal(operator_power(rho, alpha), dim_target, dim_cond), 1 / alpha)
    closed_form = closed_form / np.real(np.trace(closed_form))
    points = [marginal, np.eye(dim_cond) / dim_cond, closed_form]
    for index in range(len(points), count):
        points.append(_random_state(dim_cond, np.random.default_rng(index)))
    points = points[:count]
    if alpha < 0.5:
        _, vectors = scipy.linalg.eigh(marginal)
        points.append(np.outer(vectors[:, -1], vectors[:, -1].conj()))
        rng = np.random.default_rng(count)
        for _ in range(NONCONVEX_STARTS):
            points.append(_random_pure_state(dim_cond, rng))
            points.append(_random_state(dim_cond, rng))
    return points


def _support_reduction(
    rho: ComplexMatrix, dim_target: int, dim_cond: int
) -> tuple[ComplexMatrix, ComplexMatrix]:
    """Basis W of supp ρ_B and ρ compressed to A ⊗ supp ρ_B"""
    basis = support_basis(cond_marginal(rho, dim_target, dim_cond))
    lifted = _lift(basis, dim_target)
    return basis, lifted.conj().T @ rho @ lifted


def minimize_sandwiched(
    rho: ComplexMatrix,
    dim_target: int,
    dim_cond: int,
    alpha: float,
    config: OptimizerConfig | None = None,
) -> OptimizationResult:
    """Minimize D̃_α(ρ‖1_A⊗σ) over density operators σ for finite α

    The result keeps the best restart; converged reports whether that restart met the
    stopping rule within its iteration budget.
    """
    config = config or OptimizerConfig()
    basis, reduced = _support_reduction(rho, dim_target, dim_cond)
    rank = basis.shape[1]
    if rank == 1:
        sigma = np.ones((1, 1), dtype=np.complex128)
        value = SandwichedObjective(reduced, dim_target, 1, alpha).value(sigma)
        return OptimizationResult(basis @ basis.conj().T, value, 0, True, [value])

    objective = SandwichedObjective(reduced, dim_target, rank, alpha)
    best: OptimizationResult | None = None
    values = []
    iterations = 0
    for start in _starting_points(reduced, dim_target, rank, alpha, config.restarts):
        result = _descend(objective, start, config)
        values.append(result.value)
        iterations += result.iterations
        if best is None or result.value < best.value:
            best = result
    if not best.converged:
        logger.warning(f"minimize_sandwiched: not converged at {alpha=}, best value {best.value}")
    sigma = basis @ best.sigma @ basis.conj().T
    return OptimizationResult(sigma, best.value, iterations, best.converged, values)


def hermitian_basis(dim: int) -> list[ComplexMatrix]:
    """Hilbert-Schmidt orthonormal basis of the d×d Hermitian matrices"""
    basis = []
    for j in range(dim):
        e = np.zeros((dim, dim), dtype=np.complex128)
        e[j, j] = 1
        basis.append(e)
    for j in range(dim):
        for k in range(j + 1, dim):
            real = np.zeros((dim, dim), dtype=np.complex128)
            real[j, k] = real[k, j] = 1 / math.sqrt(2)
            imag = np.zeros((dim, dim), dtype=np.complex128)
            imag[j, k] = -1j / math.sqrt(2)
            imag[k, j] = 1j / math.sqrt(2)
            basis.extend((real, imag))
    return basis


class _Barrier:
    """t tr τ - log det(1_A⊗τ - ρ) on the Hermitian coordinates of τ"""

    def __init__(self, rho: ComplexMatrix, dim_target: int, dim_cond: int):
        self.rho = rho
        self.dim_target = dim_target
        self.basis = np.array(hermitian_basis(dim_cond))
        self.lifted = np.array([_lift(e, dim_target) for e in self.basis])
        self.traces = np.real(np.einsum("kii->k", self.basis))

    def slack(self, tau: ComplexMatrix) -> ComplexMatrix:
        return _lift(tau, self.dim_target) - self.rho

    def value(self, tau: ComplexMatrix, t: float) -> float:
        eigenvalues = np.linalg.eigvalsh(self.slack(tau))
        if eigenvalues[0] <= 0:
            return math.inf
        return t * float(np.real(np.trace(tau))) - float(np.sum(np.log(eigenvalues)))

    def newton_direction(self, tau: ComplexMatrix, t: float) -> tuple[ComplexMatrix, float]:
        """Newton step on τ and the squared Newton decrement"""
        eigenvalues, vectors = np.linalg.eigh(self.slack(tau))
        inverse = (vectors / eigenvalues) @ vectors.conj().T
        f = np.einsum("ij,kjl->kil", inverse, self.lifted)
        gradient = t * self.traces - np.real(np.einsum("kii->k", f))
        hessian = np.real(np.einsum("kij,lji->kl", f, f))
        delta = scipy.linalg.solve(hessian, -gradient, assume_a="pos")
        return np.tensordot(delta, self.basis, axes=1), float(-gradient @ delta)


def _center(
    barrier: _Barrier, tau: ComplexMatrix, t: float, budget: int
) -> tuple[ComplexMatrix, int, bool]:
    """Damped Newton iterations on the barrier at weight t"""
    steps = 0
    decrement = math.inf
    while steps < min(budget, NEWTON_MAX_STEPS):
        try:
            direction, decrement = barrier.newton_direction(tau, t)
        except np.linalg.LinAlgError:
            return tau, steps, False
        if decrement / 2 <= NEWTON_TOLERANCE:
            return tau, steps, True
        current = barrier.value(tau, t)
        step = 1.0
        while step > MIN_STEP:
            candidate = tau + step * direction
            if barrier.value(candidate, t) <= current - 0.25 * step * decrement:
                break
            step /= 2
        else:
            return tau, steps, decrement / 2 <= APPROXIMATE_CENTER
        tau = candidate
        steps += 1
    return tau, steps, decrement / 2 <= APPROXIMATE_CENTER


def minimize_max_divergence(
    rho: ComplexMatrix,
    dim_target: int,
    dim_cond: int,
    config: OptimizerConfig | None = None,
) -> OptimizationResult:
    """Minimize D̃_∞(ρ‖1_A⊗σ) over density operators σ

    Solves min tr τ subject to 1_A⊗τ ≥ ρ with a log-det barrier; the optimum is
    2^{min D̃_∞} and σ = τ / tr τ.
    """
    config = config or OptimizerConfig()
    basis, reduced = _support_reduction(rho, dim_target, dim_cond)
    rank = basis.shape[1]
    barrier = _Barrier(reduced, dim_target, rank)
    top = float(np.linalg.eigvalsh(reduced)[-1])
    tau = np.eye(rank, dtype=np.complex128) * top * 1.01
    size = dim_target * rank
    t = size / float(np.real(np.trace(tau)))
    iterations = 0
    # duality gap of the last centered point
    gap = math.inf
    while iterations < config.max_iterations:
        tau, steps, centered = _center(barrier, tau, t, config.max_iterations - iterations)
        iterations += steps
        if not centered:
            break
        gap = size / t
        if gap <= BARRIER_GAP_FACTOR * config.tolerance * float(np.real(np.trace(tau))):
            break
        t *= BARRIER_GROWTH
    converged = gap <= BARRIER_GAP_FACTOR * config.tolerance * float(np.real(np.trace(tau)))
    if not converged:
        logger.warning(f"minimize_max_divergence: barrier stopped at {t=} after {iterations} Newton steps")

    total = float(np.real(np.trace(tau)))
    sigma = tau / total
    # σ^{-1/2} sandwich at the final point is never above log₂ tr τ
    exact = 2 * math.log2(operator_norm(_lift(operator_power(sigma, -0.5), dim_target) @ gram_factor(reduced)))
    value = min(math.log2(total), exact)
    return OptimizationResult(basis @ sigma @ basis.conj().T, value, iterations, converged, [value])
