"""Test the minimization over conditioning states"""

import math

import numpy as np
import pytest
import scipy.linalg

from condrenyi.divergences import d_sandwiched
from condrenyi.objects import random_density
from condrenyi.optimize import (
    OptimizerConfig,
    SandwichedObjective,
    cond_marginal,
    hermitian_basis,
    minimize_max_divergence,
    minimize_sandwiched,
    project_to_states,
)

STEP = 1e-6


def test_config_defaults():
    config = OptimizerConfig()
    assert config.asdict() == {
        "max_iterations": 3000,
        "tolerance": 1e-9,
        "restarts": 3,
        "step_rule": "barzilai-borwein",
    }


@pytest.mark.parametrize(
    "settings",
    [{"max_iterations": 0}, {"tolerance": 0}, {"restarts": 0}, {"step_rule": "newton"}],
)
def test_config_invalid(settings):
    with pytest.raises(ValueError):
        OptimizerConfig(**settings)


def test_config_from_dict_ignores_unknown_keys():
    """Test from_dict drops unknown keys and keeps the rest"""
    config = OptimizerConfig.from_dict({"restarts": 5, "colour": "blue"})
    assert config.restarts == 5
    assert config.step_rule == "barzilai-borwein"


def test_project_to_states(rng):
    """Test the projection returns a density operator and fixes states"""
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    projected = project_to_states(m)
    values = np.linalg.eigvalsh(projected)
    assert np.trace(projected).real == pytest.approx(1)
    assert values.min() >= 0
    rho = random_density(3, None, rng).op
    assert np.allclose(project_to_states(rho), rho, atol=1e-9)


def test_hermitian_basis_orthonormal():
    basis = hermitian_basis(3)
    assert len(basis) == 9
    gram = np.array([[np.trace(a.conj().T @ b) for b in basis] for a in basis])
    assert np.allclose(gram, np.eye(9))
    assert all(np.allclose(e, e.conj().T) for e in basis)


def test_objective_value_matches_divergence(rng):
    """Test the objective is D̃_α(ρ‖1⊗σ)"""
    rho = random_density((2, 2), None, rng).op
    sigma = random_density(2, None, rng).op
    for alpha in (0.5, 0.75, 2):
        objective = SandwichedObjective(rho, 2, 2, alpha)
        assert objective.value(sigma) == pytest.approx(
            d_sandwiched(rho, np.kron(np.eye(2), sigma), alpha), abs=1e-9
        )


@pytest.mark.parametrize("alpha", [0.5, 0.75, 1.5, 3])
def test_objective_gradient(alpha, rng):
    """Test the gradient against central differences along Hermitian directions"""
    rho = random_density((2, 2), None, rng).op
    sigma = random_density(2, None, rng).op
    objective = SandwichedObjective(rho, 2, 2, alpha)
    _, gradient = objective.value_and_gradient(sigma)
    for direction in hermitian_basis(2):
        numeric = (
            objective.value(sigma + STEP * direction) - objective.value(sigma - STEP * direction)
        ) / (2 * STEP)
        analytic = float(np.real(np.trace(gradient @ direction)))
        assert analytic == pytest.approx(numeric, abs=1e-5)


def test_cond_marginal():
    rho = np.kron(np.diag([0.25, 0.75]), np.diag([0.5, 0.3, 0.2]))
    assert np.allclose(cond_marginal(rho, 2, 3), np.diag([0.5, 0.3, 0.2]))


def test_minimize_product_state(rng):
    """Test the optimum for ρ_A ⊗ ρ_B is -H̃_α(A) at σ = ρ_B"""
    rho_a = np.diag([0.75, 0.25])
    rho_b = random_density(2, None, rng).op
    rho = np.kron(rho_a, rho_b)
    alpha = 2
    result = minimize_sandwiched(rho, 2, 2, alpha)
    assert result.converged
    assert result.value == pytest.approx(math.log2(0.75**2 + 0.25**2), abs=1e-6)
    assert np.allclose(result.sigma, rho_b, atol=1e-3)


@pytest.mark.parametrize("step_rule", ["barzilai-borwein", "backtracking"])
def test_step_rules_agree(step_rule, rng):
    rho = random_density((2, 2), None, rng).op
    reference = minimize_sandwiched(rho, 2, 2, 1.5)
    result = minimize_sandwiched(rho, 2, 2, 1.5, OptimizerConfig(step_rule=step_rule))
    assert result.value == pytest.approx(reference.value, abs=1e-6)
    assert len(result.restart_values) == 3


def test_minimize_rank_deficient_marginal():
    """Test a conditioning marginal of rank one needs no iterations"""
    rho = np.kron(np.eye(2) / 2, np.diag([1.0, 0.0]))
    result = minimize_sandwiched(rho, 2, 2, 2)
    assert result.iterations == 0
    assert result.value == pytest.approx(-1)
    assert np.allclose(result.sigma, np.diag([1.0, 0.0]))


def test_minimize_max_divergence_classical():
    """Test min_σ D̃_∞(ρ‖1⊗σ) = log₂ Σ_y max_x p(x, y)"""
    p = np.array([[0.5, 0.25], [0.0, 0.25]])
    result = minimize_max_divergence(np.diag(p.reshape(-1)), 2, 2)
    assert result.converged
    assert result.value == pytest.approx(math.log2(0.75), abs=1e-9)
    assert np.trace(result.sigma).real == pytest.approx(1)


def test_minimize_max_divergence_bell(bell):
    result = minimize_max_divergence(bell.op, 2, 2)
    assert result.value == pytest.approx(1, abs=1e-9)
    assert result.converged


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2)])
def test_minimize_max_divergence_converges(dims, rng):
    """Test the barrier reports convergence on full-rank random states and matches the sandwich value"""
    rho = random_density(dims, None, rng).op
    result = minimize_max_divergence(rho, *dims)
    assert result.converged
    sigma_root = np.linalg.inv(scipy.linalg.sqrtm(np.kron(np.eye(dims[0]), result.sigma)))
    assert result.value == pytest.approx(math.log2(np.linalg.eigvalsh(sigma_root @ rho @ sigma_root)[-1]), abs=1e-6)
