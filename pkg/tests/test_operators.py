"""Test matrix functions, layouts and partial traces"""

import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

from condrenyi.objects import SeededRng, random_density
from condrenyi.operators import (
    Direction,
    LayoutError,
    NotHermitianError,
    NotPositiveError,
    OperatorError,
    PreconditionError,
    SubsystemLayout,
    dominates,
    eigenspaces,
    fidelity,
    hermitian,
    holder_pair_check,
    local_operator,
    numerical_rank,
    operator_log,
    operator_power,
    partial_trace,
    permute,
    pinch,
    positive_eig,
    schatten_power,
    tensor,
    trace_norm,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.diag([1.0, -1.0]).astype(complex)
KET_0 = np.diag([1.0, 0.0]).astype(complex)
KET_1 = np.diag([0.0, 1.0]).astype(complex)
MIXED_QUBIT = np.eye(2) / 2


def test_layout_default_labels():
    """Test SubsystemLayout.from_dims labels subsystems A, B, C"""
    layout = SubsystemLayout.from_dims((2, 3, 4))
    assert layout.labels == ("A", "B", "C")
    assert layout.dim == 24
    assert layout.dim_of(("A", "C")) == 8
    assert layout.dim_of(()) == 1


def test_layout_select_keeps_layout_order():
    """Test select returns subsystems in layout order"""
    layout = SubsystemLayout.from_dims((2, 3, 4))
    assert layout.select(("C", "A")).labels == ("A", "C")
    assert layout.reorder(("C", "A", "B")).dims == (4, 2, 3)


def test_layout_replace_append():
    """Test replace and append"""
    layout = SubsystemLayout.from_dims((2, 2)).replace("B", 3).append("E", 5)
    assert layout.labels == ("A", "B", "E")
    assert layout.dims == (2, 3, 5)


@pytest.mark.parametrize(
    "labels,dims",
    [(("A", "A"), (2, 2)), (("A",), (2, 2)), (("A", "B"), (2, 0)), ((), ())],
)
def test_layout_invalid(labels, dims):
    """Test invalid layouts raise LayoutError"""
    with pytest.raises(LayoutError):
        SubsystemLayout(labels, dims)


def test_layout_unknown_label():
    """Test unknown labels raise LayoutError"""
    layout = SubsystemLayout.from_dims((2, 2))
    with pytest.raises(LayoutError):
        layout.select("Z")
    with pytest.raises(LayoutError):
        layout.reorder(("A",))
    with pytest.raises(LayoutError):
        layout.check(3)


def test_hermitian_rejects():
    """Test hermitian rejects non-Hermitian, non-square and non-finite input"""
    with pytest.raises(NotHermitianError):
        hermitian([[0, 1], [0, 0]])
    with pytest.raises(NotHermitianError):
        hermitian(np.ones((2, 3)))
    with pytest.raises(OperatorError):
        hermitian([[math.nan, 0], [0, 1]])


def test_positive_eig_clips_rounding_noise():
    """Test eigenvalues slightly below zero are clipped and large negatives rejected"""
    decomposition = positive_eig(np.diag([1.0, -1e-12]))
    assert decomposition.eigenvalues[-1] == 0.0
    assert decomposition.rank == 1
    with pytest.raises(NotPositiveError):
        positive_eig(PAULI_Z)


def test_operator_power_support_convention():
    """Test negative powers act on the support only"""
    inverse = operator_power(np.diag([2.0, 0.0]), -1)
    assert np.allclose(inverse, np.diag([0.5, 0.0]))
    assert np.allclose(operator_power(np.zeros((2, 2)), -0.5), 0)


def test_operator_power_rejects_infinite_exponent():
    with pytest.raises(PreconditionError):
        operator_power(MIXED_QUBIT, math.inf)


def test_operator_log():
    """Test the base 2 logarithm is zero on the kernel"""
    assert np.allclose(operator_log(np.diag([4.0, 1.0, 0.0])), np.diag([2.0, 0.0, 0.0]))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.floats(0, 2), st.floats(0, 2))
def test_operator_power_composition(seed, p, q):
    """Test M^p M^q = M^{p+q} for full-rank states"""
    rho = random_density(3, None, SeededRng(seed)).op
    assert np.allclose(
        operator_power(rho, p) @ operator_power(rho, q), operator_power(rho, p + q), atol=1e-6
    )


def test_schatten_power():
    assert schatten_power(np.diag([3.0, 4.0]), 2) == pytest.approx(25)
    assert schatten_power(np.zeros((2, 2)), 0.5) == 0.0


def test_numerical_rank_and_dominates():
    """Test numerical rank ignores tiny singular values and support inclusion"""
    assert numerical_rank(np.diag([1.0, 1e-12])) == 1
    assert numerical_rank(np.zeros((2, 2))) == 0
    assert dominates(KET_0, np.eye(2))
    assert not dominates(np.eye(2), KET_0)


def test_partial_trace_product():
    """Test tr_B (a ⊗ b) = a tr b"""
    layout = SubsystemLayout.from_dims((2, 3))
    a = np.array([[1, 2j], [-2j, 3]])
    b = np.diag([1.0, 2.0, 3.0])
    assert np.allclose(partial_trace(tensor(a, b), layout, "A"), 6 * a)
    assert np.allclose(partial_trace(tensor(a, b), layout, "B"), 4 * b)


def test_partial_trace_middle():
    """Test tracing out the middle of three subsystems"""
    layout = SubsystemLayout.from_dims((2, 3, 2))
    a, b, c = KET_0, np.eye(3) / 3, MIXED_QUBIT
    assert np.allclose(partial_trace(tensor(a, b, c), layout, ("A", "C")), tensor(a, c))


def test_permute_swaps_factors():
    layout = SubsystemLayout.from_dims((2, 3))
    a = np.array([[1, 2j], [-2j, 3]])
    b = np.diag([1.0, 2.0, 3.0])
    assert np.allclose(permute(tensor(a, b), layout, ("B", "A")), tensor(b, a))


def test_local_operator_rectangular():
    """Test a 3 x 2 operator on B embeds as 1 ⊗ K"""
    layout = SubsystemLayout.from_dims((2, 2))
    k = np.ones((3, 2))
    lifted = local_operator(k, layout, "B")
    assert lifted.shape == (6, 4)
    assert np.allclose(lifted, np.kron(np.eye(2), k))
    with pytest.raises(LayoutError):
        local_operator(np.ones((2, 3)), layout, "A")


def test_eigenspaces_groups_degenerate_values():
    spaces = eigenspaces(np.diag([1.0, 0.5, 1.0]))
    assert [value for value, _ in spaces] == pytest.approx([1.0, 0.5])
    assert [basis.shape[1] for _, basis in spaces] == [2, 1]


def test_pinch():
    """Test pinching X in the eigenbasis of Z removes it and the identity pinches nothing"""
    assert np.allclose(pinch(PAULI_X, PAULI_Z), 0)
    m = np.array([[0.6, 0.2j], [-0.2j, 0.4]])
    assert np.allclose(pinch(m, np.eye(2)), m)
    assert np.allclose(pinch(m, m), m)
    with pytest.raises(PreconditionError):
        pinch(m, np.eye(3))


def test_fidelity():
    """Test F(|0⟩, 1/2) = 1/√2, F(ρ, ρ) = 1 and orthogonal states"""
    assert fidelity(KET_0, MIXED_QUBIT) == pytest.approx(1 / math.sqrt(2))
    assert fidelity(MIXED_QUBIT, MIXED_QUBIT) == pytest.approx(1)
    assert fidelity(KET_0, KET_1) == pytest.approx(0)


def test_fidelity_symmetric(rng):
    rho = random_density(3, None, rng).op
    sigma = random_density(3, 2, rng).op
    assert fidelity(rho, sigma) == pytest.approx(fidelity(sigma, rho))


def test_trace_norm():
    assert trace_norm(PAULI_Z) == pytest.approx(2)


def test_direction_slack():
    assert Direction.LEQ.slack(1, 3) == 2
    assert Direction.GEQ.slack(1, 3) == -2
    assert Direction.EQ.slack(1, 3) == -2


def test_holder_examples():
    """Test Hölder's inequality on hand-computed pairs"""
    check = holder_pair_check(np.eye(2), np.eye(2), 2)
    assert (check.lhs, check.rhs) == pytest.approx((2, 2))
    assert check.direction is Direction.LEQ

    check = holder_pair_check(KET_0, KET_1, 3)
    assert (check.lhs, check.rhs) == pytest.approx((0, 1))

    check = holder_pair_check(MIXED_QUBIT, MIXED_QUBIT, 0.5)
    assert (check.lhs, check.rhs) == pytest.approx((0.5, 0.5))
    assert check.direction is Direction.GEQ


def test_holder_preconditions():
    """Test the reverse inequality requires domination and p ≠ 1"""
    with pytest.raises(PreconditionError):
        holder_pair_check(KET_0, KET_1, 0.5)
    with pytest.raises(PreconditionError):
        holder_pair_check(KET_0, KET_1, 1)
    with pytest.raises(NotPositiveError):
        holder_pair_check(PAULI_Z, KET_1, 2)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([0.25, 0.5, 1.5, 2, 3]))
def test_holder_random(seed, p):
    """Test both Hölder directions on random full-rank states"""
    rng = SeededRng(seed).generator()
    a = random_density(3, None, rng).op
    b = random_density(3, None, rng).op
    check = holder_pair_check(a, b, p)
    assert check.direction.slack(check.lhs, check.rhs) >= -1e-9
