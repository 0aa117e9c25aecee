"""Test random states, channels and measurements"""

import math

import numpy as np
import pytest

from condrenyi.divergences import StateError
from condrenyi.objects import (
    ChannelError,
    KrausChannel,
    MeasurementError,
    Povm,
    PureState,
    SeededRng,
    apply,
    bell_state,
    classical_state,
    digest,
    haar_isometry,
    haar_unitary,
    overlap,
    post_measurement_state,
    post_measurement_states,
    purify,
    random_channel,
    random_density,
    random_distribution,
    random_pure_state,
)
from condrenyi.operators import LayoutError, SubsystemLayout

SEED = 7


def test_seeded_rng_reproducible():
    """Test equal seeds give equal draws and children are independent of call order"""
    a = SeededRng(SEED).generator().standard_normal(4)
    b = SeededRng(SEED).generator().standard_normal(4)
    assert np.array_equal(a, b)
    assert SeededRng(SEED).child(3) == SeededRng(SEED).child(3)
    assert SeededRng(SEED).child(3) != SeededRng(SEED).child(4)
    with pytest.raises(ValueError):
        SeededRng(-1)


def test_digest():
    assert digest(np.eye(2)) == digest(np.eye(2))
    assert digest(np.eye(2)) != digest(np.eye(2) / 2)
    assert len(digest(np.eye(2))) == 16


def test_haar_unitary(rng):
    u = haar_unitary(4, rng)
    assert np.allclose(u.conj().T @ u, np.eye(4))
    v = haar_isometry(2, 6, rng)
    assert v.shape == (6, 2)
    assert np.allclose(v.conj().T @ v, np.eye(2))
    with pytest.raises(LayoutError):
        haar_isometry(3, 2, rng)


def test_random_density_rank(rng):
    """Test the requested rank and unit trace"""
    rho = random_density((2, 3), 2, rng)
    assert rho.layout.dims == (2, 3)
    assert np.count_nonzero(rho.spectrum() > 1e-10) == 2
    assert np.trace(rho.op).real == pytest.approx(1)
    with pytest.raises(ValueError):
        random_density(2, 3, rng)


def test_random_pure_state(rng):
    psi = random_pure_state((2, 2), rng)
    assert np.linalg.norm(psi.vector) == pytest.approx(1)
    assert psi.layout.labels == ("A", "B")


def test_pure_state_validation():
    with pytest.raises(StateError):
        PureState(np.array([1.0, 1.0]), SubsystemLayout.from_dims((2,)))
    with pytest.raises(LayoutError):
        PureState(np.array([1.0, 0.0]), SubsystemLayout.from_dims((3,)))


def test_pure_marginal_matches_density(rng):
    """Test marginals from amplitudes equal partial traces of the density"""
    psi = random_pure_state((2, 3, 2), rng)
    for keep in ("A", ("A", "C"), ("B", "C")):
        assert np.allclose(psi.marginal(keep).op, psi.density().marginal(keep).op)


def test_bell_marginals():
    psi = bell_state()
    assert np.allclose(psi.marginal("A").op, np.eye(2) / 2)
    assert np.allclose(psi.marginal("B").op, np.eye(2) / 2)


def test_purify(rng):
    """Test the purification reduces to the state and has rank-sized environment"""
    rho = random_density(3, 2, rng)
    psi = purify(rho)
    assert psi.layout.labels == ("A", "R")
    assert psi.layout.dims == (3, 2)
    assert np.allclose(psi.marginal("A").op, rho.op)


def test_channel_validation():
    with pytest.raises(ChannelError):
        KrausChannel((np.eye(2) / 2,))
    with pytest.raises(ChannelError):
        KrausChannel(())


def test_depolarizing():
    channel = KrausChannel.depolarizing(2)
    assert np.allclose(channel.apply_matrix(np.diag([1.0, 0.0])), np.eye(2) / 2)


def test_stinespring_roundtrip(rng):
    """Test the dilation of a channel gives back the same channel"""
    channel = random_channel(2, 3, 2, rng)
    v = channel.stinespring()
    assert v.shape == (6, 2)
    assert np.allclose(v.conj().T @ v, np.eye(2))
    rebuilt = KrausChannel.from_isometry(v, 3)
    rho = random_density(2, None, rng).op
    assert np.allclose(rebuilt.apply_matrix(rho), channel.apply_matrix(rho))


def test_apply_on_subsystem(bell):
    """Test depolarizing B of a Bell state leaves the product of maximally mixed states"""
    out = apply(KrausChannel.depolarizing(2), bell, "B")
    assert np.allclose(out.op, np.eye(4) / 4)
    with pytest.raises(ChannelError):
        apply(KrausChannel.depolarizing(3), bell, "B")


def test_apply_isometry(rng):
    """Test an isometry on B keeps the marginal on A"""
    psi = random_pure_state((2, 2), rng)
    v = haar_isometry(2, 6, rng)
    dilated = psi.apply_isometry(v, "B", 3, "E")
    assert dilated.layout.labels == ("A", "B", "E")
    assert dilated.layout.dims == (2, 3, 2)
    assert np.allclose(dilated.marginal("A").op, psi.marginal("A").op)


def test_apply_isometry_matches_channel(rng):
    """Test tracing out the environment of the dilation applies the channel"""
    psi = random_pure_state((2, 2), rng)
    channel = random_channel(2, 2, 2, rng)
    dilated = psi.apply_isometry(channel.stinespring(), "B", 2, "E")
    expected = apply(channel, psi.density(), "B")
    assert np.allclose(dilated.marginal(("A", "B")).op, expected.op)


def test_povm_validation():
    with pytest.raises(MeasurementError):
        Povm((np.diag([1.0, 0.0]),))
    with pytest.raises(MeasurementError):
        Povm((np.diag([2.0, -1.0]), np.diag([-1.0, 2.0])))
    with pytest.raises(MeasurementError):
        Povm(())


def test_overlap():
    """Test computational and Fourier bases have overlap 1/√d"""
    for dim in (2, 3):
        assert overlap(Povm.computational(dim), Povm.fourier(dim)) == pytest.approx(1 / math.sqrt(dim))
    assert overlap(Povm.computational(2), Povm.computational(2)) == pytest.approx(1)
    assert overlap(Povm.trivial(2), Povm.computational(2)) == pytest.approx(1)
    with pytest.raises(MeasurementError):
        overlap(Povm.computational(2), Povm.computational(3))


def test_post_measurement_state_bell():
    """Test measuring A of a Bell state in Z gives a classical copy on X, B"""
    state = post_measurement_state(bell_state(), Povm.computational(2), "A", "B")
    assert state.layout.labels == ("X", "B")
    assert np.allclose(state.op, np.diag([0.5, 0.0, 0.0, 0.5]))


def test_post_measurement_state_without_side(rng):
    rho = random_density(2, None, rng)
    state = post_measurement_state(rho, Povm.computational(2), "A")
    assert state.layout.labels == ("X",)
    assert np.allclose(state.op, np.diag(np.diag(rho.op).real))


def test_post_measurement_states(rng):
    psi = random_pure_state((2, 2, 2), rng)
    xb, yc = post_measurement_states(psi, Povm.computational(2), Povm.fourier(2))
    assert xb.layout.labels == ("X", "B")
    assert yc.layout.labels == ("Y", "C")
    with pytest.raises(LayoutError):
        post_measurement_state(psi, Povm.computational(2), "A", ("A", "B"))
    with pytest.raises(MeasurementError):
        post_measurement_state(psi, Povm.computational(3), "A", "B")


def test_classical_state(rng):
    p = random_distribution((2, 3), rng)
    assert p.sum() == pytest.approx(1)
    rho = classical_state(p)
    assert rho.layout.dims == (2, 3)
    assert np.allclose(np.diag(rho.op).real, p.reshape(-1))
    with pytest.raises(StateError):
        classical_state(np.array([1.5, -0.5]))
