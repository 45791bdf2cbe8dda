import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from tqdqed.core import (
    SIGMA_MINUS,
    SIGMA_X,
    SIGMA_Z,
    ContractViolation,
    DimensionError,
    LindbladChannel,
    basis,
    commutator,
    dissipator,
    eig_hermitian,
    expm_unitary,
    is_hermitian,
    is_unitary,
    ket2dm,
    lindblad_rhs,
    liouvillian,
    tensor,
    trace_distance,
)


def random_hermitian(rng, d):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (A + A.conj().T)


def random_density(rng, d):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = A @ A.conj().T
    return rho / np.trace(rho)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_pauli_conventions():
    g, e = basis(2, 0), basis(2, 1)
    assert np.allclose(SIGMA_MINUS @ e, g)
    assert np.allclose(SIGMA_Z @ g, g)
    assert np.allclose(SIGMA_Z @ e, -e)


def test_eig_hermitian_reconstructs_and_sorts():
    rng = np.random.default_rng(1)
    H = random_hermitian(rng, 6)
    w, V = eig_hermitian(H)
    assert np.all(np.diff(w) >= 0)
    assert np.allclose(V @ np.diag(w) @ V.conj().T, H, atol=1e-12)
    assert is_unitary(V)


def test_eig_hermitian_phase_convention():
    rng = np.random.default_rng(2)
    _, V = eig_hermitian(random_hermitian(rng, 5))
    for k in range(5):
        col = V[:, k]
        j = np.argmax(np.abs(col) > np.max(np.abs(col)) - 1e-9)
        assert abs(col[j].imag) < 1e-12 and col[j].real > 0


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(ContractViolation):
        eig_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))


def test_expm_matches_scipy():
    rng = np.random.default_rng(3)
    H = random_hermitian(rng, 4)
    assert np.allclose(expm_unitary(H, 0.7), scipy.linalg.expm(-0.7j * H), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(min_value=-10, max_value=10))
def test_expm_inverse(seed, t):
    H = random_hermitian(np.random.default_rng(seed), 4)
    U = expm_unitary(H, t)
    assert np.allclose(U @ expm_unitary(H, -t), np.eye(4), atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_tensor_associative(seed):
    rng = np.random.default_rng(seed)
    A, B, C = (rng.normal(size=(2, 2)) for _ in range(3))
    left = tensor([tensor([A, B]), C])
    right = tensor([A, tensor([B, C])])
    assert np.allclose(left, right)
    assert np.allclose(tensor([A, B, C]), left)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_dissipator_traceless_and_hermitian(seed):
    rng = np.random.default_rng(seed)
    L = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    out = dissipator(L, random_density(rng, 3))
    assert abs(np.trace(out)) < 1e-12
    assert is_hermitian(out)


def test_liouvillian_matches_rhs():
    rng = np.random.default_rng(4)
    H = random_hermitian(rng, 3)
    chans = [LindbladChannel(rng.normal(size=(3, 3)), 0.3), LindbladChannel(np.diag([1.0, 0, -1]), 1.1)]
    rho = random_density(rng, 3)
    direct = lindblad_rhs(rho, H, chans)
    via = (liouvillian(H, chans) @ rho.reshape(-1)).reshape(3, 3)
    assert np.allclose(direct, via, atol=1e-12)


def test_liouvillian_unitary_part_is_commutator():
    rng = np.random.default_rng(5)
    H = random_hermitian(rng, 3)
    rho = random_density(rng, 3)
    assert np.allclose(lindblad_rhs(rho, H, []), -1j * commutator(H, rho))


@settings(max_examples=20, deadline=None)
@given(seeds, st.floats(min_value=0.01, max_value=3.0))
def test_trace_distance_contracts_under_channel(seed, t):
    rng = np.random.default_rng(seed)
    chans = [LindbladChannel(SIGMA_MINUS, 1.0), LindbladChannel(SIGMA_Z, 0.4)]
    prop = scipy.linalg.expm(liouvillian(0.5 * SIGMA_X, chans) * t)
    rho, sigma = random_density(rng, 2), random_density(rng, 2)
    before = trace_distance(rho, sigma)
    after = trace_distance((prop @ rho.reshape(-1)).reshape(2, 2), (prop @ sigma.reshape(-1)).reshape(2, 2))
    assert after <= before + 1e-12


def test_trace_distance_orthogonal_pure_states():
    assert trace_distance(ket2dm(basis(2, 0)), ket2dm(basis(2, 1))) == pytest.approx(1.0)


def test_channel_rejects_negative_rate():
    with pytest.raises(ContractViolation):
        LindbladChannel(SIGMA_MINUS, -1.0)


def test_dimension_checks():
    with pytest.raises(DimensionError):
        dissipator(np.eye(2), np.eye(3))
