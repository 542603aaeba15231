import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssqn.qcore import (
    HADAMARD,
    I2,
    PAULI,
    SX,
    SY,
    SZ,
    DensityMatrix,
    StateFamily,
    allclose,
    apply_local_hadamards,
    apply_local_map,
    bloch_operator,
    compose_superops,
    embed_on_qubit,
    is_hermitian,
    kraus_superop,
    kron,
    make_state,
    mat_sqrt_psd,
)

from conftest import random_density

reals = st.floats(-1, 1, allow_nan=False)


def test_pauli_algebra():
    assert allclose(SX @ SY, 1j * SZ)
    assert allclose(SY @ SZ, 1j * SX)
    assert allclose(SZ @ SX, 1j * SY)
    for s in PAULI.values():
        assert allclose(s @ s, I2)
    assert allclose(HADAMARD @ SZ @ HADAMARD, SX)


@given(reals, reals, reals)
def test_bloch_operator_matches_pauli_sum(x, y, z):
    assert allclose(bloch_operator((x, y, z)), x * SX + y * SY + z * SZ)


def test_kron_matches_numpy(rng):
    a = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    b = rng.normal(size=(4, 2))
    c = rng.normal(size=(2, 2))
    assert allclose(kron(a, b, c), np.kron(np.kron(a, b), c))
    with pytest.raises(ValueError):
        kron()


def test_embed_on_qubit():
    assert allclose(embed_on_qubit(SX, 1, 3), np.kron(np.kron(I2, SX), I2))
    with pytest.raises(IndexError):
        embed_on_qubit(SX, 3, 3)
    with pytest.raises(ValueError):
        embed_on_qubit(np.eye(4), 0, 2)


def test_is_hermitian():
    assert is_hermitian(SY)
    assert not is_hermitian(np.array([[0, 1], [0, 0]]))
    assert not is_hermitian(np.ones((2, 3)))


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 4, 8]))
def test_sqrt_psd_squares_back(seed, dim):
    r = np.random.default_rng(seed)
    g = r.normal(size=(dim, dim)) + 1j * r.normal(size=(dim, dim))
    m = g @ g.conj().T
    root = mat_sqrt_psd(m)
    assert is_hermitian(root, 1e-10)
    assert np.abs(root @ root - m).max() < 1e-9 * max(1.0, np.abs(m).max())
    assert np.linalg.eigvalsh(root).min() > -1e-10


def test_sqrt_psd_edge_cases():
    assert allclose(mat_sqrt_psd(np.zeros((2, 2))), np.zeros((2, 2)))
    assert allclose(mat_sqrt_psd(4 * I2), 2 * I2)
    proj = (I2 + SZ) / 2
    assert allclose(mat_sqrt_psd(proj), proj)
    # tiny negative eigenvalue from rounding is accepted and clipped
    assert allclose(mat_sqrt_psd(proj - 1e-12 * I2), mat_sqrt_psd(proj), 1e-5)
    with pytest.raises(ValueError):
        mat_sqrt_psd(-I2)
    with pytest.raises(ValueError):
        mat_sqrt_psd(np.diag([1.0, -1e-3, 1.0, 1.0]))
    with pytest.raises(ValueError):
        mat_sqrt_psd(np.array([[0, 1], [0, 0]]))


@pytest.mark.parametrize("family", list(StateFamily))
def test_states_are_valid_pure(family):
    rho = make_state(family)
    assert rho.nqubits == family.nqubits
    assert rho.is_valid()
    assert abs(np.trace(rho.mat @ rho.mat) - 1) < 1e-12


def test_primed_states_are_hadamard_images():
    assert allclose(apply_local_hadamards(make_state("ghz")).mat, make_state("ghz-prime").mat)
    assert allclose(apply_local_hadamards(make_state("w")).mat, make_state("w-prime").mat)
    assert allclose(apply_local_hadamards(make_state("ghz-prime")).mat, make_state("ghz").mat)
    with pytest.raises(ValueError):
        apply_local_hadamards(make_state("bell"))


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(4) / 4, 3)
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(2) / 2, 1)
    bad = DensityMatrix(np.diag([1.5, -0.5, 0, 0]).astype(complex), 2)
    assert any("negative eigenvalue" in v for v in bad.violations())
    assert DensityMatrix(np.eye(4) / 2, 2).violations() == ["trace 2 != 1"]
    assert make_state("bell").dim == 4


@pytest.mark.parametrize("nqubits,qubit", [(2, 0), (2, 1), (3, 0), (3, 1), (3, 2)])
def test_local_map_matches_embedded_kraus(rng, nqubits, qubit):
    ops = [rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3)]
    rho = random_density(rng, nqubits)
    expected = sum(embed_on_qubit(k, qubit, nqubits) @ rho @ embed_on_qubit(k, qubit, nqubits).conj().T for k in ops)
    got = apply_local_map(rho, kraus_superop(ops), qubit, nqubits)
    assert allclose(got, expected, 1e-10)
    with pytest.raises(IndexError):
        apply_local_map(rho, kraus_superop(ops), nqubits, nqubits)


def test_compose_superops(rng):
    a = [rng.normal(size=(2, 2)) for _ in range(2)]
    b = [rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))]
    rho = random_density(rng, 2)
    step = apply_local_map(apply_local_map(rho, kraus_superop(b), 1, 2), kraus_superop(a), 1, 2)
    assert allclose(apply_local_map(rho, compose_superops(kraus_superop(a), kraus_superop(b)), 1, 2), step, 1e-10)


def test_w_prime_amplitudes():
    ket = np.array([3, 1, 1, -1, 1, -1, -1, -3]) / np.sqrt(24)
    assert allclose(make_state("w-prime").mat, np.outer(ket, ket))


def test_embed_flips_last_qubit():
    x = embed_on_qubit(SX, 2, 3)
    rho = np.zeros((8, 8))
    rho[0, 0] = 1
    out = x @ rho @ x
    assert out[1, 1] == 1 and np.abs(out).sum() == 1


def test_sqrt_of_unsharp_effect():
    alpha, beta = (np.sqrt(0.8) + np.sqrt(0.2)) / 2, (np.sqrt(0.8) - np.sqrt(0.2)) / 2
    assert allclose(mat_sqrt_psd((I2 + 0.6 * SX) / 2), alpha * I2 + beta * SX)
    assert allclose(mat_sqrt_psd(np.diag([0.8, 0.2])), np.diag([np.sqrt(0.8), np.sqrt(0.2)]))


def test_bell_state_entries():
    rho = make_state("bell").mat
    assert math.isclose(rho[0, 3].real, 0.5) and math.isclose(rho[0, 0].real, 0.5)
