import numpy as np
import pytest

from conftest import random_hermitian
from lieforge.dense import (
    DenseOperator,
    commutant_of_normal,
    evolve,
    hs_inner,
    nullspace,
    operator_norm,
    spectral_projectors,
)
from lieforge.errors import RoleError
from lieforge.pauli import PauliSum, to_dense

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def test_role_validation():
    DenseOperator(1j * Z, role="anti_hermitian")
    with pytest.raises(RoleError):
        DenseOperator(Z, role="anti_hermitian")
    with pytest.raises(RoleError):
        DenseOperator(2 * np.eye(2), role="unitary")


def test_hs_inner_examples():
    assert hs_inner(np.eye(2), np.eye(2)) == 2
    assert hs_inner(X, Z) == 0
    z1 = to_dense(PauliSum.from_labels([(1, "ZII")]))
    assert np.isclose(hs_inner(z1, z1), 8)


def test_spectral_examples():
    sd = spectral_projectors(Z)
    assert sd.eigenvalues == (1.0, -1.0)
    np.testing.assert_allclose(sd.projectors[0].matrix, np.diag([1, 0]))
    np.testing.assert_allclose(sd.projectors[1].matrix, np.diag([0, 1]))
    sd = spectral_projectors(np.eye(3))
    assert sd.K == 1
    np.testing.assert_allclose(sd.projectors[0].matrix, np.eye(3))
    sd = spectral_projectors(np.diag([2.0, 2.0, 5.0]))
    assert sorted(np.trace(p.matrix).real for p in sd.projectors) == [1, 2]


def test_spectral_rejects_non_hermitian():
    with pytest.raises(RoleError):
        spectral_projectors(np.array([[0, 1], [0, 0]]))


@pytest.mark.parametrize("d", [2, 5, 16])
def test_spectral_reconstruction(rng, d):
    chi = random_hermitian(rng, d)
    sd = spectral_projectors(chi)
    assert np.linalg.norm(sd.reconstruct() - chi) <= 1e-10 * np.linalg.norm(chi)
    total = sum(p.matrix for p in sd.projectors)
    np.testing.assert_allclose(total, np.eye(d), atol=1e-10)
    for i, p in enumerate(sd.projectors):
        np.testing.assert_allclose(p.matrix @ p.matrix, p.matrix, atol=1e-10)
        for q in sd.projectors[i + 1:]:
            assert np.linalg.norm(p.matrix @ q.matrix) < 1e-10


def test_degenerate_spectrum_grouped(rng):
    u, _ = np.linalg.qr(rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6)))
    chi = u @ np.diag([1, 1, 1 + 1e-12, 3, 3, -2]) @ u.conj().T
    assert spectral_projectors(chi).K == 3


def test_evolve_examples(rng):
    h = random_hermitian(rng, 4)
    np.testing.assert_allclose(evolve(h, 0).matrix, np.eye(4), atol=1e-14)
    np.testing.assert_allclose(evolve(Z, np.pi / 2).matrix, np.diag([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)]))
    u = evolve(h, 0.3).matrix @ evolve(h, 0.9).matrix
    assert np.linalg.norm(u - evolve(h, 1.2).matrix) < 1e-10
    uu = evolve(h, 2.5).matrix
    assert np.linalg.norm(uu.conj().T @ uu - np.eye(4)) <= 1e-10 * 4
    with pytest.raises(RoleError):
        evolve(1j * h, 1.0)


def test_nullspace_examples():
    assert nullspace(np.eye(3)).shape[0] == 0
    assert nullspace(np.zeros((1, 3))).shape[0] == 3
    # [X, sigma_z] = 0 on row-major vec(X): (sigma_z (x) I - I (x) sigma_z^T) vec(X) = 0
    k = np.kron(Z, np.eye(2)) - np.kron(np.eye(2), Z.T)
    assert nullspace(k).shape[0] == 2
    assert nullspace(np.zeros((0, 4)), dim=4).shape[0] == 4


def test_operator_norm_examples():
    assert np.isclose(operator_norm(np.eye(5)), 1)
    assert np.isclose(operator_norm(2 * Z), 2)
    u = evolve(Z, 0.4).matrix
    assert operator_norm(u - u) == 0


def test_commutant_of_normal_diagonal():
    basis = commutant_of_normal([1j * Z], 2)
    assert basis.shape[0] == 2
    for b in basis:
        assert np.linalg.norm(b @ Z - Z @ b) < 1e-12
