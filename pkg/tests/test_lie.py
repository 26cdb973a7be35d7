import numpy as np
from hypothesis import given

from oracles import I2, SX, SZ, kron3
from trireduce.lie import (adjoint, basis_generators, basis_k, basis_offdiag, bracket,
                           coadjoint, embed, generator, is_local_algebra, killing,
                           pairing, random_algebra, random_dual, slot, torus_basis)
from trireduce.numerics import rank, to_coords
from trireduce.states import density, random_local_unitary
from strategies import rngs, states

RHO000 = density(np.eye(8)[0])


def test_embed_zero_and_torus():
    assert np.array_equal(embed(np.zeros((3, 2, 2))), np.zeros((8, 8)))
    E = embed(slot(0, 1j * SZ))
    assert np.allclose(E, np.diag([1j] * 4 + [-1j] * 4))


@given(rngs())
def test_embed_matches_kron_oracle(rng):
    X = random_algebra(rng)
    ref = kron3(X[0], I2, I2) + kron3(I2, X[1], I2) + kron3(I2, I2, X[2])
    assert np.abs(embed(X) - ref).max() < 1e-15


@given(rngs())
def test_embed_norm(rng):
    X = random_algebra(rng)
    lhs = np.linalg.norm(embed(X)) ** 2
    assert abs(lhs - 4 * sum(np.linalg.norm(x) ** 2 for x in X)) < 1e-10


@given(rngs())
def test_embed_is_homomorphism(rng):
    X, Y = random_algebra(rng), random_algebra(rng)
    E = embed
    assert np.abs(E(X) @ E(Y) - E(Y) @ E(X) - E(bracket(X, Y))).max() < 1e-12


def test_pairing_values():
    X = slot(0, 1j * SZ)
    assert pairing(np.zeros((3, 2, 2)), X) == 0
    assert abs(pairing(slot(0, SZ / 2), X) - (-0.5)) < 1e-15


@given(rngs())
def test_pairing_bilinear(rng):
    xi, xj, X = random_dual(rng), random_dual(rng), random_algebra(rng)
    a, b = rng.standard_normal(2)
    assert abs(pairing(a * xi + b * xj, X) - a * pairing(xi, X) - b * pairing(xj, X)) < 1e-12


def test_basis_k_orthonormal():
    B = basis_k()
    assert len(B) == 9
    G = np.array([[killing(X, Y) for Y in B] for X in B])
    assert np.abs(G - np.eye(9)).max() < 1e-15
    assert all(is_local_algebra(X) for X in B)
    T = torus_basis()
    assert np.allclose(T[0][0], 1j * SZ) and np.allclose(T[2][2], 1j * SZ)


def test_basis_offdiag():
    B = basis_offdiag()
    assert len(B) == 6
    for eta in B:
        assert np.allclose(eta, np.conj(np.swapaxes(eta, 1, 2)))
        assert np.allclose(np.einsum("kii->ki", eta), 0)
        for X in torus_basis():
            assert abs(pairing(eta, X)) < 1e-15
    assert rank(np.array([to_coords(b) for b in B]).reshape(6, -1)) == 6


def test_generator_at_product_state():
    for X in torus_basis():
        assert np.abs(generator(X, RHO000)).max() == 0
    v = generator(slot(0, 1j * SX), RHO000)
    ref = embed(slot(0, 1j * SX)) @ RHO000 - RHO000 @ embed(slot(0, 1j * SX))
    assert np.linalg.norm(v) > 0.5 and np.allclose(v, ref)


@given(states(), rngs())
def test_generator_linear_and_tangent(psi, rng):
    rho = density(psi)
    X, Y = random_algebra(rng), random_algebra(rng)
    a, b = rng.standard_normal(2)
    lhs = generator(a * X + b * Y, rho)
    assert np.abs(lhs - a * generator(X, rho) - b * generator(Y, rho)).max() < 1e-12
    v = generator(X, rho)
    assert np.abs(v - v.conj().T).max() < 1e-12
    assert np.abs(rho @ v + v @ rho - v).max() < 1e-12


@given(states(), rngs())
def test_generator_anti_homomorphism(psi, rng):
    # generator([X, Y]) equals the commutator of the vector fields X_M and Y_M
    rho = density(psi)
    X, Y = random_algebra(rng), random_algebra(rng)
    EX, EY = embed(X), embed(Y)
    lhs = generator(bracket(X, Y), rho)
    rhs = EX @ (EY @ rho - rho @ EY) - (EY @ rho - rho @ EY) @ EX \
        - (EY @ (EX @ rho - rho @ EX) - (EX @ rho - rho @ EX) @ EY)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_basis_generators_subset(rng):
    rho = density(rng.standard_normal(8) + 0j)
    full = basis_generators(rho)
    assert full.shape == (9, 8, 8)
    assert np.allclose(basis_generators(rho, (2, 5, 8)), full[[2, 5, 8]])
    assert np.allclose(full[4], generator(basis_k()[4], rho))


def test_coadjoint_identity(rng):
    xi = random_dual(rng)
    assert np.allclose(coadjoint(np.array([np.eye(2)] * 3), xi), xi)


@given(rngs())
def test_coadjoint_pairing(rng):
    g = random_local_unitary(rng)
    xi, X = random_dual(rng), random_algebra(rng)
    ginv = np.conj(np.swapaxes(g, 1, 2))
    # Ad_{g^-1} X written out blockwise
    ad = np.array([ginv[k] @ X[k] @ g[k] for k in range(3)])
    assert abs(pairing(coadjoint(g, xi), X) - pairing(xi, ad)) < 1e-12
    assert np.allclose(adjoint(g, X), np.array([g[k] @ X[k] @ ginv[k] for k in range(3)]))


@given(rngs())
def test_coadjoint_preserves_block_spectra(rng):
    g = random_local_unitary(rng)
    xi = random_dual(rng)
    a = np.linalg.eigvalsh(xi)
    b = np.linalg.eigvalsh(coadjoint(g, xi))
    assert np.abs(a - b).max() < 1e-12


def test_is_local_algebra_rejects():
    assert not is_local_algebra(np.array([np.eye(2)] * 3) * 1j)
    assert not is_local_algebra(np.array([SX] * 3))
