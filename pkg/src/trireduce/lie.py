"""The local algebra su(2)+su(2)+su(2), its dual, and its action on states.

Elements of the algebra are ``(3, 2, 2)`` arrays of traceless anti-Hermitian
blocks ``X``; dual elements are ``(3, 2, 2)`` arrays of traceless Hermitian
blocks ``eta``.  The two are identified by ``X = -i eta``.

Sign conventions.  All tangent-space formulas are evaluated on Hermitian
representatives.  A tangent vector at ``rho`` is ``v = -i[A, rho]`` and

    omega(v, w) = (i/2) Tr(rho [A, B])                       (Hermitian lifts)

The same number arises from the anti-Hermitian form
``-(i/2) Tr(rho [X, Y])`` with ``X = -iA``, ``Y = -iB`` because
``[X, Y] = -[A, B]``, so both expressions are one chart and need no extra sign.
The generator of ``X`` is ``d/dt exp(tX) rho exp(-tX) = [X, rho]``, which is
``-i[eta, rho]`` with ``eta = iX``.
"""

from functools import lru_cache

import numpy as np

from .numerics import commutator

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}
I2 = np.eye(2, dtype=np.complex128)

TORUS_INDICES = (2, 5, 8)


def embed(X):
    """``X1 (x) 1 (x) 1 + 1 (x) X2 (x) 1 + 1 (x) 1 (x) X3``.

    Works for anti-Hermitian algebra elements and Hermitian dual elements alike.
    """
    X = np.asarray(X)
    return (np.kron(np.kron(X[0], I2), I2)
            + np.kron(np.kron(I2, X[1]), I2)
            + np.kron(np.kron(I2, I2), X[2]))


def slot(k, M):
    """Element with block ``M`` in factor ``k`` (0-based) and zeros elsewhere."""
    out = np.zeros((3, 2, 2), dtype=np.complex128)
    out[k] = M
    return out


def basis_k():
    """Nine basis elements ``i sigma_a`` per factor, factor-major, ``a = x, y, z``.

    Orthonormal for the blockwise Killing form ``<X, Y> = -Tr(XY)/2``.
    """
    return np.array([slot(k, 1j * PAULI[a]) for k in range(3) for a in "xyz"])


def torus_basis():
    return basis_k()[list(TORUS_INDICES)]


def basis_offdiag():
    """Six dual elements spanning the off-diagonal part: sigma_x, sigma_y per factor."""
    return np.array([slot(k, PAULI[a]) for k in range(3) for a in "xy"])


def killing(X, Y):
    return float(np.real(-np.einsum("kij,kji->", X, Y) / 2))


def pairing(xi, X):
    """``<xi, X> = sum_k -Tr((-i xi_k) X_k)/2 = sum_k (i/2) Tr(xi_k X_k)``."""
    return float(np.real(0.5j * np.einsum("kij,kji->", xi, X)))


def bracket(X, Y):
    return np.einsum("kij,kjl->kil", X, Y) - np.einsum("kij,kjl->kil", Y, X)


def generator(X, rho):
    """Infinitesimal generator ``-i[eta, rho]`` with ``eta = i embed(X)``."""
    return commutator(embed(X), rho)


@lru_cache(maxsize=None)
def embedded_basis():
    """``embed`` applied to :func:`basis_k`, shape ``(9, 8, 8)``."""
    out = np.array([embed(X) for X in basis_k()])
    out.setflags(write=False)
    return out


def basis_generators(rho, indices=None):
    """Generators of the basis elements (all nine, or a subset) at ``rho``."""
    E = embedded_basis()
    if indices is not None:
        E = E[list(indices)]
    return E @ rho - rho @ E


def coadjoint(g, xi):
    g = np.asarray(g)
    return np.einsum("kij,kjl,kml->kim", g, xi, g.conj())


def adjoint(g, X):
    return coadjoint(g, X)


def is_local_algebra(X, tol=1e-12):
    X = np.asarray(X)
    tr = np.abs(np.einsum("kii->k", X)).max()
    skew = np.abs(X + np.conj(np.swapaxes(X, 1, 2))).max()
    return X.shape == (3, 2, 2) and tr < tol and skew < tol


def random_algebra(rng):
    """Random element with standard-normal Pauli coefficients."""
    c = rng.standard_normal(9)
    return np.einsum("a,aij...->ij...", c, basis_k())


def random_dual(rng):
    return 1j * random_algebra(rng)
