"""Small dense linear algebra used throughout the package.

Everything here works on matrices of size at most 64x64, so plain SVD and
``numpy.linalg.eigh`` are used without any attempt at scaling.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by the reduction, dynamics and CLI layers."""

    hermitian: float = 1e-12
    rank: float = 1e-9           # relative to the largest singular value
    lift: float = 1e-10
    weyl: float = 1e-10          # off-diagonal marginal magnitude
    degenerate: float = 1e-13    # eigenvalue gap treated as a tie
    interior_gap: float = 1e-8
    polytope_gap: float = 1e-8
    wall_exit: float = 1e-6

    def as_dict(self):
        return dict(self.__dict__)


DEFAULT_TOL = Tolerances()


def check_hermitian(H, tol=DEFAULT_TOL.hermitian):
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {H.shape}")
    err = np.abs(H - H.conj().T).max() if H.size else 0.0
    if err > tol:
        raise NotHermitianError(f"matrix is not Hermitian (max |H - H^dag| = {err:.3e})")
    return H


def fix_phases(U):
    """Rotate each column so its largest-magnitude entry is real and non-negative."""
    U = np.array(U, dtype=np.complex128)
    idx = np.argmax(np.abs(U) - 1e-12 * np.arange(U.shape[0])[:, None], axis=0)
    pivot = U[idx, np.arange(U.shape[1])]
    mag = np.abs(pivot)
    phase = np.where(mag > 0, pivot.conj() / np.where(mag > 0, mag, 1.0), 1.0)
    return U * phase[None, :]


def eig_hermitian(H, tol=DEFAULT_TOL.hermitian):
    """Eigendecomposition ``H = U diag(w) U^dag`` with ``w`` non-increasing.

    Eigenvector phases are fixed deterministically (see :func:`fix_phases`),
    so repeated calls on the same input give identical output.
    """
    H = check_hermitian(H, tol)
    w, U = np.linalg.eigh(0.5 * (H + H.conj().T))
    return w[::-1].copy(), fix_phases(U[:, ::-1])


def singular_values(A):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return np.zeros(0)
    return np.linalg.svd(A, compute_uv=False)


def rank(A, tol=DEFAULT_TOL.rank):
    s = singular_values(A)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def nullspace(A, tol=DEFAULT_TOL.rank):
    """Orthonormal kernel basis of a real ``m x n`` matrix, as an ``(k, n)`` array."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n)
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    r = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
    return _fix_signs(Vh[r:])


def column_space(A, tol=DEFAULT_TOL.rank):
    """Orthonormal basis of the column span of ``A`` as a ``(m, r)`` array."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return np.zeros((A.shape[0], 0))
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    r = int(np.sum(s > tol * s[0])) if s[0] > 0 else 0
    return _fix_signs(U[:, :r].T).T


def _fix_signs(rows):
    # sign convention only; makes serialized bases stable across calls
    rows = np.array(rows, dtype=float)
    for v in rows:
        j = np.argmax(np.abs(v) - 1e-12 * np.arange(v.size))
        if v[j] < 0:
            v *= -1
    return rows


@lru_cache(maxsize=None)
def _hermitian_basis(d):
    basis = []
    for i in range(d):
        E = np.zeros((d, d), dtype=np.complex128)
        E[i, i] = 1.0
        basis.append(E)
    pairs = [(i, j) for i in range(d) for j in range(i + 1, d)]
    for i, j in pairs:
        E = np.zeros((d, d), dtype=np.complex128)
        E[i, j] = E[j, i] = 1 / np.sqrt(2)
        basis.append(E)
    for i, j in pairs:
        E = np.zeros((d, d), dtype=np.complex128)
        E[i, j] = 1j / np.sqrt(2)
        E[j, i] = -1j / np.sqrt(2)
        basis.append(E)
    out = np.array(basis)
    out.setflags(write=False)
    return out


def hermitian_basis(d):
    """Hilbert-Schmidt orthonormal basis of ``d x d`` Hermitian matrices.

    Order: diagonal units, then ``(E_ij + E_ji)/sqrt 2`` and finally
    ``i (E_ij - E_ji)/sqrt 2``, pairs ``i < j`` in lexicographic order.
    """
    return _hermitian_basis(int(d))


@lru_cache(maxsize=None)
def _coord_rows(d):
    # Tr(B_a H) = sum_ij B_a[i, j] H[j, i] = <vec(B_a^T), vec(H)> without conjugation
    rows = np.array([b.T.ravel() for b in hermitian_basis(d)])
    rows.setflags(write=False)
    return rows


def to_coords(H):
    """Real chart coordinates of a Hermitian matrix (or a stack of them)."""
    H = np.asarray(H)
    d = H.shape[-1]
    flat = H.reshape(H.shape[:-2] + (d * d,))
    return np.real(flat @ _coord_rows(d).T)


def from_coords(c):
    c = np.asarray(c, dtype=float)
    d = int(round(np.sqrt(c.shape[-1])))
    if d * d != c.shape[-1]:
        raise ValueError(f"coordinate length {c.shape[-1]} is not a square")
    return np.einsum("...a,aij->...ij", c, hermitian_basis(d))


def commutator(A, B):
    return A @ B - B @ A
