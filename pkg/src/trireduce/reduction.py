"""Tangent-space geometry at a point and the linear local model.

Tangent vectors at ``rho`` are traceless Hermitian 8x8 matrices
``v = -i[A, rho]``.  Internally they are handled as 64-dim real coordinate
vectors in the Hermitian chart of :mod:`trireduce.numerics`, which is an
isometry for the Hilbert-Schmidt inner product.

For pure ``rho`` the symplectic form has the lift-free expression
``omega(u, v) = (i/2) Tr(rho [u, v])``; with ``u = -i[A, rho]`` and
``v = -i[B, rho]`` both sides equal ``-Im <A psi, B psi>``.  This is what
the constraint matrices use, while :func:`symplectic_form` evaluates the
lifted formula and checks it against ``-Im <A psi, B psi>``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import lie
from .moment import (ChamberPosition, chamber_position, is_weyl_normalized,
                     local_spectra, moment_map)
from .numerics import (DEFAULT_TOL, column_space, commutator, from_coords,
                       hermitian_basis, nullspace, rank, to_coords)
from .states import as_state, density, local_operator

DIM_M = 14  # real dimension of CP^7

# fixed generic chart vector; v1 of the normal space is its projection
GAUGE_REFERENCE = np.cos(np.arange(1, 65))


class ReductionError(Exception):
    code = "REDUCTION_ERROR"


class NotPrincipalError(ReductionError):
    code = "NOT_PRINCIPAL"


class OnWallError(ReductionError):
    code = "ON_WALL"


class NotWeylNormalizedError(ReductionError):
    code = "NOT_WEYL_NORMALIZED"


class LiftError(ReductionError):
    code = "NOT_IN_IMAGE"


# ---------------------------------------------------------------- matrices

def _rho(state_or_rho):
    a = np.asarray(state_or_rho)
    return a if a.ndim == 2 else density(a)


def _psi_from_rho(rho):
    j = int(np.argmax(np.real(np.diag(rho))))
    col = rho[:, j]
    return col / np.linalg.norm(col)


def commutator_matrix(rho):
    """Real 64x64 matrix of ``A -> -i[A, rho]`` in the Hermitian chart."""
    B = hermitian_basis(8)
    images = -1j * (B @ rho - rho @ B)
    return to_coords(images).T


def omega_matrix(rho):
    """Real antisymmetric 64x64 matrix ``W_ab = (i/2) Tr(rho [B_a, B_b])``."""
    B = hermitian_basis(8)
    P = rho @ B
    W = -np.imag(np.einsum("ajk,bkj->ab", P, B))
    return 0.5 * (W - W.T)


def tangent_basis(rho, tol=DEFAULT_TOL.rank):
    """Orthonormal ``(64, 14)`` basis of T_p M, from the images of the chart basis."""
    return column_space(commutator_matrix(rho), tol)


def is_tangent(rho, v, tol=1e-10):
    v = np.asarray(v)
    return (np.abs(v - v.conj().T).max() < tol and abs(np.trace(v)) < tol
            and np.abs(rho @ v + v @ rho - v).max() < tol)


# ------------------------------------------------------------- symplectic form

def lift(rho, v, tol=DEFAULT_TOL.lift):
    """Minimal-norm Hermitian ``A`` with ``-i[A, rho] = v``.

    For pure ``rho`` and tangent ``v`` (``rho v + v rho = v``, ``rho v rho = 0``)
    the least-squares solution over the chart is ``A = i[v, rho]``: it solves
    the equation and is block off-diagonal, hence orthogonal to the
    commutant of ``rho``.
    """
    rho = _rho(rho)
    v = np.asarray(v)
    A = 1j * commutator(v, rho)
    A = 0.5 * (A + A.conj().T)
    residual = float(np.linalg.norm(-1j * commutator(A, rho) - v))
    if residual > tol:
        raise LiftError(f"vector is not in the tangent image: residual {residual:.3e}")
    return A


def symplectic_form(rho, v, w, A=None, B=None, tol=DEFAULT_TOL.lift):
    """``omega_p(v, w) = (i/2) Tr(rho [A, B])`` for Hermitian lifts ``A``, ``B``.

    The value is cross-checked against ``-Im <A psi, B psi>``; a disagreement
    above ``tol`` raises :class:`ReductionError`.
    """
    rho = _rho(rho)
    A = lift(rho, v) if A is None else np.asarray(A)
    B = lift(rho, w) if B is None else np.asarray(B)
    value = float(np.real(0.5j * np.trace(rho @ commutator(A, B))))
    psi = _psi_from_rho(rho)
    check = -float(np.imag(np.vdot(A @ psi, B @ psi)))
    if abs(value - check) > tol:
        raise ReductionError(f"symplectic form evaluations disagree: {value} vs {check}")
    return value


def symplectic_form_lift_free(rho, v, w):
    rho = _rho(rho)
    return float(np.real(0.5j * np.trace(rho @ commutator(v, w))))


# ------------------------------------------------------------ orbit geometry

def orbit_generators(psi):
    """Coordinates ``(64, 9)`` of the generators of the nine Lie basis elements."""
    return to_coords(lie.basis_generators(_rho(psi))).T


def _torus_generators(rho):
    return to_coords(lie.basis_generators(rho, lie.TORUS_INDICES)).T


def orbit_tangent(psi, tol=DEFAULT_TOL.rank):
    """Orthonormal basis of k.p as tangent matrices, and its dimension."""
    Q = column_space(orbit_generators(psi), tol)
    return from_coords(Q.T), Q.shape[1]


def stabilizer_dimension(psi, tol=DEFAULT_TOL.rank):
    return 9 - rank(orbit_generators(psi), tol)


def _require_normalized(psi, tol=DEFAULT_TOL):
    if not is_weyl_normalized(psi, tol.weyl):
        raise NotWeylNormalizedError(
            "state is not Weyl-normalized; call moment.weyl_normalize first")


def _level_set_coords(rho, tol):
    T = tangent_basis(rho, tol)
    C = orbit_generators(rho).T @ omega_matrix(rho) @ T
    N = nullspace(C, tol)
    return T @ N.T


def level_set_tangent(psi, tol=DEFAULT_TOL):
    """Orthonormal basis of (k.p)^omega, the tangent space of the moment level set."""
    psi = as_state(psi)
    _require_normalized(psi, tol)
    return from_coords(_level_set_coords(density(psi), tol.rank).T)


def _torus_coords(rho, tol):
    return column_space(_torus_generators(rho), tol)


def torus_directions(psi, tol=DEFAULT_TOL):
    """Orthonormal basis of k_xi.p (images of the torus) and its dimension."""
    psi = as_state(psi)
    _require_normalized(psi, tol)
    Q = _torus_coords(density(psi), tol.rank)
    return from_coords(Q.T), Q.shape[1]


# ------------------------------------------------------------------ V'_x

def vprime_constraints(rho):
    """Rows ``c`` with ``Tr(rho [eta, A]) = i c . coords(A)`` for the six off-diagonal eta."""
    rows = []
    for eta in lie.basis_offdiag():
        E = lie.embed(eta)
        rows.append(to_coords(-1j * commutator(rho, E)))
    return np.array(rows)


def vprime_residual(rho, A):
    """Largest ``|Tr(rho [eta, A])|`` over the six off-diagonal eta."""
    rho = _rho(rho)
    vals = [abs(np.trace(rho @ commutator(lie.embed(eta), A))) for eta in lie.basis_offdiag()]
    return float(max(vals))


def vprime_solver(psi, tol=DEFAULT_TOL):
    """Basis of the Hermitian operators annihilated by the six off-diagonal constraints."""
    psi = as_state(psi)
    _require_normalized(psi, tol)
    N = nullspace(vprime_constraints(density(psi)), tol.rank)
    return from_coords(N)


def vprime_diagnostic(psi, tol=DEFAULT_TOL):
    """Compare the six-constraint space with the nine-constraint level-set tangent.

    Reports the dimension of V'_x, of its tangent image ``{-i[A, rho]}``, of
    (k.p)^omega, and how well the latter satisfies the six constraints.
    """
    psi = as_state(psi)
    _require_normalized(psi, tol)
    rho = density(psi)
    R = vprime_constraints(rho)
    N = nullspace(R, tol.rank)
    image = commutator_matrix(rho) @ N.T
    level = _level_set_coords(rho, tol.rank)
    lifts = np.linalg.pinv(commutator_matrix(rho), rcond=1e-12) @ level
    containment = float(np.abs(R @ lifts).max()) if lifts.size else 0.0
    image_rank = rank(image, tol.rank)
    return {
        "vprime_dim": int(N.shape[0]),
        "constraint_rank": rank(R, tol.rank),
        "vprime_tangent_image_dim": image_rank,
        "level_set_dim": int(level.shape[1]),
        "containment_residual": containment,
        "discrepancy": image_rank - int(level.shape[1]),
    }


# ------------------------------------------------------------- normal space

@dataclass
class NormalSpace:
    v1: np.ndarray
    v2: np.ndarray
    omega: float
    A1: np.ndarray
    A2: np.ndarray

    @property
    def vectors(self):
        return np.array([self.v1, self.v2])

    @property
    def lifts(self):
        return np.array([self.A1, self.A2])


def _check_principal_interior(psi, tol):
    lam = local_spectra(psi)
    if chamber_position(lam, tol.interior_gap) is not ChamberPosition.INTERIOR_CHAMBER:
        raise OnWallError(f"local spectra {np.round(lam, 12).tolist()} lie on a chamber wall")
    s = stabilizer_dimension(psi, tol.rank)
    if s != 0:
        raise NotPrincipalError(f"stabilizer has dimension {s}")


def _normal_coords(rho, tol):
    level = _level_set_coords(rho, tol)
    Q = _torus_coords(rho, tol)
    P = level - Q @ (Q.T @ level)
    return column_space(P, tol)


def symplectic_normal_space(psi, tol=DEFAULT_TOL):
    """Two-dimensional complement of k_xi.p inside (k.p)^omega, with lifts.

    The basis is HS-orthonormal and oriented so that ``omega(v1, v2) > 0``.
    """
    psi = as_state(psi)
    _require_normalized(psi, tol)
    _check_principal_interior(psi, tol)
    rho = density(psi)
    V = _normal_coords(rho, tol.rank)
    if V.shape[1] != 2:
        raise ReductionError(f"symplectic normal space has dimension {V.shape[1]}, expected 2")
    # the SVD basis of a 2-plane is an arbitrary rotation; pin it to a reference
    a = V.T @ GAUGE_REFERENCE
    if np.linalg.norm(a) < 1e-6:
        a = np.array([1.0, 0.0])
    a = a / np.linalg.norm(a)
    V = V @ np.array([[a[0], -a[1]], [a[1], a[0]]])
    v1, v2 = from_coords(V.T)
    A1, A2 = lift(rho, v1, tol.lift), lift(rho, v2, tol.lift)
    w = symplectic_form(rho, v1, v2, A1, A2, tol.lift)
    if w < 0:
        v2, A2, w = -v2, -A2, -w
    return NormalSpace(v1, v2, w, A1, A2)


# fixed torus angles used to probe the reduced form
TORUS_PROBES = ((0.3, -1.1, 2.0), (np.pi / 2, 0.7, -0.4), (2.5, 2.5, -3.0))


def torus_form_invariance(psi, angles=TORUS_PROBES, tol=DEFAULT_TOL):
    """Largest change of the reduced form value when ``psi`` is moved by torus elements.

    A torus element keeps a Weyl-normalized state Weyl-normalized, so the
    normal space can be rebuilt at the moved point and its form compared.
    """
    psi = as_state(psi)
    w0 = symplectic_normal_space(psi, tol).omega
    dev = 0.0
    for th in angles:
        g = np.array([np.diag([np.exp(1j * t), np.exp(-1j * t)]) for t in th])
        moved = local_operator(g) @ psi
        dev = max(dev, abs(symplectic_normal_space(moved, tol).omega - w0))
    return float(dev)


# ------------------------------------------------------------- local model

@dataclass
class LocalModel:
    psi: np.ndarray
    orbit_basis: np.ndarray
    torus_basis: np.ndarray
    level_set_basis: np.ndarray
    normal: NormalSpace
    dims: tuple
    residuals: dict = field(default_factory=dict)
    diagnostic: dict = field(default_factory=dict)

    @property
    def omega(self):
        return self.normal.omega

    def to_json(self):
        return {
            "dimensions": {
                "orbit": self.dims[0],
                "level_set": self.dims[1],
                "torus": self.dims[2],
                "normal": self.dims[3],
                "total": self.dims[0] + self.dims[2] + self.dims[3],
            },
            "reduced_form": self.normal.omega,
            "residuals": self.residuals,
            "vprime_diagnostic": self.diagnostic,
            "lifts": [to_coords(A).tolist() for A in self.normal.lifts],
        }


def local_model(psi, tol=DEFAULT_TOL):
    """Assemble the linear local model at a principal point of the chamber interior."""
    psi = as_state(psi)
    _require_normalized(psi, tol)
    _check_principal_interior(psi, tol)
    rho = density(psi)
    r = tol.rank
    orbit = column_space(orbit_generators(rho), r)
    level = _level_set_coords(rho, r)
    torus = _torus_coords(rho, r)
    normal = symplectic_normal_space(psi, tol)
    dims = (orbit.shape[1], level.shape[1], torus.shape[1], 2)
    if dims[0] + dims[2] + dims[3] != DIM_M:
        raise ReductionError(f"dimension record {dims} does not add up to {DIM_M}")

    W = omega_matrix(rho)
    gens = orbit_generators(rho)
    Vn = to_coords(normal.vectors).T
    unit = psi / np.linalg.norm(psi)
    torus_outside = torus - level @ (level.T @ torus)
    residuals = {
        "level_set_constraint": float(np.abs(gens.T @ W @ level).max()),
        "normal_constraint": float(np.abs(gens.T @ W @ Vn).max()),
        "torus_outside_level_set": float(np.abs(torus_outside).max()),
        "lift": float(max(np.linalg.norm(-1j * commutator(A, rho) - v)
                          for A, v in zip(normal.lifts, normal.vectors))),
        "moment_offdiag": float(np.abs(moment_map(psi)[:, 0, 1]).max()),
        "omega_antisymmetry": abs(normal.omega + symplectic_form(rho, normal.v2, normal.v1,
                                                                 normal.A2, normal.A1)),
        "omega_dual_evaluation": abs(normal.omega + float(np.imag(np.vdot(
            normal.A1 @ unit, normal.A2 @ unit)))),
        "torus_form_invariance": torus_form_invariance(psi, tol=tol),
    }
    return LocalModel(psi, from_coords(orbit.T), from_coords(torus.T),
                      from_coords(level.T), normal, dims, residuals,
                      vprime_diagnostic(psi, tol))


# ----------------------------------------------------------- classification

@dataclass(frozen=True)
class OrbitType:
    stabilizer_dim: int

    @property
    def principal(self):
        return self.stabilizer_dim == 0

    def __str__(self):
        if self.principal:
            return "PRINCIPAL"
        return f"CONTINUOUS_STABILIZER({self.stabilizer_dim})"


def orbit_type(psi, tol=DEFAULT_TOL.rank):
    return OrbitType(stabilizer_dimension(psi, tol))


def relative_equilibrium_check(psi, F, tol=DEFAULT_TOL.rank):
    """HS distance of ``X_F(p) = -i[F, rho]`` from the orbit tangent space k.p."""
    rho = _rho(psi)
    c = to_coords(-1j * commutator(np.asarray(F), rho))
    Q = column_space(orbit_generators(rho), tol)
    return float(np.linalg.norm(c - Q @ (Q.T @ c)))
