"""Moment map of the local unitary action and its Weyl-chamber picture."""

import enum
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import lie
from .numerics import DEFAULT_TOL, eig_hermitian
from .states import apply_local, as_state, density, identity_local, marginals

HALF_ID = 0.5 * np.eye(2)


class ChamberPosition(str, enum.Enum):
    INTERIOR_CHAMBER = "INTERIOR_CHAMBER"
    WALL = "WALL"


class PolytopePosition(str, enum.Enum):
    INTERIOR = "INTERIOR"
    BOUNDARY = "BOUNDARY"
    OUTSIDE = "OUTSIDE"


def moment_map(psi):
    """Blocks ``rho^(k) - 1/2`` for k = 1, 2, 3 as a ``(3, 2, 2)`` array."""
    return marginals(psi) - HALF_ID


def equivariance_check(psi, g):
    lhs = moment_map(apply_local(g, psi))
    rhs = lie.coadjoint(g, moment_map(psi))
    return float(np.linalg.norm(lhs - rhs))


def marginal_spectra(psi):
    """Both eigenvalues of each marginal, sorted non-increasing, shape ``(3, 2)``."""
    return np.array([np.linalg.eigvalsh(r)[::-1] for r in marginals(psi)])


def local_spectra(psi):
    """Top eigenvalue of each marginal, ``(lam1, lam2, lam3)`` with ``lam_k >= 1/2``."""
    return marginal_spectra(psi)[:, 0]


def batch_local_spectra(states):
    """Vectorised :func:`local_spectra` for an ``(n, 8)`` array of states."""
    T = np.asarray(states).reshape(-1, 2, 2, 2)
    T = T / np.linalg.norm(T.reshape(len(T), -1), axis=1)[:, None, None, None]
    out = np.empty((len(T), 3))
    for k in range(3):
        M = np.moveaxis(T, k + 1, 1).reshape(len(T), 2, 4)
        rho = M @ np.conj(np.swapaxes(M, 1, 2))
        out[:, k] = np.linalg.eigvalsh(rho)[:, -1]
    return out


def _su2_from_eigvecs(U):
    det = np.linalg.det(U)
    return U / np.sqrt(det)


def weyl_normalize(psi, tol=DEFAULT_TOL):
    """Rotate ``psi`` locally so every marginal is diagonal and non-increasing.

    Returns ``(psi', g)`` with ``psi' = g.psi`` and ``g`` in SU(2)^3.  A factor
    whose marginal is degenerate is left untouched (``g_k = 1``).
    """
    psi = as_state(psi)
    g = identity_local()
    for k, rho in enumerate(marginals(psi)):
        w, U = eig_hermitian(rho)
        if w[0] - w[1] <= tol.degenerate:
            continue
        g[k] = _su2_from_eigvecs(U).conj().T
    return apply_local(g, psi), g


def is_weyl_normalized(psi, tol=DEFAULT_TOL.weyl):
    for rho in marginals(psi):
        if abs(rho[0, 1]) > tol or rho[1, 1].real - rho[0, 0].real > tol:
            return False
    return True


def hamiltonian_J(psi, X):
    """``J_X(p) = (i/2) Tr(X rho)`` with ``X`` embedded in the 8x8 operators."""
    rho = density(psi)
    return float(np.real(0.5j * np.trace(lie.embed(X) @ rho)))


def chamber_position(lam, gap=DEFAULT_TOL.interior_gap):
    lam = np.asarray(lam, dtype=float)
    if np.all(lam > 0.5 + gap):
        return ChamberPosition.INTERIOR_CHAMBER
    return ChamberPosition.WALL


@dataclass(frozen=True)
class Facet:
    coeffs: tuple
    rhs: float
    sense: str = "<="

    def __post_init__(self):
        if self.sense not in ("<=", ">="):
            raise ValueError(f"facet sense must be '<=' or '>=', got {self.sense!r}")
        if len(self.coeffs) != 3:
            raise ValueError("facet needs exactly three coefficients")

    def slack(self, lam):
        """Non-negative when satisfied; zero on the facet."""
        val = float(np.dot(self.coeffs, lam))
        return self.rhs - val if self.sense == "<=" else val - self.rhs

    def to_json(self):
        return {"coeffs": list(self.coeffs), "rhs": self.rhs, "sense": self.sense}


def parse_facets(items):
    try:
        return [Facet(tuple(float(c) for c in it["coeffs"]), float(it["rhs"]),
                      it.get("sense", "<=")) for it in items]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed facet list: {exc}") from None


def load_facets(path=None):
    """Facet inequalities over (lam1, lam2, lam3); package default if no path."""
    if path is None:
        text = resources.files("trireduce").joinpath("data/facets.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    return parse_facets(json.loads(text))


def polytope_position(lam, facets=None, gap=DEFAULT_TOL.polytope_gap):
    facets = load_facets() if facets is None else facets
    slacks = np.array([f.slack(lam) for f in facets])
    if np.any(slacks < -gap):
        return PolytopePosition.OUTSIDE
    if np.any(slacks <= gap):
        return PolytopePosition.BOUNDARY
    return PolytopePosition.INTERIOR


def facet_violations(lam, facets=None, gap=DEFAULT_TOL.polytope_gap):
    """Indices of facets violated by more than ``gap``."""
    facets = load_facets() if facets is None else facets
    return [i for i, f in enumerate(facets) if f.slack(lam) < -gap]
