"""Reduced Hamiltonian dynamics on the principal stratum.

Quadratic Hamiltonians ``f(p) = 1/2 Tr(F rho)`` are stepped exactly with
``exp(-i F dt)``.  A piecewise flow keeps one generator per sub-interval;
under the normal-direction policy the generator is a lift of a basis vector
of the symplectic normal space, re-selected every step.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .moment import local_spectra, moment_map, weyl_normalize
from .numerics import DEFAULT_TOL, check_hermitian, commutator, eig_hermitian, to_coords
from .reduction import ReductionError, stabilizer_dimension, symplectic_normal_space
from .states import as_state, canonicalize, density, local_operator


def reduced_hamiltonian(psi, F):
    return float(0.5 * np.real(np.trace(np.asarray(F) @ density(psi))))


def hamiltonian_vector_field(psi, F):
    """``X_f = -i[F, rho]``."""
    return -1j * commutator(np.asarray(F), density(psi))


def poisson_bracket(psi, F, G):
    """``{f, g} = omega(X_f, X_g) = (i/2) Tr(rho [F, G])``.

    With this bracket the derivative of ``g`` along the flow of ``f`` is
    ``{f, g}``.
    """
    rho = density(psi)
    return float(np.real(0.5j * np.trace(rho @ commutator(np.asarray(F), np.asarray(G)))))


def propagator(F, dt):
    w, U = eig_hermitian(F)
    return (U * np.exp(-1j * w * dt)) @ U.conj().T


def step(psi, F, dt):
    """``exp(-i F dt) psi`` through the eigendecomposition of ``F``."""
    return propagator(F, dt) @ as_state(psi)


# Cayley hyperdeterminant of the 2x2x2 amplitude tensor
def hyperdeterminant(psi):
    a = as_state(psi).reshape(2, 2, 2)
    d1 = (a[0, 0, 0] ** 2 * a[1, 1, 1] ** 2 + a[0, 0, 1] ** 2 * a[1, 1, 0] ** 2
          + a[0, 1, 0] ** 2 * a[1, 0, 1] ** 2 + a[1, 0, 0] ** 2 * a[0, 1, 1] ** 2)
    d2 = (a[0, 0, 0] * a[1, 1, 1] * a[0, 1, 1] * a[1, 0, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 1, 0] * a[0, 0, 1]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 0] * a[0, 0, 1]
          + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1])
    d3 = (a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1]
          + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0])
    return d1 - 2 * d2 + 4 * d3


def three_tangle(psi):
    psi = as_state(psi)
    psi = psi / np.linalg.norm(psi)
    return float(4 * abs(hyperdeterminant(psi)))


def orbit_distance(psi, psi0, sweeps=200):
    """Projective distance ``sqrt(1 - max_g |<psi, g psi0>|^2)`` to the orbit of ``psi0``.

    The overlap is maximised by alternating exact updates of one factor at a
    time (polar decomposition of a 2x2 matrix), started from the Weyl frames
    of both states and from the identity.
    """
    psi = canonicalize(psi)
    psi0 = canonicalize(psi0)
    _, ga = weyl_normalize(psi)
    _, gb = weyl_normalize(psi0)
    starts = [np.einsum("kji,kjl->kil", ga.conj(), gb), np.array([np.eye(2)] * 3)]
    best = np.inf
    for g in starts:
        g = np.array(g, dtype=np.complex128)
        prev = -1.0
        for _ in range(sweeps):
            for k in range(3):
                others = [g[j] if j != k else np.eye(2) for j in range(3)]
                phi = (local_operator(others) @ psi0).reshape(2, 2, 2)
                phi = np.moveaxis(phi, k, 0).reshape(2, 4)
                tgt = np.moveaxis(psi.reshape(2, 2, 2), k, 0).reshape(2, 4)
                U, _, Vh = np.linalg.svd(phi @ tgt.conj().T)
                g[k] = Vh.conj().T @ U.conj().T
            c = abs(np.vdot(psi, local_operator(g) @ psi0))
            if c - prev < 1e-16:
                break
            prev = c
        # chordal form keeps precision when the overlap is close to one
        phi = local_operator(g) @ psi0
        ov = np.vdot(phi, psi)
        d2 = np.linalg.norm(psi - phi * ov / abs(ov)) ** 2 if abs(ov) > 0 else 2.0
        best = min(best, d2 * max(0.0, 1.0 - d2 / 4))
    return float(np.sqrt(best))


@dataclass
class FlowPolicy:
    """How the generator is chosen on each sub-interval.

    ``kind="fixed"`` uses ``generator`` throughout; ``kind="normal"`` uses the
    lift of normal basis vector ``index`` (1 or 2), re-selected every step,
    evaluated at the predicted midpoint of the step (``selection="midpoint"``)
    or at its start (``selection="start"``).
    """

    kind: str
    dt: float
    duration: float
    generator: np.ndarray = None
    index: int = 1
    stride: int = 1
    selection: str = "midpoint"

    def __post_init__(self):
        if self.kind not in ("fixed", "normal"):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.duration < self.dt:
            raise ValueError("duration must be at least one step")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.kind == "fixed":
            if self.generator is None:
                raise ValueError("fixed policy needs a generator")
            self.generator = check_hermitian(np.asarray(self.generator, dtype=np.complex128))
        elif self.index not in (1, 2):
            raise ValueError("normal-direction index must be 1 or 2")
        if self.selection not in ("midpoint", "start"):
            raise ValueError(f"unknown selection rule {self.selection!r}")

    @classmethod
    def fixed(cls, F, dt, duration, stride=1):
        return cls("fixed", dt, duration, generator=F, stride=stride)

    @classmethod
    def normal(cls, index, dt, duration, stride=1, selection="midpoint"):
        return cls("normal", dt, duration, index=index, stride=stride, selection=selection)

    @property
    def n_steps(self):
        return int(round(self.duration / self.dt))

    @property
    def label(self):
        return "fixed" if self.kind == "fixed" else f"normal{self.index}"


@dataclass
class Trajectory:
    policy: FlowPolicy
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    spectra: list = field(default_factory=list)
    moment_drift: list = field(default_factory=list)
    tangle: list = field(default_factory=list)
    hamiltonian: list = field(default_factory=list)
    norms: list = field(default_factory=list)
    exit_reason: str = None

    def record(self, t, psi, xi0, F):
        self.norms.append(float(np.linalg.norm(psi)))
        psi = canonicalize(psi)
        self.times.append(float(t))
        self.states.append(psi)
        self.spectra.append(local_spectra(psi))
        self.moment_drift.append(float(np.linalg.norm(moment_map(psi) - xi0)))
        self.tangle.append(three_tangle(psi))
        self.hamiltonian.append(reduced_hamiltonian(psi, F))

    def __len__(self):
        return len(self.times)

    def spectra_drift(self):
        S = np.array(self.spectra)
        return np.abs(S - S[0]).max(axis=1)

    def write_csv(self, path):
        header = ["t"] + [f"{p}{i}" for i in range(8) for p in ("re", "im")]
        header += ["lam1", "lam2", "lam3", "moment_drift", "tangle", "hamiltonian"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for t, psi, lam, md, tg, h in zip(self.times, self.states, self.spectra,
                                              self.moment_drift, self.tangle, self.hamiltonian):
                row = [t]
                for c in psi:
                    row += [c.real, c.imag]
                w.writerow([repr(float(x)) for x in row + list(lam) + [md, tg, h]])


class _NormalSelector:
    """Normal-space lifts at a point, in the frame of the raw (un-normalized) state."""

    def __init__(self, index, tol):
        self.index = index - 1
        self.tol = tol
        self.prev = None

    def exit_reason(self, psi):
        lam = local_spectra(psi)
        if np.min(lam) - 0.5 < self.tol.wall_exit:
            return "WALL_PROXIMITY"
        if stabilizer_dimension(psi, self.tol.rank) != 0:
            return "STABILIZER_RANK_DROP"
        return None

    def lifts(self, psi):
        psi_n, g = weyl_normalize(psi, self.tol)
        ns = symplectic_normal_space(psi_n, self.tol)
        G = local_operator(g)
        vs = np.array([G.conj().T @ v @ G for v in ns.vectors])
        As = np.array([G.conj().T @ A @ G for A in ns.lifts])
        if self.prev is not None:
            # orthogonal Procrustes: rotate the new basis onto the previous one
            C = to_coords(self.prev) @ to_coords(vs).T
            U, _, Vt = np.linalg.svd(C)
            O = U @ Vt
            vs = np.einsum("ij,jab->iab", O, vs)
            As = np.einsum("ij,jab->iab", O, As)
        return vs, As

    def select(self, psi, dt, midpoint):
        vs, As = self.lifts(psi)
        self.prev = vs
        A = As[self.index]
        if midpoint:
            self.prev, As = self.lifts(step(psi, A, dt / 2))
            A = As[self.index]
        return 0.5 * (A + A.conj().T)


def piecewise_flow(psi0, policy, tol=DEFAULT_TOL):
    """Integrate a piecewise flow from ``psi0`` and record samples every ``stride`` steps."""
    psi = canonicalize(psi0)
    xi0 = moment_map(psi)
    tr = Trajectory(policy)
    n = policy.n_steps

    if policy.kind == "fixed":
        # one generator: evaluate exp(-i F t_i) in its eigenbasis at every step
        # instead of re-applying a rounded propagator, so no error accumulates
        F = policy.generator
        w, V = eig_hermitian(F)
        c0 = V.conj().T @ psi
        tr.record(0.0, psi, xi0, F)
        for i in range(1, n + 1):
            if i % policy.stride == 0 or i == n:
                t = i * policy.dt
                tr.record(t, V @ (np.exp(-1j * w * t) * c0), xi0, F)
        return tr

    sel = _NormalSelector(policy.index, tol)
    reason = sel.exit_reason(psi)
    if reason is not None:
        raise ReductionError(f"initial state is not a principal interior point ({reason})")
    F = sel.select(psi, policy.dt, midpoint=False)
    tr.record(0.0, psi, xi0, F)
    for i in range(1, n + 1):
        reason = sel.exit_reason(psi)
        if reason is not None:
            tr.exit_reason = reason
            break
        try:
            F = sel.select(psi, policy.dt, policy.selection == "midpoint")
        except ReductionError as exc:
            tr.exit_reason = exc.code
            break
        psi = propagator(F, policy.dt) @ psi
        if i % policy.stride == 0 or i == n:
            tr.record(i * policy.dt, psi, xi0, F)
    return tr


def _drift_order(policy):
    # midpoint re-selection is second order, start-of-step selection first order
    return 2 if policy.kind == "normal" and policy.selection == "midpoint" else 1


def conservation_report(tr):
    """Drift summary; ``drift_constant`` is ``max drift / dt**drift_order``."""
    drift = tr.spectra_drift()
    order = _drift_order(tr.policy)
    H = np.array(tr.hamiltonian)
    report = {
        "policy": tr.policy.label,
        "selection": tr.policy.selection if tr.policy.kind == "normal" else None,
        "dt": tr.policy.dt,
        "duration": tr.policy.duration,
        "samples": len(tr),
        "final_time": tr.times[-1],
        "max_spectra_drift": float(drift.max()),
        "max_moment_drift": float(max(tr.moment_drift)),
        "max_norm_drift": float(np.abs(np.array(tr.norms) - 1).max()),
        "drift_order": order,
        "drift_constant": float(drift.max() / tr.policy.dt ** order),
        "hamiltonian_drift": float(np.abs(H - H[0]).max()) if tr.policy.kind == "fixed" else None,
        "tangle_initial": tr.tangle[0],
        "tangle_final": tr.tangle[-1],
        "tangle_change": tr.tangle[-1] - tr.tangle[0],
        "exit_reason": tr.exit_reason,
    }
    return report


def convergence_study(psi0, index=1, dt0=1.6e-2, halvings=4, duration=1.0,
                      selection="midpoint", tol=DEFAULT_TOL):
    """Spectra drift of normal-direction flows for ``dt0 * 2**-j``, ``j = 0..halvings``."""
    points = []
    for j in range(halvings + 1):
        dt = dt0 / 2 ** j
        policy = FlowPolicy.normal(index, dt, duration, stride=1, selection=selection)
        rep = conservation_report(piecewise_flow(psi0, policy, tol))
        points.append({"dt": dt, "max_spectra_drift": rep["max_spectra_drift"],
                       "exit_reason": rep["exit_reason"]})
    order = _drift_order(policy)
    d = np.array([p["max_spectra_drift"] for p in points])
    ratios = (d[:-1] / d[1:]).tolist()
    return {
        "points": points,
        "ratios": ratios,
        "observed_order": [float(np.log2(r)) for r in ratios],
        "drift_order": order,
        "drift_constant": float(d[-1] / points[-1]["dt"] ** order),
    }
