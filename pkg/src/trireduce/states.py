"""Three-qubit pure states: amplitudes, marginals, local unitaries, catalog.

A state is a length-8 complex array of amplitudes ``C[i1 i2 i3]`` with qubit 1
the most significant bit. A local unitary is a ``(3, 2, 2)`` complex array
holding ``(g1, g2, g3)``.
"""

import json

import numpy as np

N_QUBITS = 3
DIM = 8

CATALOG = ("SEP", "BISEP1", "BISEP2", "BISEP3", "GHZ", "W", "HAAR_RANDOM")


class StateError(ValueError):
    pass


def as_state(psi):
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if psi.shape != (DIM,):
        raise StateError(f"expected {DIM} amplitudes, got {psi.size}")
    if not np.all(np.isfinite(psi)):
        raise StateError("amplitudes must be finite")
    return psi


def canonicalize(psi):
    """Unit norm, first nonzero amplitude real and positive."""
    psi = as_state(psi)
    nrm = np.linalg.norm(psi)
    if nrm == 0.0:
        raise StateError("zero vector is not a state")
    psi = psi / nrm
    first = np.flatnonzero(np.abs(psi) > 1e-12)[0]
    c = psi[first]
    psi = psi * (abs(c) / c)
    psi[first] = abs(psi[first])
    return psi


def density(psi):
    psi = as_state(psi)
    nrm2 = np.vdot(psi, psi).real
    if nrm2 == 0.0:
        raise StateError("zero vector is not a state")
    return np.outer(psi, psi.conj()) / nrm2


def _check_index(k):
    if k not in (1, 2, 3):
        raise StateError(f"subsystem index must be 1, 2 or 3, got {k!r}")


def reduce(psi, k):
    """Reduced density matrix of qubit ``k`` (1-based), ``Tr_rest |psi><psi|``."""
    _check_index(k)
    psi = as_state(psi)
    M = np.moveaxis(psi.reshape(2, 2, 2), k - 1, 0).reshape(2, 4)
    rho = M @ M.conj().T
    return rho / np.trace(rho).real


def marginals(psi):
    return np.array([reduce(psi, k) for k in (1, 2, 3)])


def check_local_unitary(g, tol=1e-10):
    g = np.asarray(g, dtype=np.complex128)
    if g.shape != (3, 2, 2):
        raise StateError(f"local unitary must have shape (3, 2, 2), got {g.shape}")
    for k, gk in enumerate(g, start=1):
        if np.abs(gk @ gk.conj().T - np.eye(2)).max() > tol:
            raise StateError(f"factor {k} is not unitary")
        if abs(np.linalg.det(gk) - 1) > tol:
            raise StateError(f"factor {k} does not have unit determinant")
    return g


def local_operator(g):
    """``g1 (x) g2 (x) g3`` as an 8x8 matrix."""
    return np.kron(np.kron(g[0], g[1]), g[2])


def apply_local(g, psi):
    g = check_local_unitary(g)
    return local_operator(g) @ as_state(psi)


def identity_local():
    return np.array([np.eye(2, dtype=np.complex128)] * 3)


def random_su2(rng):
    # uniform unit quaternion -> Haar SU(2)
    q = rng.standard_normal(4)
    a, b, c, d = q / np.linalg.norm(q)
    return np.array([[a + 1j * b, c + 1j * d],
                     [-c + 1j * d, a - 1j * b]])


def random_local_unitary(rng):
    return np.array([random_su2(rng) for _ in range(3)])


def haar_state(seed):
    rng = np.random.default_rng(seed)
    re = rng.standard_normal(DIM)
    im = rng.standard_normal(DIM)
    return canonicalize(re + 1j * im)


def _basis_state(bits):
    psi = np.zeros(DIM, dtype=np.complex128)
    psi[int(bits, 2)] = 1.0
    return psi


def bisep(k):
    """Bell pair on the two qubits other than ``k``, ``|0>`` on qubit ``k``."""
    _check_index(k)
    psi = np.zeros(DIM, dtype=np.complex128)
    for b in "01":
        bits = [b, b]
        bits.insert(k - 1, "0")
        psi[int("".join(bits), 2)] = 1 / np.sqrt(2)
    return psi


def catalog(name, seed=None):
    name = name.upper()
    if name == "SEP":
        psi = _basis_state("000")
    elif name in ("BISEP1", "BISEP2", "BISEP3"):
        psi = bisep(int(name[-1]))
    elif name == "GHZ":
        psi = (_basis_state("000") + _basis_state("111")) / np.sqrt(2)
    elif name == "W":
        psi = (_basis_state("001") + _basis_state("010") + _basis_state("100")) / np.sqrt(3)
    elif name == "HAAR_RANDOM":
        return haar_state(0 if seed is None else int(seed))
    else:
        raise StateError(f"unknown catalog state {name!r}; choose from {', '.join(CATALOG)}")
    return canonicalize(psi)


def state_to_json(psi):
    psi = as_state(psi)
    return {"amplitudes": [[float(c.real), float(c.imag)] for c in psi]}


def state_from_json(obj):
    try:
        amps = obj["amplitudes"]
        pairs = [(float(re), float(im)) for re, im in amps]
    except (KeyError, TypeError, ValueError) as exc:
        raise StateError(f"malformed state object: {exc}") from None
    return canonicalize(np.array([re + 1j * im for re, im in pairs]))


def load_state(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise StateError(f"cannot read state file {path}: {exc}") from None
    return state_from_json(obj)


def save_state(psi, path):
    with open(path, "w") as fh:
        json.dump(state_to_json(psi), fh, indent=2)
        fh.write("\n")
