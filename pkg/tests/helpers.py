import numpy as np

from dqgo.statevector import StateVector


def random_state(n, rng):
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(n, amps / np.linalg.norm(amps))


def enumerate_energy(instance, spins):
    """Independent re-summation in reversed order, for cross-checking."""
    total = 0.0
    for i in reversed(range(instance.n)):
        total += -instance.fields[i] * spins[i]
    for (i, j) in sorted(instance.couplings, reverse=True):
        total += -instance.couplings[(i, j)] * spins[i] * spins[j]
    return total


def all_configs(n):
    """Spin tuples in basis-index order (qubit 0 is the least significant bit)."""
    return [tuple(1 - 2 * ((b >> i) & 1) for i in range(n)) for b in range(1 << n)]


_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]])


def _on_qubit(op, q, n):
    full = np.eye(1)
    for k in reversed(range(n)):
        full = np.kron(full, op if k == q else np.eye(2))
    return full


def dense_hamiltonian(instance, sched, t):
    """H(t) assembled from Kronecker products, independent of the library kernels."""
    n = instance.n
    frac = t / sched.T
    H = np.diag(sched.a * frac * instance.diagonal()).astype(complex)
    for q in range(n):
        H -= sched.b * (1 - frac) * _on_qubit(_X, q, n)
        H -= sched.c[q] * np.sin(np.pi * frac) ** 2 * _on_qubit(_Y, q, n)
    return H


def midpoint_propagate(instance, sched, step=1e-3):
    """Product of exact exponentials of H at interval midpoints, from |+...+>."""
    n = instance.n
    psi = np.full(1 << n, 2 ** (-n / 2), dtype=complex)
    for k in range(round(sched.T / step)):
        w, v = np.linalg.eigh(dense_hamiltonian(instance, sched, (k + 0.5) * step))
        psi = v @ (np.exp(-1j * w * step) * (v.conj().T @ psi))
    return psi
