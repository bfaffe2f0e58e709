"""Dense statevector simulation for the annealing gate set.

Bit convention: basis index ``b`` stores qubit ``i`` in bit ``i`` (qubit 0 is
the least significant bit). ``|0>`` on a qubit is the sigma^z = +1 eigenstate,
so the spin of qubit ``i`` in basis state ``b`` is ``1 - 2 * bit_i(b)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

MAX_QUBITS = 24

GATE_KINDS = ("H", "RX", "RY", "RZ", "CX")


class CapacityError(ValueError):
    """Requested system is larger than the dense engine supports."""


def check_capacity(n: int, max_qubits: Optional[int] = None) -> None:
    limit = MAX_QUBITS if max_qubits is None else max_qubits
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")
    if n > limit:
        raise CapacityError(f"{n} qubits exceeds the configured maximum of {limit}")


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError(
                f"expected {1 << self.num_qubits} amplitudes, got shape {self.amplitudes.shape}"
            )

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(num_qubits, amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int
    control: Optional[int] = None
    angle: Optional[float] = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "CX":
            if self.control is None or self.control == self.target:
                raise ValueError("CX needs a control distinct from its target")
        elif self.control is not None:
            raise ValueError(f"{self.kind} takes no control qubit")
        if self.kind in ("RX", "RY", "RZ"):
            if self.angle is None or not np.isfinite(self.angle):
                raise ValueError(f"{self.kind} needs a finite angle")

    def matrix(self) -> np.ndarray:
        """2x2 unitary for single-qubit kinds (half-angle rotation convention)."""
        if self.kind == "H":
            return np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)
        half = 0.5 * self.angle
        cos, sin = np.cos(half), np.sin(half)
        if self.kind == "RX":
            return np.array([[cos, -1j * sin], [-1j * sin, cos]], dtype=np.complex128)
        if self.kind == "RY":
            return np.array([[cos, -sin], [sin, cos]], dtype=np.complex128)
        if self.kind == "RZ":
            return np.array([[np.exp(-1j * half), 0], [0, np.exp(1j * half)]], dtype=np.complex128)
        raise ValueError("CX has no single-qubit matrix")


def init_plus_state(n: int, max_qubits: Optional[int] = None) -> StateVector:
    """Uniform superposition |+...+>, i.e. a Hadamard on every qubit of |0...0>."""
    check_capacity(n, max_qubits)
    dim = 1 << n
    return StateVector(n, np.full(dim, dim ** -0.5, dtype=np.complex128))


def apply_single_qubit(amps: np.ndarray, n: int, qubit: int, mat: np.ndarray) -> np.ndarray:
    """Apply a 2x2 matrix to ``qubit`` of a flat amplitude array, in place."""
    view = amps.reshape(1 << (n - 1 - qubit), 2, 1 << qubit)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = mat[0, 0] * a0 + mat[0, 1] * a1
    view[:, 1, :] = mat[1, 0] * a0 + mat[1, 1] * a1
    return amps


def apply_cx(amps: np.ndarray, n: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(1 << n)
    src = idx[((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)]
    dst = src | (1 << target)
    amps[src], amps[dst] = amps[dst].copy(), amps[src].copy()
    return amps


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Multiply ``state`` by the gate's unitary in place and return it."""
    n = state.num_qubits
    if not 0 <= gate.target < n:
        raise ValueError(f"target {gate.target} out of range for {n} qubits")
    if gate.kind == "CX":
        if not 0 <= gate.control < n:
            raise ValueError(f"control {gate.control} out of range for {n} qubits")
        apply_cx(state.amplitudes, n, gate.control, gate.target)
    else:
        apply_single_qubit(state.amplitudes, n, gate.target, gate.matrix())
    return state


def apply_gates(state: StateVector, gates) -> StateVector:
    for gate in gates:
        apply_gate(state, gate)
    return state


def spins_of_indices(indices: np.ndarray, n: int) -> np.ndarray:
    """Map basis indices to spin rows ``s_i = 1 - 2 * bit_i``, shape (len, n)."""
    indices = np.asarray(indices, dtype=np.int64)
    bits = (indices[:, None] >> np.arange(n)) & 1
    return (1 - 2 * bits).astype(np.int8)


def index_of_spins(spins) -> int:
    spins = np.asarray(spins)
    bits = (1 - spins) // 2
    return int(np.sum(bits.astype(np.int64) << np.arange(len(spins))))


def expectation_problem_energy(state: StateVector, instance) -> float:
    """<psi|H^z|psi> for the diagonal problem Hamiltonian of ``instance``."""
    if instance.n != state.num_qubits:
        raise ValueError(f"instance has {instance.n} spins, state has {state.num_qubits} qubits")
    return float(np.dot(state.probabilities(), instance.diagonal()))


def _cumulative(probs: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs)
    return cdf / cdf[-1]


def sample_bitstrings(state: StateVector, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``shots`` i.i.d. basis indices from the Born distribution.

    Sampling is inverse-CDF on ``rng.random(shots)``, so two states sampled
    with identically seeded generators use common uniforms.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    return sample_from_probabilities(state.probabilities(), shots, rng)


def sample_from_probabilities(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    cdf = _cumulative(probs)
    u = rng.random(shots)
    out = np.searchsorted(cdf, u, side="right")
    return np.minimum(out, len(probs) - 1)


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.num_qubits != b.num_qubits:
        raise ValueError("fidelity needs states of equal size")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)
