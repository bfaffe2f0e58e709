"""Annealing schedules and the Trotterized annealing circuit."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np

from .ising import IsingInstance
from .statevector import Gate

PRUNE_TOL = 1e-12
STEP_TOL = 1e-9


@dataclass(frozen=True)
class AnnealSchedule:
    """A(t) = a t/T,  B(t) = b (1 - t/T),  C_i(t) = c_i sin^2(pi t/T).

    ``T`` must be an integer multiple of ``dt``; ``M`` is the Trotter number.
    """

    b: float
    c: Tuple[float, ...]
    T: float = 1.0
    dt: float = 0.1
    a: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        if not self.T > 0:
            raise ValueError(f"annealing time must be positive, got {self.T}")
        if not self.dt > 0:
            raise ValueError(f"time step must be positive, got {self.dt}")
        M = round(self.T / self.dt)
        if M < 1 or abs(M * self.dt - self.T) > STEP_TOL:
            raise ValueError(f"T={self.T} is not an integer multiple of dt={self.dt}")

    @property
    def M(self) -> int:
        return round(self.T / self.dt)

    @property
    def n(self) -> int:
        return len(self.c)

    def with_c(self, c: Sequence[float]) -> "AnnealSchedule":
        return AnnealSchedule(self.b, tuple(c), self.T, self.dt, self.a)

    def step_times(self) -> np.ndarray:
        """Left endpoints t_k = k dt used for every Trotter step."""
        return np.arange(self.M) * self.dt

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": list(self.c), "T": self.T, "dt": self.dt}

    @classmethod
    def from_dict(cls, data: dict) -> "AnnealSchedule":
        unknown = set(data) - {"a", "b", "c", "T", "dt"}
        if unknown:
            raise ValueError(f"unknown schedule keys: {sorted(unknown)}")
        return cls(
            b=float(data["b"]),
            c=tuple(data["c"]),
            T=float(data.get("T", 1.0)),
            dt=float(data.get("dt", 0.1)),
            a=float(data.get("a", 1.0)),
        )


def load_schedule(path) -> AnnealSchedule:
    return AnnealSchedule.from_dict(json.loads(Path(path).read_text()))


def schedule_coefficients(sched: AnnealSchedule, t) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized A(t), B(t) and the CD envelope sin^2(pi t/T) (no bounds check)."""
    frac = np.asarray(t, dtype=float) / sched.T
    return sched.a * frac, sched.b * (1.0 - frac), np.sin(np.pi * frac) ** 2


def schedule_values(sched: AnnealSchedule, t: float) -> Tuple[float, float, np.ndarray]:
    if not 0.0 <= t <= sched.T:
        raise ValueError(f"t={t} outside [0, {sched.T}]")
    if t == sched.T:
        # exact boundary values; sin(pi) is not exactly zero in floating point
        return sched.a, 0.0, np.zeros(sched.n)
    A, B, env = schedule_coefficients(sched, t)
    return float(A), float(B), env * np.asarray(sched.c)


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: Tuple[Gate, ...]
    step_bounds: Tuple[Tuple[int, int], ...] = field(default=())

    def __len__(self) -> int:
        return len(self.gates)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def step(self, k: int) -> Tuple[Gate, ...]:
        lo, hi = self.step_bounds[k]
        return self.gates[lo:hi]


def build_trotter_circuit(instance: IsingInstance, sched: AnnealSchedule, prune: bool = True) -> Circuit:
    """Hadamard layer followed by M steps of U_z, U_x, U_y gate blocks.

    Angles carry the minus signs of H = -sum(...): ZZ couplings become
    CX RZ(-2 A J dt) CX, fields RZ(-2 A h dt), x-field RX(-2 B dt) and the CD
    term RY(-2 C_i dt).
    """
    n = instance.n
    if sched.n != n:
        raise ValueError(f"schedule has {sched.n} CD coefficients, instance has {n} spins")
    gates: List[Gate] = [Gate("H", q) for q in range(n)]
    bounds = []
    keep = (lambda angle: abs(angle) >= PRUNE_TOL) if prune else (lambda angle: True)
    times = sched.step_times()
    A_all, B_all, env_all = schedule_coefficients(sched, times)
    for k in range(sched.M):
        start = len(gates)
        A, B, env = A_all[k], B_all[k], env_all[k]
        for (i, j), J in instance.couplings.items():
            angle = -2.0 * A * J * sched.dt
            if keep(angle):
                gates += [Gate("CX", j, control=i), Gate("RZ", j, angle=angle), Gate("CX", j, control=i)]
        for i, h in enumerate(instance.fields):
            angle = -2.0 * A * h * sched.dt
            if keep(angle):
                gates.append(Gate("RZ", i, angle=angle))
        angle = -2.0 * B * sched.dt
        if keep(angle):
            gates += [Gate("RX", q, angle=angle) for q in range(n)]
        for i, ci in enumerate(sched.c):
            angle = -2.0 * env * ci * sched.dt
            if keep(angle):
                gates.append(Gate("RY", i, angle=angle))
        bounds.append((start, len(gates)))
    return Circuit(n, tuple(gates), tuple(bounds))


def _fmt(angle: float) -> str:
    return repr(float(angle))


def export_openqasm(circuit: Circuit) -> str:
    lines = ["OPENQASM 3.0;", 'include "stdgates.inc";', f"qubit[{circuit.n}] q;"]
    for g in circuit.gates:
        if g.kind == "H":
            lines.append(f"h q[{g.target}];")
        elif g.kind == "CX":
            lines.append(f"cx q[{g.control}], q[{g.target}];")
        else:
            lines.append(f"{g.kind.lower()}({_fmt(g.angle)}) q[{g.target}];")
    return "\n".join(lines) + "\n"
