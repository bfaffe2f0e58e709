"""Ising problem instances: energies, SK sampling and the brute-force oracle."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .statevector import check_capacity, spins_of_indices

TIE_TOL = 1e-9


@dataclass(frozen=True)
class IsingInstance:
    """Problem Hamiltonian  H^z = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i."""

    n: int
    couplings: Dict[Tuple[int, int], float]
    fields: Tuple[float, ...]
    seed: Optional[int] = None
    _diag: List = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        clean = {}
        for (i, j), value in self.couplings.items():
            i, j = int(i), int(j)
            if not 0 <= i < j < self.n:
                raise ValueError(f"coupling key ({i}, {j}) must satisfy 0 <= i < j < {self.n}")
            if not np.isfinite(value):
                raise ValueError(f"coupling ({i}, {j}) is not finite")
            clean[(i, j)] = float(value)
        fields = tuple(float(h) for h in self.fields)
        if len(fields) != self.n:
            raise ValueError(f"expected {self.n} fields, got {len(fields)}")
        if not all(np.isfinite(fields)):
            raise ValueError("fields must be finite")
        object.__setattr__(self, "couplings", dict(sorted(clean.items())))
        object.__setattr__(self, "fields", fields)

    def diagonal(self) -> np.ndarray:
        """Classical energy of every basis index, cached (length 2^n)."""
        if not self._diag:
            self._diag.append(basis_energies(self))
        return self._diag[0]

    def scaled(self, factor: float) -> "IsingInstance":
        return IsingInstance(
            self.n,
            {k: factor * v for k, v in self.couplings.items()},
            tuple(factor * h for h in self.fields),
        )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "couplings": [[i, j, J] for (i, j), J in self.couplings.items()],
            "fields": list(self.fields),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IsingInstance":
        unknown = set(data) - {"n", "couplings", "fields", "seed"}
        if unknown:
            raise ValueError(f"unknown instance keys: {sorted(unknown)}")
        couplings = {}
        for i, j, J in data["couplings"]:
            couplings[(int(i), int(j))] = float(J)
        return cls(int(data["n"]), couplings, tuple(data["fields"]), data.get("seed"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "IsingInstance":
        return cls.from_dict(json.loads(text))


def save_instance(instance: IsingInstance, path) -> None:
    Path(path).write_text(instance.to_json() + "\n")


def load_instance(path) -> IsingInstance:
    return IsingInstance.from_json(Path(path).read_text())


def classical_energy(instance: IsingInstance, config) -> float:
    s = np.asarray(config, dtype=float)
    if s.shape != (instance.n,):
        raise ValueError(f"config has length {len(s)}, instance has {instance.n} spins")
    energy = 0.0
    for (i, j), J in instance.couplings.items():
        energy -= J * s[i] * s[j]
    return energy - float(np.dot(instance.fields, s))


def basis_energies(instance: IsingInstance) -> np.ndarray:
    """Vectorized classical energy over all 2^n basis indices."""
    n = instance.n
    check_capacity(n)
    idx = np.arange(1 << n, dtype=np.int64)
    spins = [(1 - 2 * ((idx >> i) & 1)).astype(np.float64) for i in range(n)]
    energy = np.zeros(1 << n)
    for (i, j), J in instance.couplings.items():
        energy -= J * spins[i] * spins[j]
    for i, h in enumerate(instance.fields):
        if h != 0.0:
            energy -= h * spins[i]
    return energy


@dataclass(frozen=True)
class GroundState:
    config: np.ndarray
    energy: float
    degeneracy: int
    ground_set: List[Tuple[int, ...]]
    ground_indices: Tuple[int, ...]

    def contains(self, config) -> bool:
        return tuple(int(s) for s in config) in self.ground_set


def brute_force_ground_state(instance: IsingInstance, tol: float = TIE_TOL) -> GroundState:
    """Exhaustive minimum over all 2^n configurations, with near-ties collected."""
    energies = basis_energies(instance)
    emin = float(energies.min())
    ground = np.flatnonzero(energies <= emin + tol)
    spins = spins_of_indices(ground, instance.n)
    best = spins[int(np.argmin(energies[ground]))]
    return GroundState(
        config=best,
        energy=emin,
        degeneracy=len(ground),
        ground_set=[tuple(int(v) for v in row) for row in spins],
        ground_indices=tuple(int(g) for g in ground),
    )


def sample_sk_instance(n: int, rng: np.random.Generator, seed: Optional[int] = None) -> IsingInstance:
    """SK couplings and local fields, all i.i.d. N(0, 1/n)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    sigma = np.sqrt(1.0 / n)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    J = rng.normal(0.0, sigma, size=len(pairs))
    h = rng.normal(0.0, sigma, size=n)
    return IsingInstance(n, dict(zip(pairs, J.tolist())), tuple(h.tolist()), seed)


def sk_instance_from_seed(n: int, seed: int) -> IsingInstance:
    return sample_sk_instance(n, np.random.default_rng(seed), seed=seed)


def ferromagnetic_instance(n: int, coupling: float = 1.0) -> IsingInstance:
    """All-to-all ferromagnet with uniform J_ij = ``coupling`` and no field."""
    if n < 2:
        raise ValueError(f"ferromagnetic instance needs n >= 2, got {n}")
    couplings = {(i, j): float(coupling) for i in range(n) for j in range(i + 1, n)}
    return IsingInstance(n, couplings, (0.0,) * n)
