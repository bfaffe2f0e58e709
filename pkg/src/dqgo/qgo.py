"""Greedy sign determination of the CD coefficients, the d-AQC baseline and
energy-landscape scans."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .evolution import ENGINES, evolve_batch
from .ising import GroundState, IsingInstance, brute_force_ground_state
from .schedule import AnnealSchedule
from .statevector import StateVector, sample_from_probabilities, spins_of_indices

ZERO_GRADIENT = 1e-15


@dataclass(frozen=True)
class QgoConfig:
    """Run parameters; ``shots=0`` means exact expectation values."""

    delta_c: float
    c_opt: float
    b_opt: float
    T: float = 1.0
    dt: float = 0.1
    shots: int = 0
    engine: str = "trotter"
    seed: int = 0
    a: float = 1.0
    ode_dt: float = 1e-3
    common_random_numbers: bool = False

    def __post_init__(self):
        if not self.delta_c > 0:
            raise ValueError(f"delta_c must be positive, got {self.delta_c}")
        if not self.c_opt > 0:
            raise ValueError(f"c_opt must be positive, got {self.c_opt}")
        if self.shots < 0:
            raise ValueError(f"shots must be >= 0, got {self.shots}")
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}, got {self.engine!r}")

    def schedule(self, c: Sequence[float]) -> AnnealSchedule:
        return AnnealSchedule(self.b_opt, tuple(c), self.T, self.dt, self.a)


@dataclass(frozen=True)
class GradientRecord:
    iteration: int
    component: int
    g: float
    baseline_energy: float
    forward_energy: float
    shots_used: int


@dataclass
class QgoResult:
    signs: np.ndarray
    final_c: np.ndarray
    trace: List[GradientRecord]
    total_energy_evaluations: int
    total_shots: int
    warnings: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class DaqcResult:
    ground_probability: float
    modal_config: np.ndarray
    success: bool
    shots_used: int = 0


def substream(*keys: int) -> np.random.Generator:
    return np.random.default_rng([int(k) for k in keys])


def _final_states(instance, c_rows, config: QgoConfig) -> np.ndarray:
    sched = config.schedule(np.zeros(instance.n))
    return evolve_batch(config.engine, instance, sched, c_rows, dt_int=config.ode_dt)


def _energies_from_states(instance, amps, config: QgoConfig, rngs) -> Tuple[np.ndarray, int]:
    diag = instance.diagonal()
    probs = np.abs(amps) ** 2
    if config.shots == 0:
        return probs @ diag, 0
    out = np.empty(len(probs))
    for r, (p, rng) in enumerate(zip(probs, rngs)):
        samples = sample_from_probabilities(p, config.shots, rng)
        out[r] = diag[samples].mean()
    return out, config.shots * len(probs)


def estimate_energies(instance: IsingInstance, c_rows, config: QgoConfig, rngs=None) -> Tuple[np.ndarray, int]:
    """E(c) for each row of ``c_rows``; ``rngs`` supplies one generator per row when sampling."""
    c_rows = np.atleast_2d(np.asarray(c_rows, dtype=float))
    if c_rows.shape[1] != instance.n:
        raise ValueError(f"c vector has {c_rows.shape[1]} entries, instance has {instance.n} spins")
    if config.shots and rngs is None:
        rngs = [substream(config.seed, r) for r in range(len(c_rows))]
    amps = _final_states(instance, c_rows, config)
    return _energies_from_states(instance, amps, config, rngs)


def estimate_energy(
    instance: IsingInstance,
    c: Sequence[float],
    config: QgoConfig,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[float, int]:
    """Exact <psi(T)|H^z|psi(T)> when ``shots=0``, else the shot-averaged energy."""
    if config.shots and rng is None:
        rng = substream(config.seed)
    energies, used = estimate_energies(instance, [c], config, [rng])
    return float(energies[0]), used


def gradient_component(
    instance: IsingInstance,
    c: Sequence[float],
    j: int,
    config: QgoConfig,
    baseline: Optional[Tuple[float, int]] = None,
    iteration: int = 0,
) -> GradientRecord:
    """Forward difference g_j = (E(c + delta_c e_j) - E(c)) / delta_c.

    ``baseline`` may carry an already computed ``(E(c), shots_used)`` so one
    iteration of the greedy loop shares a single E(c).
    """
    c = np.asarray(c, dtype=float)
    if c[j] != 0.0:
        raise ValueError(f"component {j} is already set (c_j = {c[j]})")
    used = 0
    if baseline is None:
        e0, used = estimate_energy(instance, c, config, _eval_rng(config, iteration, None))
    else:
        e0 = baseline[0]
    forward = c.copy()
    forward[j] = config.delta_c
    e1, used_f = estimate_energy(instance, forward, config, _eval_rng(config, iteration, j))
    return GradientRecord(iteration, j, (e1 - e0) / config.delta_c, e0, e1, used + used_f)


def _eval_rng(config: QgoConfig, iteration: int, j: Optional[int]) -> Optional[np.random.Generator]:
    if not config.shots:
        return None
    if config.common_random_numbers:
        return substream(config.seed, iteration)
    return substream(config.seed, iteration, 0 if j is None else j + 1)


def qgo_run(instance: IsingInstance, config: QgoConfig) -> QgoResult:
    """Fix one CD sign per iteration, on the unset component with the largest |g|.

    Each iteration evaluates one baseline E(c) plus one forward energy per
    unset component, then sets c_i = -c_opt sgn(g_i). The returned spins are
    sgn(c).
    """
    n = instance.n
    c = np.zeros(n)
    trace: List[GradientRecord] = []
    warnings: List[str] = []
    evaluations = 0
    total_shots = 0
    for it in range(n):
        unset = np.flatnonzero(c == 0.0)
        rows = np.repeat(c[None, :], len(unset) + 1, axis=0)
        rows[np.arange(1, len(unset) + 1), unset] = config.delta_c
        rngs = [_eval_rng(config, it, None)] + [_eval_rng(config, it, int(j)) for j in unset]
        energies, used = estimate_energies(instance, rows, config, rngs)
        evaluations += len(rows)
        total_shots += used
        e0 = float(energies[0])
        g = (energies[1:] - e0) / config.delta_c
        for j, gj, e1 in zip(unset, g, energies[1:]):
            trace.append(GradientRecord(it, int(j), float(gj), e0, float(e1), config.shots))
        # np.argmax returns the first maximum: ties go to the smallest index
        pick = int(np.argmax(np.abs(g)))
        i = int(unset[pick])
        if abs(g[pick]) < ZERO_GRADIENT:
            c[i] = config.c_opt
            warnings.append(f"iteration {it}: zero gradient on component {i}, set c_{i} = +c_opt")
        else:
            c[i] = -config.c_opt * np.sign(g[pick])
    return QgoResult(
        signs=np.sign(c).astype(int),
        final_c=c,
        trace=trace,
        total_energy_evaluations=evaluations,
        total_shots=total_shots,
        warnings=warnings,
    )


def final_state(instance: IsingInstance, c: Sequence[float], config: QgoConfig) -> StateVector:
    """psi(T) for a given CD vector, e.g. ``qgo_run(...).final_c``."""
    amps = _final_states(instance, np.asarray(c, dtype=float)[None, :], config)
    return StateVector(instance.n, amps[0])


def daqc_run(
    instance: IsingInstance,
    config: QgoConfig,
    ground: Optional[GroundState] = None,
) -> DaqcResult:
    """Anneal without the CD term (c = 0) and score against the ground set.

    Noiseless: ground-set probability mass and the most probable basis state.
    With shots: empirical ground-set frequency and the modal sample.
    Success means the reported modal configuration lies in the ground set.
    """
    if ground is None:
        ground = brute_force_ground_state(instance)
    amps = _final_states(instance, np.zeros((1, instance.n)), config)
    probs = np.abs(amps[0]) ** 2
    gidx = list(ground.ground_indices)
    if config.shots == 0:
        ground_p = float(probs[gidx].sum())
        modal = int(np.argmax(probs))
        used = 0
    else:
        samples = sample_from_probabilities(probs, config.shots, substream(config.seed))
        counts = np.bincount(samples, minlength=len(probs))
        ground_p = float(counts[gidx].sum() / config.shots)
        modal = int(np.argmax(counts))
        used = config.shots
    modal_config = spins_of_indices([modal], instance.n)[0].astype(int)
    return DaqcResult(ground_p, modal_config, modal in set(gidx), used)


def energy_landscape(
    instance: IsingInstance,
    c: Sequence[float],
    i: int,
    lo: float,
    hi: float,
    steps: int,
    config: QgoConfig,
) -> List[Tuple[float, float]]:
    """Energy as c_i sweeps ``steps`` uniform points of [lo, hi], other c_j fixed."""
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    if not 0 <= i < instance.n:
        raise ValueError(f"qubit {i} out of range for {instance.n} spins")
    values = np.linspace(lo, hi, steps)
    rows = np.repeat(np.asarray(c, dtype=float)[None, :], steps, axis=0)
    rows[:, i] = values
    rngs = [substream(config.seed, 1_000_003, k) for k in range(steps)] if config.shots else None
    energies, _ = estimate_energies(instance, rows, config, rngs)
    return [(float(v), float(e)) for v, e in zip(values, energies)]


def with_delta_c(config: QgoConfig, delta_c: float) -> QgoConfig:
    return replace(config, delta_c=delta_c)
