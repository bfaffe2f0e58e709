"""Per-size calibration of (b_opt, c_opt) on a fully connected ferromagnet."""
from __future__ import annotations

import hashlib
import json
import os
from math import comb
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from .evolution import trotter_evolve_batch
from .ising import ferromagnetic_instance
from .schedule import AnnealSchedule

TIE_TOL = 1e-12
MODEL_TAG = "ferro-unit-field"
# keeps the batched grid evaluation within a few hundred MB
_BATCH_BUDGET = 1 << 22


@dataclass(frozen=True)
class GridSpec:
    """Coarse box search then a fine pass around the coarse optimum.

    If ``points`` is given, exactly those (b, c) pairs are evaluated instead.
    """

    b_range: Tuple[float, float] = (0.1, 3.0)
    c_range: Tuple[float, float] = (0.1, 3.0)
    coarse_step: float = 0.05
    fine_step: float = 0.01
    points: Optional[Tuple[Tuple[float, float], ...]] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["b_range"] = list(self.b_range)
        d["c_range"] = list(self.c_range)
        d["points"] = None if self.points is None else [list(p) for p in self.points]
        return d

    def digest(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class CalibrationResult:
    n: int
    b_opt: float
    c_opt: float
    objective: float
    T: float
    dt: float
    grid: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"n": self.n, "T": self.T, "dt": self.dt, "b_opt": self.b_opt,
                "c_opt": self.c_opt, "objective": self.objective, "grid": self.grid}

    @classmethod
    def from_dict(cls, d: dict) -> "CalibrationResult":
        return cls(int(d["n"]), float(d["b_opt"]), float(d["c_opt"]), float(d["objective"]),
                   float(d["T"]), float(d["dt"]), d.get("grid", {}))


def _axis(lo: float, hi: float, step: float) -> np.ndarray:
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(count), 10)


def calibration_coupling(n: int) -> float:
    """J = 1/(n-1): every spin feels unit total coupling, and J = 1 at n = 2.

    With J = 1 at every size the ferromagnet's energy grows like n^2 and the
    optimum leaves the (b, c) search box from n = 8 on.
    """
    return 1.0 / (n - 1)


def _collective_spin(n: int):
    """S_x, S_y eigendecompositions and the |+...+> state in the Dicke basis.

    Basis index k counts qubits in |1>, i.e. magnetization m = n/2 - k.
    """
    j = n / 2.0
    m = j - np.arange(n + 1)
    raise_ = np.zeros((n + 1, n + 1))
    for k in range(1, n + 1):
        # S+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, moving from index k to k-1
        raise_[k - 1, k] = np.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    sx = 0.5 * (raise_ + raise_.T)
    sy = (raise_ - raise_.T) / 2j
    lx, vx = np.linalg.eigh(sx)
    ly, vy = np.linalg.eigh(sy)
    plus = np.sqrt([comb(n, k) for k in range(n + 1)]) * 2.0 ** (-n / 2)
    return m, (lx, vx), (ly, vy), plus.astype(np.complex128)


def _rotations(eig, half_angles: np.ndarray) -> np.ndarray:
    """exp(-i 2a S) for a batch of half angles a, shape (len, n+1, n+1)."""
    lam, vec = eig
    phase = np.exp(-2j * half_angles[:, None] * lam[None, :])
    return np.einsum("ij,kj,lj->kil", vec, phase, vec.conj())


def symmetric_objective(n: int, b_values, c_values, T: float = 1.0, dt: float = 0.1) -> np.ndarray:
    """Ground-set probability of the calibration ferromagnet in the n+1 dim symmetric subspace.

    Uniform c keeps the annealing state permutation symmetric, so each
    Trotter step reduces to a diagonal phase and two collective rotations.
    """
    b_values = np.atleast_1d(np.asarray(b_values, dtype=float))
    c_values = np.atleast_1d(np.asarray(c_values, dtype=float))
    m, ex, ey, plus = _collective_spin(n)
    J = calibration_coupling(n)
    magnet = 2.0 * m
    energy = -J * (magnet ** 2 - n) / 2.0
    sched = AnnealSchedule(1.0, (0.0,) * n, T, dt)
    psi = np.repeat(plus[None, :], len(b_values), axis=0)
    for t in sched.step_times():
        frac = t / T
        psi = psi * np.exp(-1j * frac * dt * energy)[None, :]
        rx = _rotations(ex, -b_values * (1.0 - frac) * dt)
        ry = _rotations(ey, -c_values * np.sin(np.pi * frac) ** 2 * dt)
        psi = np.einsum("kij,kj->ki", ry, np.einsum("kij,kj->ki", rx, psi))
    return np.abs(psi[:, 0]) ** 2 + np.abs(psi[:, -1]) ** 2


def ground_set_objective(n: int, b_values, c_values, T: float = 1.0, dt: float = 0.1) -> np.ndarray:
    """P(all up) + P(all down) after annealing the ferromagnet with uniform c (full statevector)."""
    b_values = np.atleast_1d(np.asarray(b_values, dtype=float))
    c_values = np.atleast_1d(np.asarray(c_values, dtype=float))
    instance = ferromagnetic_instance(n, calibration_coupling(n))
    sched = AnnealSchedule(1.0, (0.0,) * n, T, dt)
    out = np.empty(len(b_values))
    chunk = max(1, _BATCH_BUDGET >> n)
    for lo in range(0, len(b_values), chunk):
        sl = slice(lo, lo + chunk)
        rows = np.repeat(c_values[sl, None], n, axis=1)
        amps = trotter_evolve_batch(instance, sched, rows, b_values[sl])
        out[sl] = np.abs(amps[:, 0]) ** 2 + np.abs(amps[:, -1]) ** 2
    return out


def _best(b, c, obj) -> int:
    """Index of the maximum; near-ties go to smaller c, then smaller b."""
    top = obj.max()
    cand = np.flatnonzero(obj >= top - TIE_TOL)
    order = np.lexsort((b[cand], c[cand]))
    return int(cand[order[0]])


OBJECTIVES = {"symmetric": symmetric_objective, "statevector": ground_set_objective}


def grid_search(n: int, grid: GridSpec, T: float = 1.0, dt: float = 0.1, method: str = "symmetric"):
    """Exhaustive evaluation; returns (best index, b points, c points, objectives)."""
    objective = OBJECTIVES[method]
    if grid.points is not None:
        if len(grid.points) == 0:
            raise ValueError("calibration grid is empty")
        pts = np.asarray(grid.points, dtype=float)
        b, c = pts[:, 0], pts[:, 1]
        obj = objective(n, b, c, T, dt)
        return _best(b, c, obj), b, c, obj
    bs = _axis(*grid.b_range, grid.coarse_step)
    cs = _axis(*grid.c_range, grid.coarse_step)
    if len(bs) == 0 or len(cs) == 0 or grid.b_range[0] > grid.b_range[1] or grid.c_range[0] > grid.c_range[1]:
        raise ValueError("calibration grid is empty")
    B, C = np.meshgrid(bs, cs, indexing="ij")
    b, c = B.ravel(), C.ravel()
    obj = objective(n, b, c, T, dt)
    k = _best(b, c, obj)
    if grid.fine_step and grid.fine_step < grid.coarse_step:
        fb = _axis(max(grid.b_range[0], b[k] - grid.coarse_step),
                   min(grid.b_range[1], b[k] + grid.coarse_step), grid.fine_step)
        fc = _axis(max(grid.c_range[0], c[k] - grid.coarse_step),
                   min(grid.c_range[1], c[k] + grid.coarse_step), grid.fine_step)
        FB, FC = np.meshgrid(fb, fc, indexing="ij")
        b = np.concatenate([b, FB.ravel()])
        c = np.concatenate([c, FC.ravel()])
        obj = np.concatenate([obj, objective(n, FB.ravel(), FC.ravel(), T, dt)])
        k = _best(b, c, obj)
    return k, b, c, obj


def default_cache_dir() -> Path:
    return Path(os.environ.get("DQGO_CACHE_DIR", Path.home() / ".cache" / "dqgo"))


def cache_path(cache_dir, n: int, T: float, dt: float, grid: GridSpec) -> Path:
    return Path(cache_dir) / f"calib_{MODEL_TAG}_n{n}_T{T!r}_dt{dt!r}_{grid.digest()}.json"


def calibrate(
    n: int,
    T: float = 1.0,
    dt: float = 0.1,
    grid: Optional[GridSpec] = None,
    cache_dir=None,
    method: str = "symmetric",
) -> CalibrationResult:
    """Maximize the ferromagnet's final ground-set probability over (b, c).

    Results are cached as JSON under ``cache_dir`` (pass ``False`` to skip
    the cache), keyed by size, annealing time, step and grid digest.
    ``method="statevector"`` evaluates on the full 2^n state instead of the
    symmetric subspace; both give the same objective.
    """
    if method not in OBJECTIVES:
        raise ValueError(f"unknown calibration method {method!r}")
    if n < 2:
        raise ValueError(f"calibration needs n >= 2, got {n}")
    grid = grid or GridSpec()
    path = None
    if cache_dir is not False:
        path = cache_path(default_cache_dir() if cache_dir is None else cache_dir, n, T, dt, grid)
        if path.exists():
            return CalibrationResult.from_dict(json.loads(path.read_text()))
    k, b, c, obj = grid_search(n, grid, T, dt, method)
    result = CalibrationResult(n, float(b[k]), float(c[k]), float(min(1.0, obj[k])), T, dt, grid.to_dict())
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(result.to_dict(), indent=2) + "\n")
    return result


def objective_curve(n: int, b: float, c_values, T: float = 1.0, dt: float = 0.1) -> List[Tuple[float, float]]:
    """Objective along c at fixed b, for documenting a calibration."""
    c_values = np.asarray(c_values, dtype=float)
    obj = symmetric_objective(n, np.full(len(c_values), b), c_values, T, dt)
    return [(float(x), float(y)) for x, y in zip(c_values, obj)]
