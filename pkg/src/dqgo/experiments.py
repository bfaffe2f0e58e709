"""Success-probability experiments over random SK instances.

Every run is a deterministic function of its :class:`ExperimentConfig`.
Instance seeds depend only on ``(master_seed, n, index)`` so different arms
of a comparison see the same instances; measurement-noise seeds also mix in
the arm (algorithm, T, delta_c, shots) so arms never share shot noise.
"""
from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union


from . import __version__
from .calibration import CalibrationResult, calibrate
from .ising import brute_force_ground_state, sk_instance_from_seed
from .qgo import QgoConfig, daqc_run, qgo_run
from .statevector import MAX_QUBITS, CapacityError

ALGORITHMS = ("d-qgo", "v-qgo", "d-aqc")
FIG5_TIMES = (1.0, 2.0, 5.0, 10.0)
# "probability": a d-AQC instance contributes its ground-set probability;
# "modal": it contributes 1 if its most probable (or most sampled) state is a ground state
DAQC_RULES = ("probability", "modal")

RESULT_HEADER = ["algorithm", "n", "T", "delta_c", "shots", "instances", "successes", "sp"]
DETAIL_HEADER = [
    "algorithm", "n", "T", "delta_c", "shots", "index", "instance_seed", "noise_seed",
    "ground_energy", "degeneracy", "returned_config", "success", "ground_probability",
    "shots_used", "warnings",
]
PLOT_HEADER = ["figure", "algorithm", "n", "T", "delta_c", "shots", "sp"]


@dataclass(frozen=True)
class ExperimentConfig:
    algorithm: str
    sizes: Tuple[int, ...]
    T: Union[float, Tuple[float, ...]] = 1.0
    dt: float = 0.1
    delta_c: Union[float, str] = "c_opt"
    shots: int = 0
    instances: int = 100
    master_seed: int = 0
    output_dir: Optional[str] = None
    calibration_T: float = 1.0
    ode_dt: float = 1e-3
    cache_dir: Optional[str] = None
    figure: Optional[str] = None
    common_random_numbers: bool = False
    workers: int = 1
    daqc_success: str = "probability"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        if isinstance(self.T, (list, tuple)):
            object.__setattr__(self, "T", tuple(float(t) for t in self.T))
        else:
            object.__setattr__(self, "T", float(self.T))
        if self.instances < 1:
            raise ValueError(f"instances must be >= 1, got {self.instances}")
        if self.shots < 0:
            raise ValueError(f"shots must be >= 0, got {self.shots}")
        for n in self.sizes:
            if n < 1:
                raise ValueError(f"system size must be >= 1, got {n}")
            if n > MAX_QUBITS:
                raise CapacityError(f"n={n} exceeds the engine capacity of {MAX_QUBITS} qubits")
        if self.daqc_success not in DAQC_RULES:
            raise ValueError(f"daqc_success must be one of {DAQC_RULES}, got {self.daqc_success!r}")
        if isinstance(self.delta_c, str):
            if self.delta_c != "c_opt":
                raise ValueError(f"delta_c must be a number or 'c_opt', got {self.delta_c!r}")
        elif not self.delta_c > 0:
            raise ValueError(f"delta_c must be positive, got {self.delta_c}")

    @property
    def times(self) -> Tuple[float, ...]:
        return self.T if isinstance(self.T, tuple) else (self.T,)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sizes"] = list(self.sizes)
        if isinstance(self.T, tuple):
            d["T"] = list(self.T)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown experiment config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class InstanceRecord:
    algorithm: str
    n: int
    T: float
    delta_c: Optional[float]
    shots: int
    index: int
    instance_seed: int
    noise_seed: int
    ground_energy: float
    degeneracy: int
    returned_config: str
    success: bool
    ground_probability: Optional[float]
    shots_used: int
    warnings: int
    wall_time: float = field(default=0.0, compare=False)

    @property
    def key(self) -> str:
        return record_key(self.algorithm, self.n, self.T, self.delta_c, self.shots, self.index, self.noise_seed)


@dataclass
class CellResult:
    algorithm: str
    n: int
    T: float
    delta_c: Optional[float]
    shots: int
    records: List[InstanceRecord]
    daqc_success: str = "probability"

    @property
    def instances(self) -> int:
        return len(self.records)

    @property
    def successes(self) -> Union[int, float]:
        """Success count; a probability mass sum for d-AQC under the "probability" rule."""
        if self.algorithm == "d-aqc" and self.daqc_success == "probability":
            return float(sum(r.ground_probability for r in self.records))
        return sum(r.success for r in self.records)

    @property
    def sp(self) -> float:
        return self.successes / self.instances if self.records else 0.0


@dataclass
class SpReport:
    config: ExperimentConfig
    cells: List[CellResult]
    calibrations: Dict[int, CalibrationResult] = field(default_factory=dict)

    def cell(self, n: int, T: Optional[float] = None) -> CellResult:
        for c in self.cells:
            if c.n == n and (T is None or c.T == T):
                return c
        raise KeyError((n, T))

    def sp(self, n: int, T: Optional[float] = None) -> float:
        return self.cell(n, T).sp


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from a tuple of labels, independent of platform hashing."""
    text = json.dumps([str(p) if isinstance(p, float) else p for p in parts])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big") >> 1


def instance_seed(master_seed: int, n: int, index: int) -> int:
    return derive_seed("instance", master_seed, n, index)


def record_key(algorithm, n, T, delta_c, shots, index, noise_seed) -> str:
    return f"{algorithm}|{n}|{T!r}|{delta_c!r}|{shots}|{index}|{noise_seed}"


def spin_string(config) -> str:
    return "".join("+" if s > 0 else "-" for s in config)


def _single_spin_calibration(config: ExperimentConfig) -> CalibrationResult:
    # the ferromagnet needs two spins; one-spin problems reuse the n=2 constants
    return calibrate(2, config.calibration_T, config.dt, cache_dir=config.cache_dir)


def _run_instance(task) -> InstanceRecord:
    (algorithm, n, T, delta_c, shots, index, master_seed, cal, dt, ode_dt, crn) = task
    start = time.perf_counter()
    iseed = instance_seed(master_seed, n, index)
    nseed = derive_seed("noise", master_seed, algorithm, n, T, delta_c, shots, index)
    instance = sk_instance_from_seed(n, iseed)
    ground = brute_force_ground_state(instance)
    qcfg = QgoConfig(
        delta_c=delta_c if delta_c is not None else cal.c_opt,
        c_opt=cal.c_opt,
        b_opt=cal.b_opt,
        T=T,
        dt=dt,
        shots=shots,
        engine="ode" if algorithm == "v-qgo" else "trotter",
        seed=nseed,
        ode_dt=ode_dt,
        common_random_numbers=crn,
    )
    if algorithm == "d-aqc":
        res = daqc_run(instance, qcfg, ground)
        returned, success, gp, used, warns = res.modal_config, res.success, res.ground_probability, res.shots_used, 0
    else:
        res = qgo_run(instance, qcfg)
        returned, used, warns, gp = res.signs, res.total_shots, len(res.warnings), None
        success = ground.contains(returned)
    return InstanceRecord(
        algorithm, n, T, delta_c, shots, index, iseed, nseed, ground.energy, ground.degeneracy,
        spin_string(returned), bool(success), gp, used, warns, time.perf_counter() - start,
    )


def _load_records(path: Path) -> Dict[str, InstanceRecord]:
    if not path.exists():
        return {}
    out = {}
    for line in path.read_text().splitlines():
        if line.strip():
            rec = InstanceRecord(**json.loads(line))
            out[rec.key] = rec
    return out


def run_sp_experiment(
    config: ExperimentConfig,
    calibrations: Optional[Dict[int, CalibrationResult]] = None,
) -> SpReport:
    """Run every (n, T) cell of ``config`` and aggregate success probabilities.

    ``calibrations`` overrides the per-size (b_opt, c_opt); missing sizes are
    calibrated (and cached) on demand. When ``output_dir`` is set, finished
    instances are appended to ``records.jsonl`` and reused on a rerun.
    """
    cals = dict(calibrations or {})
    for n in config.sizes:
        if n not in cals:
            cals[n] = (calibrate(n, config.calibration_T, config.dt, cache_dir=config.cache_dir)
                       if n >= 2 else _single_spin_calibration(config))
    store = None
    done: Dict[str, InstanceRecord] = {}
    if config.output_dir:
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        store = out / "records.jsonl"
        done = _load_records(store)
    cells = []
    for n in config.sizes:
        cal = cals[n]
        delta_c = None if config.algorithm == "d-aqc" else (
            cal.c_opt if config.delta_c == "c_opt" else float(config.delta_c))
        for T in config.times:
            tasks = [
                (config.algorithm, n, T, delta_c, config.shots, i, config.master_seed, cal,
                 config.dt, config.ode_dt, config.common_random_numbers)
                for i in range(config.instances)
            ]
            records: List[Optional[InstanceRecord]] = [None] * len(tasks)
            pending = []
            for i, task in enumerate(tasks):
                nseed = derive_seed("noise", config.master_seed, config.algorithm, n, T, delta_c, config.shots, i)
                key = record_key(config.algorithm, n, T, delta_c, config.shots, i, nseed)
                if key in done:
                    records[i] = done[key]
                else:
                    pending.append(i)
            for i, rec in zip(pending, _map(_run_instance, [tasks[i] for i in pending], config.workers)):
                records[i] = rec
                if store is not None:
                    with store.open("a") as fh:
                        fh.write(json.dumps(asdict(rec)) + "\n")
            cells.append(CellResult(config.algorithm, n, T, delta_c, config.shots, records, config.daqc_success))
    return SpReport(config, cells, cals)


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return map(fn, items)
    pool = ProcessPoolExecutor(max_workers=workers)
    try:
        # map preserves input order, so aggregation ignores completion order
        return list(pool.map(fn, items))
    finally:
        pool.shutdown()


@dataclass
class DeltaCComparison:
    low: SpReport
    high: SpReport
    pair: Tuple[Union[float, str], Union[float, str]]

    def rows(self) -> List[dict]:
        out = []
        for a, b in zip(self.low.cells, self.high.cells):
            out.append({"n": a.n, "T": a.T, "delta_c_low": a.delta_c, "delta_c_high": b.delta_c,
                        "sp_low": a.sp, "sp_high": b.sp, "difference": b.sp - a.sp})
        return out


def run_delta_c_comparison(
    config: ExperimentConfig,
    pair: Sequence[Union[float, str]] = (0.1, "c_opt"),
    calibrations: Optional[Dict[int, CalibrationResult]] = None,
) -> DeltaCComparison:
    """Same instance set under two differential intervals."""
    if config.algorithm == "d-aqc":
        raise ValueError("d-AQC has no differential interval to compare")
    first = replace(config, delta_c=pair[0],
                    output_dir=None if config.output_dir is None else str(Path(config.output_dir) / "low"))
    second = replace(config, delta_c=pair[1],
                     output_dir=None if config.output_dir is None else str(Path(config.output_dir) / "high"))
    low = run_sp_experiment(first, calibrations)
    high = run_sp_experiment(second, calibrations or low.calibrations)
    return DeltaCComparison(low, high, (pair[0], pair[1]))


def run_time_sweep(
    config: ExperimentConfig,
    times: Optional[Sequence[float]] = None,
    calibrations: Optional[Dict[int, CalibrationResult]] = None,
) -> SpReport:
    """SP over several annealing times at fixed dt, so M grows with T."""
    if times is None:
        times = config.T if isinstance(config.T, tuple) else FIG5_TIMES
    return run_sp_experiment(replace(config, T=tuple(float(t) for t in times)), calibrations)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: List[str], rows: List[list]) -> None:
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def emit_outputs(report: SpReport, out_dir=None) -> Dict[str, Path]:
    """Write results.csv, instances.csv, a plot CSV and manifest.json.

    Result CSVs hold no timing data, so identical configs give byte-identical
    files; wall times go to the manifest.
    """
    out = Path(out_dir or report.config.output_dir or ".")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    figure = report.config.figure or "sp"
    paths = {
        "results": out / "results.csv",
        "instances": out / "instances.csv",
        "plot": out / f"plot_{figure}.csv",
        "manifest": out / "manifest.json",
    }
    cells = report.cells
    _write_csv(paths["results"], RESULT_HEADER, [
        [c.algorithm, c.n, c.T, c.delta_c, c.shots, c.instances, c.successes, c.sp] for c in cells
    ])
    _write_csv(paths["instances"], DETAIL_HEADER, [
        [getattr(r, h) for h in DETAIL_HEADER] for c in cells for r in c.records
    ])
    _write_csv(paths["plot"], PLOT_HEADER, [
        [figure, c.algorithm, c.n, c.T, c.delta_c, c.shots, c.sp] for c in cells
    ])
    manifest = {
        "code_version": __version__,
        "config": report.config.to_dict(),
        "master_seed": report.config.master_seed,
        "instance_seeds": {
            str(c.n): [r.instance_seed for r in c.records] for c in cells
        },
        "calibration": {str(n): cal.to_dict() for n, cal in sorted(report.calibrations.items())},
        "wall_time_seconds": {
            f"{c.algorithm}|n={c.n}|T={c.T!r}": sum(r.wall_time for r in c.records) for c in cells
        },
    }
    try:
        paths["manifest"].write_text(json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {paths['manifest']}: {exc}") from exc
    return paths


def reproduce(manifest_path) -> SpReport:
    """Re-run the experiment recorded in a manifest."""
    data = json.loads(Path(manifest_path).read_text())
    config = ExperimentConfig.from_dict({**data["config"], "output_dir": None})
    cals = {int(n): CalibrationResult.from_dict(c) for n, c in data["calibration"].items()}
    return run_sp_experiment(config, cals)
