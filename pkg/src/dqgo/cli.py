"""Command line entry point: ``dqgo <subcommand> ...``."""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .calibration import calibrate, objective_curve
from .experiments import (
    ExperimentConfig,
    emit_outputs,
    instance_seed,
    reproduce,
    run_delta_c_comparison,
    run_sp_experiment,
    run_time_sweep,
)
from .ising import load_instance, save_instance, sk_instance_from_seed
from .qgo import QgoConfig, energy_landscape
from .schedule import build_trotter_circuit, export_openqasm, load_schedule


def _floats(text: str):
    return [float(v) for v in text.split(",") if v.strip()]


def cmd_calibrate(args) -> int:
    out = []
    for n in args.n:
        cal = calibrate(n, args.T, args.dt, cache_dir=args.cache_dir)
        entry = cal.to_dict()
        if args.curve:
            entry["objective_curve"] = objective_curve(n, cal.b_opt, [0.1 + 0.05 * k for k in range(59)], args.T, args.dt)
        out.append(entry)
    print(json.dumps(out if len(out) > 1 else out[0], indent=2))
    return 0


def cmd_gen_instances(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for n in args.n:
        for index in range(args.count):
            seed = instance_seed(args.seed, n, index)
            save_instance(sk_instance_from_seed(n, seed), out / f"sk_n{n}_{index:04d}.json")
    print(f"wrote {args.count * len(args.n)} instances to {out}")
    return 0


def _print_summary(report) -> None:
    for cell in report.cells:
        print(f"{cell.algorithm:6s} n={cell.n:<3d} T={cell.T:<5g} delta_c={cell.delta_c} "
              f"shots={cell.shots:<6d} SP={cell.sp:.3f} ({cell.successes}/{cell.instances})")


def _config(args) -> ExperimentConfig:
    config = ExperimentConfig.load(args.config)
    if args.out:
        config = ExperimentConfig.from_dict({**config.to_dict(), "output_dir": args.out})
    return config


def cmd_run(args) -> int:
    config = _config(args)
    report = run_sp_experiment(config)
    paths = emit_outputs(report)
    _print_summary(report)
    print(f"results: {paths['results']}")
    return 0


def cmd_sweep(args) -> int:
    config = _config(args)
    report = run_time_sweep(config, args.times)
    paths = emit_outputs(report)
    _print_summary(report)
    print(f"results: {paths['results']}")
    return 0


def cmd_compare_dc(args) -> int:
    config = _config(args)
    pair = [v if v == "c_opt" else float(v) for v in args.pair]
    comparison = run_delta_c_comparison(config, pair)
    out = Path(config.output_dir or ".")
    emit_outputs(comparison.low, out / "low")
    emit_outputs(comparison.high, out / "high")
    rows = comparison.rows()
    with (out / "delta_c_comparison.csv").open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    for row in rows:
        print(f"n={row['n']} T={row['T']:g}  SP(low)={row['sp_low']:.3f}  SP(high)={row['sp_high']:.3f}  "
              f"diff={row['difference']:+.3f}")
    return 0


def cmd_reproduce(args) -> int:
    report = reproduce(args.manifest)
    emit_outputs(report, args.out)
    _print_summary(report)
    return 0


def cmd_landscape(args) -> int:
    instance = load_instance(args.instance)
    if args.b_opt is None or args.c_opt is None:
        cal = calibrate(max(instance.n, 2), args.T, args.dt, cache_dir=args.cache_dir)
        b_opt, c_opt = cal.b_opt, cal.c_opt
    else:
        b_opt, c_opt = args.b_opt, args.c_opt
    c = _floats(args.c) if args.c else [0.0] * instance.n
    config = QgoConfig(delta_c=c_opt, c_opt=c_opt, b_opt=b_opt, T=args.T, dt=args.dt,
                       shots=args.shots, seed=args.seed)
    points = energy_landscape(instance, c, args.qubit, args.lo, args.hi, args.steps, config)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["qubit", "c_value", "energy"])
        for value, energy in points:
            writer.writerow([args.qubit, repr(value), repr(energy)])
    finally:
        if args.out:
            fh.close()
    return 0


def cmd_export_qasm(args) -> int:
    instance = load_instance(args.instance)
    sched = load_schedule(args.schedule)
    text = export_openqasm(build_trotter_circuit(instance, sched))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dqgo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="calibrate (b_opt, c_opt) for one or more sizes")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=0.1)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--curve", action="store_true", help="include the objective along c at b_opt")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("gen-instances", help="write seeded SK instances as JSON files")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_instances)

    for name, func, help_text in (
        ("run", cmd_run, "run a success-probability experiment from a JSON config"),
        ("sweep", cmd_sweep, "sweep annealing times for a JSON config"),
        ("compare-dc", cmd_compare_dc, "compare two differential intervals on one instance set"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None, help="override output_dir")
        if name == "sweep":
            p.add_argument("--times", type=float, nargs="+", default=None)
        if name == "compare-dc":
            p.add_argument("--pair", nargs=2, default=["0.1", "c_opt"])
        p.set_defaults(func=func)

    p = sub.add_parser("reproduce", help="re-run an experiment from its manifest.json")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("landscape", help="energy vs one CD coefficient, others fixed")
    p.add_argument("--instance", required=True)
    p.add_argument("--qubit", type=int, required=True)
    p.add_argument("--lo", type=float, default=-2.0)
    p.add_argument("--hi", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=81)
    p.add_argument("--c", default=None, help="comma-separated fixed CD vector (default all zero)")
    p.add_argument("--b-opt", type=float, default=None)
    p.add_argument("--c-opt", type=float, default=None)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=0.1)
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("export-qasm", help="write the annealing circuit as OpenQASM 3")
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export_qasm)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"dqgo {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
