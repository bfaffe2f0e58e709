"""Simulator rows of the n=2 shot table: d-QGO with delta_c = c_opt and 0.1 at 10000 and 2000 shots."""
import argparse
from pathlib import Path

from dqgo.experiments import emit_outputs, run_sp_experiment

from _common import load, write_rows


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="runs")
    p.add_argument("--instances", type=int, default=None)
    args = p.parse_args()
    rows = []
    for shots in (10_000, 2_000):
        for delta_c in ("c_opt", 0.1):
            cfg = load("table1_n2.json", args.out, shots=shots, delta_c=delta_c, instances=args.instances)
            cfg = type(cfg).from_dict({**cfg.to_dict(), "output_dir": f"{cfg.output_dir}/shots{shots}_dc{delta_c}"})
            report = run_sp_experiment(cfg)
            emit_outputs(report)
            cell = report.cells[0]
            rows.append({"delta_c": cell.delta_c, "shots": shots, "sp": cell.sp})
            print(f"delta_c={cell.delta_c:<6g} shots={shots:<6d} SP={cell.sp:.3f}")
    write_rows(Path(args.out) / "table1" / "summary.csv", rows)


if __name__ == "__main__":
    main()
