"""SP against annealing time T for d-QGO and d-AQC at fixed dt."""
import argparse
from pathlib import Path

from dqgo.experiments import emit_outputs, run_time_sweep

from _common import load, write_rows


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="runs")
    p.add_argument("--times", type=float, nargs="+", default=None)
    p.add_argument("--instances", type=int, default=None)
    args = p.parse_args()
    rows = []
    for name in ("fig5_dqgo.json", "fig5_daqc.json"):
        cfg = load(name, args.out, instances=args.instances)
        report = run_time_sweep(cfg, args.times)
        emit_outputs(report)
        for cell in report.cells:
            rows.append({"algorithm": cell.algorithm, "n": cell.n, "T": cell.T, "sp": cell.sp})
            print(f"{cell.algorithm:6s} T={cell.T:<5g} SP={cell.sp:.3f}")
    write_rows(Path(args.out) / "fig5" / "plot_fig5_long.csv", rows)


if __name__ == "__main__":
    main()
