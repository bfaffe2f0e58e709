"""SP against system size for d-QGO (T=1), v-QGO (T=1) and d-AQC (T=1 and 10)."""
import argparse
from pathlib import Path

from dqgo.experiments import emit_outputs, run_sp_experiment

from _common import load, write_rows


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="runs")
    p.add_argument("--sizes", type=int, nargs="+", default=None)
    p.add_argument("--instances", type=int, default=None)
    p.add_argument("--skip-vqgo", action="store_true", help="the ODE arm dominates the runtime")
    args = p.parse_args()
    names = ["fig3_dqgo.json", "fig3_daqc.json"] + ([] if args.skip_vqgo else ["fig3_vqgo.json"])
    rows = []
    for name in names:
        cfg = load(name, args.out, sizes=args.sizes, instances=args.instances)
        report = run_sp_experiment(cfg)
        emit_outputs(report)
        for cell in report.cells:
            rows.append({"algorithm": cell.algorithm, "n": cell.n, "T": cell.T, "sp": cell.sp})
            print(f"{cell.algorithm:6s} n={cell.n:<3d} T={cell.T:<5g} SP={cell.sp:.3f}")
    write_rows(Path(args.out) / "fig3" / "plot_fig3_long.csv", rows)


if __name__ == "__main__":
    main()
