"""SP of d-QGO with delta_c = 0.1 against delta_c = c_opt on one shared instance set."""
import argparse
from pathlib import Path

from dqgo.experiments import emit_outputs, run_delta_c_comparison

from _common import load, write_rows


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="runs")
    p.add_argument("--sizes", type=int, nargs="+", default=None)
    p.add_argument("--instances", type=int, default=None)
    p.add_argument("--shots", type=int, default=None)
    args = p.parse_args()
    cfg = load("fig4.json", args.out, sizes=args.sizes, instances=args.instances, shots=args.shots)
    cmp = run_delta_c_comparison(cfg)
    emit_outputs(cmp.low)
    emit_outputs(cmp.high)
    rows = cmp.rows()
    for r in rows:
        print(f"n={r['n']:<3d} SP(0.1)={r['sp_low']:.3f} SP(c_opt={r['delta_c_high']:g})={r['sp_high']:.3f}")
    write_rows(Path(cfg.output_dir) / "delta_c_comparison.csv", rows)


if __name__ == "__main__":
    main()
