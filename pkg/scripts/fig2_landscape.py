"""Energy landscapes along each CD coefficient, before and after the greedy sign fixing."""
import argparse
from pathlib import Path

import numpy as np

from dqgo.calibration import calibrate
from dqgo.ising import sk_instance_from_seed
from dqgo.qgo import QgoConfig, energy_landscape, qgo_run

from _common import write_rows


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=81)
    p.add_argument("--out", default="runs/fig2")
    args = p.parse_args()
    cal = calibrate(args.n)
    cfg = QgoConfig(delta_c=cal.c_opt, c_opt=cal.c_opt, b_opt=cal.b_opt)
    inst = sk_instance_from_seed(args.n, args.seed)
    final = qgo_run(inst, cfg).final_c
    rows = []
    for label, base in (("initial", np.zeros(args.n)), ("final", final)):
        for i in range(args.n):
            c = base.copy()
            c[i] = 0.0
            for value, energy in energy_landscape(inst, c, i, -2.0, 2.0, args.steps, cfg):
                rows.append({"panel": label, "qubit": i, "c_value": value, "energy": energy})
    path = write_rows(Path(args.out) / f"landscape_n{args.n}_seed{args.seed}.csv", rows)
    print(f"final c = {final.tolist()}")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
