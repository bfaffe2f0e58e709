"""Shared bits for the experiment scripts."""
import csv
from pathlib import Path

from dqgo.experiments import ExperimentConfig

CONFIGS = Path(__file__).parent / "configs"


def load(name, out_root=None, **overrides):
    cfg = ExperimentConfig.load(CONFIGS / name)
    data = cfg.to_dict()
    if out_root is not None:
        data["output_dir"] = str(Path(out_root) / Path(cfg.output_dir).relative_to("runs"))
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(data)


def write_rows(path, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return path
