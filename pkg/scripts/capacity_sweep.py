"""Orbit capacity over minimum elevation x receiver noise figure, printed as a grid."""

import argparse
import csv
from pathlib import Path

from eo_downlink import pipeline
from eo_downlink.cli import SWEEP_ELEVATIONS, SWEEP_NOISE_FIGURES
from eo_downlink.config import ScenarioConfig, load_config


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", type=Path, default=None)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()

    cfg = load_config(args.config) if args.config else ScenarioConfig()
    rows = pipeline.capacity_sweep(cfg, SWEEP_ELEVATIONS, SWEEP_NOISE_FIGURES)
    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "capacity_sweep.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)

    print("eps\\Nf " + "".join(f"{nf:>8g}" for nf in SWEEP_NOISE_FIGURES) + "   (Tb)")
    for k, eps in enumerate(SWEEP_ELEVATIONS):
        cells = rows[k * len(SWEEP_NOISE_FIGURES):(k + 1) * len(SWEEP_NOISE_FIGURES)]
        print(f"{eps:>6g} " + "".join(f"{r['c_orbit_tb']:>8.3f}" for r in cells))


if __name__ == "__main__":
    main()
