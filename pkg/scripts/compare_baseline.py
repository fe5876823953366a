"""Greedy selection vs random pixels at equal volume on seeded synthetic pairs."""

import argparse
import csv
import math
from pathlib import Path

import numpy as np

from eo_downlink import pipeline
from eo_downlink.cli import COMPARE_COLUMNS, COMPARE_BUDGETS
from eo_downlink.config import ScenarioConfig, load_config
from eo_downlink.imaging import synth_pair
from eo_downlink.scoring import ChangeMap


def as_db(v):
    return math.inf if v == "inf" else v


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", type=Path, default=None)
    ap.add_argument("--pairs", type=int, default=20)
    ap.add_argument("--size", type=int, default=64)
    ap.add_argument("--bands", type=int, default=4)
    ap.add_argument("--change-fraction", type=float, default=0.1)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()

    cfg = load_config(args.config) if args.config else ScenarioConfig()
    rows = []
    for seed in range(args.pairs):
        pair, mask = synth_pair(seed, args.size, args.size, args.bands, args.change_fraction)
        for row in pipeline.compare(cfg, pair, ChangeMap(mask), COMPARE_BUDGETS, (seed,)):
            rows.append({"pair": seed, **row})

    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "compare_baseline.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["pair"] + COMPARE_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)

    print(f"{'budget':>7} {'greedy dB':>10} {'random dB':>10} {'enc rate':>9}")
    for b in COMPARE_BUDGETS:
        sub = [r for r in rows if r["budget_fraction"] == b]
        g = [as_db(r["greedy_psnr_db"]) for r in sub]
        base = [as_db(r["baseline_psnr_db"]) for r in sub]
        rate = np.mean([r["greedy_encoding_rate"] for r in sub])
        print(f"{b:>7.2f} {np.median(g):>10.2f} {np.median(base):>10.2f} {rate:>9.3f}")


if __name__ == "__main__":
    main()
