"""Command line entry point: ``eo-downlink <verb> --config PATH [options]``.

Exit codes: 0 success, 1 configuration error, 2 runtime or stage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import pipeline
from .config import ConfigError, ScenarioConfig, from_dict, load_config
from .imaging import (ImagePair, RasterFormatError, load_raster, read_pgm, save_raster, stack_bands,
                      synth_pair, write_pgm, write_ppm)
from .link import write_rate_profile_csv
from .scoring import ChangeMap

log = logging.getLogger("eo_downlink")

SWEEP_ELEVATIONS = (5, 10, 15, 20, 25, 30)
SWEEP_NOISE_FIGURES = (0, 1, 1.5, 2, 2.5)
COMPARE_BUDGETS = (0.6, 0.7, 0.8, 0.9, 0.95, 0.99)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def write_json(doc, path: Path) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n")


def write_rows(rows: list[dict], columns: list[str], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in (row[c] for c in columns)])


def _load_pair(args) -> ImagePair:
    return ImagePair(load_raster(args.reference), load_raster(args.acquired))


# --- verbs -------------------------------------------------------------------------


def cmd_pass(cfg: ScenarioConfig, args) -> None:
    result = pipeline.run_pass(cfg)
    write_rate_profile_csv(result.rates, args.out / "rate_profile.csv")
    write_json(result.summary(), args.out / "pass_summary.json")
    log.info("T_pass %.1f s, C_orbit %.4f Tb", result.visibility_duration_s, result.capacity_bits / 1e12)


def cmd_capacity_sweep(cfg: ScenarioConfig, args) -> None:
    rows = pipeline.capacity_sweep(cfg, args.epsilons, args.noise_figures)
    write_rows(rows, ["min_elevation_deg", "noise_figure_db", "c_orbit_bits", "c_orbit_tb"],
               args.out / "capacity_sweep.csv")


def cmd_simulate(cfg: ScenarioConfig, args) -> None:
    with pipeline.stage("load"):
        pair = _load_pair(args)
        truth = ChangeMap.from_raster(load_raster(args.truth)) if args.truth else None
    sim = pipeline.simulate(cfg, pair, truth, args.capacity_bits)
    (args.out / "payload.msp").write_bytes(sim.payload)
    save_raster(sim.reconstructed, args.out / "reconstructed.msr")
    (args.out / "selection.json").write_text(sim.selection.to_json() + "\n")
    if sim.confusion is not None:
        sim.confusion.write_ppm(args.out / "confusion.ppm")
    write_json(sim.metrics(), args.out / "metrics.json")


COMPARE_COLUMNS = ["budget_fraction", "seed", "capacity_bits", "tau", "greedy_bits", "greedy_psnr_db",
                   "greedy_encoding_rate", "baseline_bits", "baseline_psnr_db", "baseline_encoding_rate"]


def cmd_compare(cfg: ScenarioConfig, args) -> None:
    with pipeline.stage("load"):
        pair = _load_pair(args)
        truth = ChangeMap.from_raster(load_raster(args.truth))
    rows = pipeline.compare(cfg, pair, truth, args.budgets, args.seeds or cfg.seeds)
    write_rows(rows, COMPARE_COLUMNS, args.out / "compare.csv")


def cmd_synth(cfg: ScenarioConfig, args) -> None:
    seed = cfg.seeds[0] if args.seed is None else args.seed
    pair, mask = synth_pair(seed, args.height, args.width, args.bands, args.change_fraction, args.bit_depth)
    save_raster(pair.reference, args.out / "reference.msr")
    save_raster(pair.acquired, args.out / "acquired.msr")
    save_raster(ChangeMap(mask).to_raster(), args.out / "truth.msr")


def cmd_convert(cfg: ScenarioConfig, args) -> None:
    """PGM bands -> one MSR, or MSR -> one PGM per band (plus optional PPM preview)."""
    inputs = [Path(p) for p in args.input]
    if all(p.suffix.lower() == ".pgm" for p in inputs):
        save_raster(stack_bands([read_pgm(p) for p in inputs]), args.out / args.output)
        return
    if len(inputs) != 1:
        raise ValueError("convert takes several .pgm inputs or exactly one .msr input")
    image = load_raster(inputs[0])
    stem = args.output or inputs[0].stem
    for k in range(image.bands):
        write_pgm(image, args.out / f"{stem}_band{k}.pgm", band=k)
    if args.ppm_bands:
        write_ppm(image, args.out / f"{stem}.ppm", tuple(args.ppm_bands))


VERBS = {
    "pass": cmd_pass,
    "capacity-sweep": cmd_capacity_sweep,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "synth": cmd_synth,
    "convert": cmd_convert,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path, help="scenario JSON")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--seed", type=int, default=None, help="override the config seeds")
    common.add_argument("--intervals", type=int, default=None, help="override pass discretization")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="eo-downlink", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    sub.add_parser("pass", parents=[common], help="rate profile and capacity of one pass")

    p = sub.add_parser("capacity-sweep", parents=[common], help="capacity over elevation x noise figure")
    p.add_argument("--epsilons", type=_floats, default=list(SWEEP_ELEVATIONS), help="degrees, comma-separated")
    p.add_argument("--noise-figures", type=_floats, default=list(SWEEP_NOISE_FIGURES), help="dB, comma-separated")

    for name in ("simulate", "compare"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--reference", required=True, type=Path)
        p.add_argument("--acquired", required=True, type=Path)
        p.add_argument("--truth", required=(name == "compare"), type=Path, default=None)
        if name == "simulate":
            p.add_argument("--capacity-bits", type=float, default=None, help="override the pass capacity")
        else:
            p.add_argument("--budgets", type=_floats, default=list(COMPARE_BUDGETS))
            p.add_argument("--seeds", type=_ints, default=None)

    p = sub.add_parser("synth", parents=[common], help="write a synthetic reference/acquired/truth triple")
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--bands", type=int, default=4)
    p.add_argument("--bit-depth", type=int, choices=(8, 16), default=16)
    p.add_argument("--change-fraction", type=float, default=0.1)

    p = sub.add_parser("convert", parents=[common], help="PGM <-> MSR conversion")
    p.add_argument("--input", nargs="+", required=True)
    p.add_argument("--output", default=None, help="output file name (PGM->MSR) or stem (MSR->PGM)")
    p.add_argument("--ppm-bands", type=_ints, default=None, help="three band indices for a PPM preview")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["seeds"] = [args.seed]
        if args.intervals is not None:
            overrides["intervals"] = args.intervals
        if overrides:
            cfg = from_dict({**cfg.to_dict(), **overrides}, cfg.base_dir)
        if args.verb == "convert" and args.output is None and all(p.endswith(".pgm") for p in args.input):
            raise ConfigError("convert: --output is required when stacking PGM files")
        pipeline.worker_count()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        VERBS[args.verb](cfg, args)
    except (pipeline.StageError, RasterFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
