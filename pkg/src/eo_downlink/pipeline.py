"""End-to-end runs: pass capacity, capacity sweeps, one-pass simulation, greedy vs random."""

from __future__ import annotations

import contextlib
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import codec, link, orbit
from .config import ConfigError, ScenarioConfig
from .imaging import ImagePair, MultiSpectralImage, normalize_zscore, select_bands
from .metrics import ConfusionMap, PsnrResult, change_encoding_rate, confusion_map, psnr
from .scoring import ChangeMap, ChangeScoreMap, change_map_for_capacity, score_changes
from .selection import SelectionResult, build_candidates, solve_p2_greedy, solve_random_baseline

THREADS_ENV = "EO_DOWNLINK_THREADS"


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage


@contextlib.contextmanager
def stage(name: str):
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV}: expected a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV}: expected a positive integer, got {raw!r}")
    return n


def ordered_map(fn, items):
    """Map over ``items`` with up to ``worker_count()`` threads, keeping input order."""
    items = list(items)
    workers = min(worker_count(), max(1, len(items)))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# --- link side -------------------------------------------------------------------


@dataclass(frozen=True)
class PassResult:
    max_slant_range_m: float
    visibility_duration_s: float
    orbital_velocity_m_s: float
    distances: orbit.PassProfile
    rates: link.RateProfile
    capacity_bits: float

    def summary(self) -> dict:
        return {
            "d_max_m": self.max_slant_range_m,
            "t_pass_s": self.visibility_duration_s,
            "v_orb_m_s": self.orbital_velocity_m_s,
            "intervals": len(self.rates),
            "c_orbit_bits": self.capacity_bits,
            "c_orbit_tb": self.capacity_bits / 1e12,
        }


def run_pass(cfg: ScenarioConfig, min_elevation_deg: float | None = None,
             noise_figure_db: float | None = None, table: link.ModcodTable | None = None) -> PassResult:
    geom = cfg.orbit.geometry(min_elevation_deg)
    max_el = max(math.radians(cfg.orbit.max_elevation_deg), geom.min_elevation)
    distances = orbit.pass_distance_profile(geom, cfg.intervals, max_el)
    rates = link.rate_profile(cfg.link.budget(noise_figure_db), distances, table or cfg.modcod())
    return PassResult(
        orbit.max_slant_range(geom), orbit.visibility_duration(geom), orbit.orbital_velocity(geom),
        distances, rates, link.orbit_capacity(rates),
    )


def capacity_sweep(cfg: ScenarioConfig, epsilons, noise_figures) -> list[dict]:
    """Orbit capacity over an elevation x noise-figure grid, rows in grid order."""
    table = cfg.modcod()
    grid = [(float(e), float(nf)) for e in epsilons for nf in noise_figures]

    def cell(point):
        eps, nf = point
        cap = run_pass(cfg, eps, nf, table).capacity_bits
        return {"min_elevation_deg": eps, "noise_figure_db": nf,
                "c_orbit_bits": cap, "c_orbit_tb": cap / 1e12}

    return ordered_map(cell, grid)


# --- image side ------------------------------------------------------------------


def pair_scores(cfg: ScenarioConfig, pair: ImagePair) -> ChangeScoreMap:
    ref, acq = pair.reference, pair.acquired
    if cfg.bands is not None:
        # band subset drives scoring only; transmitted pixels carry every band
        ref, acq = select_bands(ref, cfg.bands), select_bands(acq, cfg.bands)
    return score_changes(normalize_zscore(ref), normalize_zscore(acq), cfg.scorer_spec())


def pixel_bits(cfg: ScenarioConfig, image: MultiSpectralImage) -> int:
    return cfg.bits_per_pixel or codec.bits_per_pixel(image.bands, image.bit_depth)


@dataclass(frozen=True)
class Simulation:
    capacity_bits: float
    bits_per_pixel: int
    tau: float
    scores: ChangeScoreMap
    change_map: ChangeMap
    selection: SelectionResult
    payload: bytes
    reconstructed: MultiSpectralImage
    psnr: PsnrResult
    encoding_rate: float | None
    confusion: ConfusionMap | None

    def metrics(self) -> dict:
        return {
            "capacity_bits": self.capacity_bits,
            "bits_per_pixel": self.bits_per_pixel,
            "tau": self.tau,
            "flagged_pixels": self.change_map.count,
            "selected_pixels": len(self.selection),
            "bits_used": self.selection.total_bits,
            "total_score": self.selection.total_score,
            "payload_bytes": len(self.payload),
            "mse": self.psnr.mse,
            "psnr_db": self.psnr.to_json_value(),
            "encoding_rate": self.encoding_rate,
            "confusion_counts": None if self.confusion is None else self.confusion.counts(),
        }


def simulate(cfg: ScenarioConfig, pair: ImagePair, truth: ChangeMap | None = None,
             capacity: float | None = None) -> Simulation:
    """One image pair through one pass: score, select under capacity, send, rebuild, measure."""
    if capacity is None:
        capacity = cfg.capacity_bits
    if capacity is None:
        with stage("link"):
            capacity = run_pass(cfg).capacity_bits
    if truth is not None and truth.shape != (pair.acquired.height, pair.acquired.width):
        raise StageError("metrics", ValueError(f"truth mask {truth.shape} does not match image"))
    bits = pixel_bits(cfg, pair.acquired)
    with stage("scoring"):
        scores = pair_scores(cfg, pair)
        tau, flags = change_map_for_capacity(scores, bits, capacity)
    with stage("selection"):
        selection = solve_p2_greedy(build_candidates(scores, flags, bits), capacity)
    with stage("codec"):
        payload = codec.encode(pair.acquired, selection)
        received = codec.reconstruct(pair.reference, codec.decode(payload))
    with stage("metrics"):
        quality = psnr(pair.acquired, received)
        rate = conf = None
        if truth is not None:
            conf = confusion_map(selection, truth)
            rate = change_encoding_rate(selection, truth) if truth.count else None
    return Simulation(capacity, bits, tau, scores, flags, selection, payload, received, quality, rate, conf)


def _reconstruct(pair: ImagePair, selection: SelectionResult) -> MultiSpectralImage:
    return codec.reconstruct(pair.reference, codec.decode(codec.encode(pair.acquired, selection)))


def compare(cfg: ScenarioConfig, pair: ImagePair, truth: ChangeMap, budgets, seeds) -> list[dict]:
    """Greedy selection vs random pixels at equal data volume, one row per (budget, seed).

    Budgets are fractions of the bits needed to send every ground-truth changed
    pixel; the random baseline draws from the whole image.
    """
    if truth.count == 0:
        raise StageError("compare", ValueError("ground truth has no changed pixels"))
    bits = pixel_bits(cfg, pair.acquired)
    with stage("scoring"):
        scores = pair_scores(cfg, pair)
    everything = build_candidates(scores, ChangeMap(np.ones(scores.shape, dtype=bool)), bits)
    full_bits = truth.count * bits

    def greedy_at(budget):
        capacity = budget * full_bits
        tau, flags = change_map_for_capacity(scores, bits, capacity)
        sel = solve_p2_greedy(build_candidates(scores, flags, bits), capacity)
        return capacity, tau, sel, psnr(pair.acquired, _reconstruct(pair, sel))

    with stage("selection"):
        greedy = ordered_map(greedy_at, [float(b) for b in budgets])

    jobs = [(k, int(seed)) for k in range(len(greedy)) for seed in seeds]

    def row(job):
        k, seed = job
        capacity, tau, sel, q = greedy[k]
        base = solve_random_baseline(everything, capacity, seed, volume=sel.total_bits)
        q_base = psnr(pair.acquired, _reconstruct(pair, base))
        return {
            "budget_fraction": float(budgets[k]),
            "seed": seed,
            "capacity_bits": capacity,
            "tau": tau,
            "greedy_bits": sel.total_bits,
            "greedy_psnr_db": q.to_json_value(),
            "greedy_encoding_rate": change_encoding_rate(sel, truth),
            "baseline_bits": base.total_bits,
            "baseline_psnr_db": q_base.to_json_value(),
            "baseline_encoding_rate": change_encoding_rate(base, truth),
        }

    with stage("baseline"):
        return ordered_map(row, jobs)
