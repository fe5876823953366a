"""Per-pixel change scores, thresholding, and capacity-driven threshold calibration."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .imaging import MultiSpectralImage, NormalizedImage, load_raster, save_raster

EXTERNAL_SCALE = 65535.0
TAU_ABOVE_ONE = float(np.nextafter(1.0, 2.0))


@dataclass(frozen=True, eq=False)
class ChangeScoreMap:
    scores: np.ndarray  # float64, (height, width), values in [0, 1]

    def __post_init__(self):
        arr = np.array(self.scores, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"score map must be 2-D, got shape {arr.shape}")
        if arr.size and (np.isnan(arr).any() or arr.min() < 0.0 or arr.max() > 1.0):
            raise ValueError("change scores must lie in [0, 1]")
        arr.setflags(write=False)
        object.__setattr__(self, "scores", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.scores.shape


@dataclass(frozen=True, eq=False)
class ChangeMap:
    flags: np.ndarray  # bool, (height, width)

    def __post_init__(self):
        arr = np.asarray(self.flags)
        if arr.ndim != 2:
            raise ValueError(f"change map must be 2-D, got shape {arr.shape}")
        if arr.dtype != bool:
            if not np.isin(arr, (0, 1)).all():
                raise ValueError("change map flags must be 0 or 1")
            arr = arr.astype(bool)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "flags", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.flags.shape

    @property
    def count(self) -> int:
        return int(self.flags.sum())

    @classmethod
    def from_raster(cls, image: MultiSpectralImage) -> "ChangeMap":
        """Single-band mask file: any nonzero sample marks a change."""
        if image.bands != 1:
            raise ValueError(f"change mask raster must have 1 band, got {image.bands}")
        return cls(image.samples[0] != 0)

    def to_raster(self) -> MultiSpectralImage:
        return MultiSpectralImage(self.flags[None].astype(np.uint8), 8)


@dataclass(frozen=True)
class SpectralMagnitude:
    """Euclidean norm of the per-band difference, scaled so the largest change is 1."""


@dataclass(frozen=True)
class ExternalMap:
    """Score map produced elsewhere, stored as a 1-band 16-bit MSR file (v / 65535)."""

    path: Path


ScorerSpec = SpectralMagnitude | ExternalMap


def spectral_magnitude(reference: NormalizedImage, acquired: NormalizedImage) -> np.ndarray:
    if reference.samples.shape != acquired.samples.shape:
        raise ValueError(f"dimension mismatch: {reference.samples.shape} vs {acquired.samples.shape}")
    diff = acquired.samples - reference.samples
    return np.sqrt(np.einsum("kij,kij->ij", diff, diff))


def load_external_scores(path) -> ChangeScoreMap:
    image = load_raster(path)
    if image.bands != 1 or image.bit_depth != 16:
        raise ValueError(f"{path}: external score map must be 1-band 16-bit, "
                         f"got {image.bands}-band {image.bit_depth}-bit")
    return ChangeScoreMap(image.samples[0] / EXTERNAL_SCALE)


def save_external_scores(scores: ChangeScoreMap, path) -> None:
    quantized = np.rint(scores.scores * EXTERNAL_SCALE).astype(np.uint16)
    save_raster(MultiSpectralImage(quantized[None], 16), path)


def score_changes(reference: NormalizedImage, acquired: NormalizedImage,
                  spec: ScorerSpec = SpectralMagnitude()) -> ChangeScoreMap:
    """Score every pixel of a normalized pair by how much it changed."""
    if reference.samples.shape != acquired.samples.shape:
        raise ValueError(f"dimension mismatch: {reference.samples.shape} vs {acquired.samples.shape}")
    if isinstance(spec, ExternalMap):
        scores = load_external_scores(spec.path)
        if scores.shape != (reference.height, reference.width):
            raise ValueError(f"dimension mismatch: external map {scores.shape} vs image "
                             f"{(reference.height, reference.width)}")
        return scores
    raw = spectral_magnitude(reference, acquired)
    peak = raw.max()
    if peak == 0:
        return ChangeScoreMap(np.zeros_like(raw))
    # exact 1.0 at the peak, never above it
    return ChangeScoreMap(np.minimum(raw / peak, 1.0))


def threshold_map(scores: ChangeScoreMap, tau: float) -> ChangeMap:
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    return ChangeMap(scores.scores >= tau)


def count_at_or_above(scores: ChangeScoreMap, tau) -> np.ndarray:
    ordered = np.sort(scores.scores, axis=None)
    return ordered.size - np.searchsorted(ordered, tau, side="left")


def calibrate_tau(scores: ChangeScoreMap, bits_per_pixel: int, capacity: float) -> float:
    """Smallest threshold whose flagged pixels fit in ``capacity`` bits.

    Candidates are the distinct score values plus 0 and the float just above
    1; the latter flags nothing and is returned when not even the top pixel fits.
    """
    if bits_per_pixel <= 0:
        raise ValueError("bits_per_pixel must be positive")
    candidates = np.union1d(np.unique(scores.scores), [0.0, TAU_ABOVE_ONE])
    counts = count_at_or_above(scores, candidates)
    # counts fall as tau rises, so the feasible candidates form a suffix
    feasible = counts * bits_per_pixel <= capacity
    return float(candidates[int(np.argmax(feasible))])


def change_map_for_capacity(scores: ChangeScoreMap, bits_per_pixel: int,
                            capacity: float) -> tuple[float, ChangeMap]:
    """Calibrate tau and threshold; the above-one sentinel yields an empty map."""
    tau = calibrate_tau(scores, bits_per_pixel, capacity)
    if tau > 1.0:
        return tau, ChangeMap(np.zeros(scores.shape, dtype=bool))
    return tau, threshold_map(scores, tau)
