"""Reconstruction fidelity and change coverage."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .imaging import MultiSpectralImage, write_rgb_ppm
from .scoring import ChangeMap
from .selection import SelectionResult


@dataclass(frozen=True)
class PsnrResult:
    mse: float
    psnr_db: float | None  # None when the images are identical

    @property
    def infinite(self) -> bool:
        return self.psnr_db is None

    def to_json_value(self):
        return "inf" if self.infinite else self.psnr_db

    def as_float(self) -> float:
        return math.inf if self.infinite else self.psnr_db


def psnr(original: MultiSpectralImage, reconstructed: MultiSpectralImage) -> PsnrResult:
    """PSNR over all pixels and bands jointly, peak taken from the bit depth."""
    if not original.same_geometry(reconstructed):
        raise ValueError(f"dimension mismatch: {original.shape}/{original.bit_depth}-bit vs "
                         f"{reconstructed.shape}/{reconstructed.bit_depth}-bit")
    diff = original.samples.astype(np.int64) - reconstructed.samples.astype(np.int64)
    # squared integer errors sum exactly in int64 for any realistic image size
    sse = int(np.sum(diff * diff, dtype=np.int64))
    if sse == 0:
        return PsnrResult(0.0, None)
    mse = sse / diff.size
    return PsnrResult(mse, 10.0 * math.log10(original.max_value**2 / mse))


def change_encoding_rate(selection: SelectionResult, truth: ChangeMap) -> float:
    """Fraction of ground-truth changed pixels that made it into the selection."""
    total = truth.count
    if total == 0:
        raise ValueError("encoding rate undefined: ground truth has no changed pixels")
    hit = sum(1 for i, j in selection.selected if truth.flags[i, j])
    return hit / total


class Category(IntEnum):
    BACKGROUND = 0
    ENCODED_ONLY = 1
    TRUE_POSITIVE = 2
    MISSED_CHANGE = 3


PALETTE = np.array([
    (0, 0, 0),  # background
    (255, 0, 0),  # encoded only
    (0, 255, 0),  # true positive
    (255, 255, 255),  # missed change
], dtype=np.uint8)


@dataclass(frozen=True, eq=False)
class ConfusionMap:
    categories: np.ndarray  # uint8 Category codes, (height, width)

    def count(self, category: Category) -> int:
        return int(np.count_nonzero(self.categories == category))

    def counts(self) -> dict[str, int]:
        return {c.name.lower(): self.count(c) for c in Category}

    def to_rgb(self) -> np.ndarray:
        return PALETTE[self.categories]

    def write_ppm(self, path) -> None:
        write_rgb_ppm(self.to_rgb(), path, 255)


def confusion_map(selection: SelectionResult, truth: ChangeMap) -> ConfusionMap:
    sel = selection.mask(truth.shape)
    cat = np.full(truth.shape, Category.BACKGROUND, dtype=np.uint8)
    cat[sel & ~truth.flags] = Category.ENCODED_ONLY
    cat[sel & truth.flags] = Category.TRUE_POSITIVE
    cat[~sel & truth.flags] = Category.MISSED_CHANGE
    return ConfusionMap(cat)
