"""Capacity-constrained pixel selection.

Maximize the summed importance of transmitted pixels, restricted to pixels
flagged as changed, with the payload bits bounded by the pass capacity. The
greedy solver is the production path; the exhaustive solver exists to check it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .scoring import ChangeMap, ChangeScoreMap

MAX_EXACT_CANDIDATES = 25
_ENUM_BLOCK = 20


@dataclass(frozen=True)
class PixelCandidate:
    i: int
    j: int
    score: float
    bits: int
    changed: bool = True

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError(f"candidate ({self.i},{self.j}) needs at least one bit")
        if not self.score >= 0:
            raise ValueError(f"candidate ({self.i},{self.j}) has negative score")

    @property
    def coord(self) -> tuple[int, int]:
        return (self.i, self.j)


@dataclass(frozen=True)
class SelectionResult:
    selected: tuple[tuple[int, int], ...] = ()
    total_bits: int = 0
    total_score: float = 0.0

    @classmethod
    def of(cls, chosen: list[PixelCandidate]) -> "SelectionResult":
        return cls(
            tuple(c.coord for c in chosen),
            sum(c.bits for c in chosen),
            math.fsum(c.score for c in chosen),
        )

    def __len__(self):
        return len(self.selected)

    def mask(self, shape: tuple[int, int]) -> np.ndarray:
        out = np.zeros(shape, dtype=bool)
        if self.selected:
            rows, cols = zip(*self.selected)
            out[list(rows), list(cols)] = True
        return out

    def prefix(self, n: int, candidates: list[PixelCandidate]) -> "SelectionResult":
        """First ``n`` picks, re-totalled from ``candidates``."""
        lookup = {c.coord: c for c in candidates}
        return SelectionResult.of([lookup[xy] for xy in self.selected[:n]])

    def to_json(self) -> str:
        doc = {
            "selected": [list(xy) for xy in self.selected],
            "total_bits": self.total_bits,
            "total_score": self.total_score,
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SelectionResult":
        doc = json.loads(text)
        return cls(tuple((int(i), int(j)) for i, j in doc["selected"]),
                   int(doc["total_bits"]), float(doc["total_score"]))


def build_candidates(scores: ChangeScoreMap, change_map: ChangeMap, bits_per_pixel: int) -> list[PixelCandidate]:
    """One candidate per flagged pixel, in row-major order."""
    if scores.shape != change_map.shape:
        raise ValueError(f"dimension mismatch: scores {scores.shape} vs change map {change_map.shape}")
    rows, cols = np.nonzero(change_map.flags)
    values = scores.scores[rows, cols]
    return [PixelCandidate(int(i), int(j), float(s), bits_per_pixel)
            for i, j, s in zip(rows.tolist(), cols.tolist(), values.tolist())]


def _check_capacity(capacity: float) -> None:
    if not capacity >= 0:
        raise ValueError(f"capacity must be non-negative, got {capacity}")


def _pack(order, capacity: float) -> list[PixelCandidate]:
    chosen, used = [], 0
    for c in order:
        if c.changed and used + c.bits <= capacity:
            chosen.append(c)
            used += c.bits
    return chosen


def greedy_order(candidates: list[PixelCandidate]) -> list[PixelCandidate]:
    """Score density descending, then score descending, then row-major."""
    return sorted(candidates, key=lambda c: (-c.score / c.bits, -c.score, c.i, c.j))


def solve_p2_greedy(candidates: list[PixelCandidate], capacity: float) -> SelectionResult:
    _check_capacity(capacity)
    return SelectionResult.of(_pack(greedy_order(candidates), capacity))


def _subset_table(items: list[PixelCandidate]) -> tuple[np.ndarray, np.ndarray]:
    """Bits and scores of every subset; bit t of the index selects items[t]."""
    bits = np.zeros(1, dtype=np.int64)
    score = np.zeros(1, dtype=np.float64)
    for c in items:
        bits = np.concatenate([bits, bits + c.bits])
        score = np.concatenate([score, score + c.score])
    return bits, score


def solve_p2_exact(candidates: list[PixelCandidate], capacity: float) -> SelectionResult:
    """Exhaustive optimum; ties go to fewer bits, then the smaller sorted coordinate list."""
    _check_capacity(capacity)
    if len(candidates) > MAX_EXACT_CANDIDATES:
        raise ValueError(f"exact solver handles at most {MAX_EXACT_CANDIDATES} candidates, "
                         f"got {len(candidates)}")
    # zero-score items never win a tie (they only add bits); oversize items never fit
    items = [c for c in candidates if c.changed and c.score > 0 and c.bits <= capacity]
    if not items:
        return SelectionResult()

    low, high = items[:_ENUM_BLOCK], items[_ENUM_BLOCK:]
    low_bits, low_score = _subset_table(low)
    high_bits, high_score = _subset_table(high)

    best = -1.0
    for hb, hs in zip(high_bits.tolist(), high_score.tolist()):
        ok = low_bits + hb <= capacity
        if ok.any():
            best = max(best, float((low_score[ok] + hs).max()))

    # float sums depend on summation order, so gather every near-optimal subset
    # and rank them by the correctly rounded sum
    tol = 1e-9 * max(best, 1.0)
    near: list[list[PixelCandidate]] = []
    for h, (hb, hs) in enumerate(zip(high_bits.tolist(), high_score.tolist())):
        hits = np.nonzero((low_bits + hb <= capacity) & (low_score + hs >= best - tol))[0]
        high_part = [c for t, c in enumerate(high) if h >> t & 1]
        for m in hits.tolist():
            near.append([c for t, c in enumerate(low) if m >> t & 1] + high_part)

    def rank(subset):
        sel = SelectionResult.of(sorted(subset, key=lambda c: (c.i, c.j)))
        return (-sel.total_score, sel.total_bits, sel.selected), sel

    return min((rank(s) for s in near), key=lambda r: r[0])[1]


def solve_random_baseline(candidates: list[PixelCandidate], capacity: float, seed: int,
                          volume: int | None = None) -> SelectionResult:
    """Random pixels packed up to the same data volume the greedy solver would use.

    ``volume`` overrides that target, e.g. when the baseline draws from a wider
    candidate pool than the greedy run it is compared with.
    """
    _check_capacity(capacity)
    if volume is None:
        volume = solve_p2_greedy(candidates, capacity).total_bits
    budget = min(volume, capacity)
    rng = np.random.default_rng(seed)
    order = [candidates[k] for k in rng.permutation(len(candidates)).tolist()]
    return SelectionResult.of(_pack(order, budget))
