"""Downlink payload: selected pixels with explicit coordinates, and ground reconstruction.

Wire format (little-endian)::

    "MSP1" | u32 height | u32 width | u32 bands | u8 bit_depth | 3 x 0 | u32 pixel_count
    pixel_count x (u16 i | u16 j | bands x u8/u16 sample)

Records are written in row-major coordinate order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .imaging import MultiSpectralImage
from .selection import SelectionResult

PAYLOAD_MAGIC = b"MSP1"
_HEADER = struct.Struct("<4sIIIB3xI")
HEADER_SIZE = _HEADER.size
COORD_BITS = 32
MAX_SIDE = 1 << 16


class PayloadError(ValueError):
    pass


def bits_per_pixel(bands: int, bit_depth: int) -> int:
    """Bits one transmitted pixel costs: its samples plus two 16-bit coordinates."""
    if bands < 1 or bit_depth < 1:
        raise ValueError("bands and bit_depth must be positive")
    return bands * bit_depth + COORD_BITS


def payload_size(pixel_count: int, bands: int, bit_depth: int) -> int:
    return HEADER_SIZE + -(-pixel_count * bits_per_pixel(bands, bit_depth) // 8)


@dataclass(frozen=True, eq=False)
class Payload:
    height: int
    width: int
    bands: int
    bit_depth: int
    rows: np.ndarray  # (n,) int
    cols: np.ndarray  # (n,) int
    values: np.ndarray  # (n, bands)

    def __post_init__(self):
        n = len(self.rows)
        if len(self.cols) != n or self.values.shape != (n, self.bands):
            raise PayloadError("payload entry arrays disagree in length")
        if n:
            if self.rows.min() < 0 or self.rows.max() >= self.height \
                    or self.cols.min() < 0 or self.cols.max() >= self.width:
                raise PayloadError("out-of-range coordinate in payload")
            flat = self.rows.astype(np.int64) * self.width + self.cols
            if np.unique(flat).size != n:
                raise PayloadError("duplicate coordinate in payload")
            if self.values.max() >= 2**self.bit_depth:
                raise PayloadError("sample exceeds payload bit depth")

    @property
    def pixel_count(self) -> int:
        return len(self.rows)

    def coords(self) -> list[tuple[int, int]]:
        return list(zip(self.rows.tolist(), self.cols.tolist()))


def _sample_dtype(bit_depth: int) -> np.dtype:
    return np.dtype("<u1") if bit_depth == 8 else np.dtype("<u2")


def _record_dtype(bands: int, bit_depth: int) -> np.dtype:
    return np.dtype([("i", "<u2"), ("j", "<u2"), ("v", _sample_dtype(bit_depth), (bands,))])


def encode(acquired: MultiSpectralImage, selection: SelectionResult) -> bytes:
    if acquired.height > MAX_SIDE or acquired.width > MAX_SIDE:
        raise PayloadError(f"image side exceeds {MAX_SIDE}; coordinates are 16-bit")
    coords = sorted(selection.selected)
    for i, j in coords:
        if not (0 <= i < acquired.height and 0 <= j < acquired.width):
            raise PayloadError(f"coordinate ({i},{j}) out of range for {acquired.height}x{acquired.width}")
    header = _HEADER.pack(PAYLOAD_MAGIC, acquired.height, acquired.width, acquired.bands,
                          acquired.bit_depth, len(coords))
    records = np.zeros(len(coords), dtype=_record_dtype(acquired.bands, acquired.bit_depth))
    if coords:
        rows, cols = (np.array(a) for a in zip(*coords))
        records["i"], records["j"] = rows, cols
        records["v"] = acquired.samples[:, rows, cols].T
    return header + records.tobytes()


def decode(data: bytes) -> Payload:
    if len(data) < HEADER_SIZE:
        raise PayloadError("truncated stream: shorter than payload header")
    magic, height, width, bands, bit_depth, count = _HEADER.unpack_from(data)
    if magic != PAYLOAD_MAGIC:
        raise PayloadError(f"magic mismatch: {magic!r}")
    if data[17:20] != b"\x00\x00\x00":
        raise PayloadError("reserved header bytes must be zero")
    if bit_depth not in (8, 16) or bands < 1:
        raise PayloadError(f"unsupported payload layout: {bands} bands, {bit_depth}-bit")
    rec = _record_dtype(bands, bit_depth)
    body = data[HEADER_SIZE:]
    if len(body) < count * rec.itemsize:
        raise PayloadError(f"truncated stream: {count} records need {count * rec.itemsize} bytes, "
                           f"got {len(body)}")
    if len(body) > count * rec.itemsize:
        raise PayloadError("trailing bytes after last payload record")
    records = np.frombuffer(body, dtype=rec, count=count)
    return Payload(height, width, bands, bit_depth,
                   records["i"].astype(np.int64), records["j"].astype(np.int64),
                   np.array(records["v"]).reshape(count, bands))


def reconstruct(reference: MultiSpectralImage, payload: Payload) -> MultiSpectralImage:
    """Reference image with the transmitted pixels written over it."""
    if (payload.bands, payload.height, payload.width) != reference.shape \
            or payload.bit_depth != reference.bit_depth:
        raise PayloadError(
            f"dimension mismatch: payload {payload.bands}x{payload.height}x{payload.width}/"
            f"{payload.bit_depth}-bit vs reference {reference.shape}/{reference.bit_depth}-bit"
        )
    out = reference.samples.copy()
    out[:, payload.rows, payload.cols] = payload.values.T
    return MultiSpectralImage(out, reference.bit_depth)
