"""Multi-spectral rasters: container I/O, band selection, z-score normalization.

Samples are stored band-sequential as a ``(bands, height, width)`` array.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MSR_MAGIC = b"MSR1"
# magic, height, width, bands, bit_depth, 3 reserved bytes
_MSR_HEADER = struct.Struct("<4sIIIB3x")
MSR_HEADER_SIZE = _MSR_HEADER.size

_DTYPES = {8: np.dtype("<u1"), 16: np.dtype("<u2")}


class RasterFormatError(ValueError):
    """Raised for malformed or inconsistent raster files."""


@dataclass(frozen=True, eq=False)
class MultiSpectralImage:
    samples: np.ndarray
    bit_depth: int = 16

    def __post_init__(self):
        if self.bit_depth not in _DTYPES:
            raise ValueError(f"bit_depth must be 8 or 16, got {self.bit_depth}")
        arr = np.asarray(self.samples)
        if arr.ndim != 3 or min(arr.shape) < 1:
            raise ValueError(f"samples must be a non-empty (bands, height, width) array, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= 2**self.bit_depth):
            raise ValueError(f"sample exceeds bit depth {self.bit_depth}")
        arr = np.ascontiguousarray(arr, dtype=_DTYPES[self.bit_depth])
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def bands(self) -> int:
        return self.samples.shape[0]

    @property
    def height(self) -> int:
        return self.samples.shape[1]

    @property
    def width(self) -> int:
        return self.samples.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.samples.shape

    @property
    def max_value(self) -> int:
        return 2**self.bit_depth - 1

    def same_geometry(self, other: "MultiSpectralImage") -> bool:
        return self.shape == other.shape and self.bit_depth == other.bit_depth

    def __eq__(self, other):
        if not isinstance(other, MultiSpectralImage):
            return NotImplemented
        return self.same_geometry(other) and np.array_equal(self.samples, other.samples)

    def pixel(self, i: int, j: int) -> np.ndarray:
        return self.samples[:, i, j]


@dataclass(frozen=True)
class BandStats:
    mean: float
    std: float


@dataclass(frozen=True, eq=False)
class NormalizedImage:
    samples: np.ndarray  # float64, (bands, height, width)
    band_stats: tuple[BandStats, ...]

    @property
    def bands(self) -> int:
        return self.samples.shape[0]

    @property
    def height(self) -> int:
        return self.samples.shape[1]

    @property
    def width(self) -> int:
        return self.samples.shape[2]


@dataclass(frozen=True)
class ImagePair:
    """Coregistered reference (earlier) and acquired (later) images."""

    reference: MultiSpectralImage
    acquired: MultiSpectralImage

    def __post_init__(self):
        if not self.reference.same_geometry(self.acquired):
            raise ValueError(
                f"pair is not coregistered: {self.reference.shape}/{self.reference.bit_depth}-bit "
                f"vs {self.acquired.shape}/{self.acquired.bit_depth}-bit"
            )


# --- MSR container -----------------------------------------------------------


def encode_raster(image: MultiSpectralImage) -> bytes:
    header = _MSR_HEADER.pack(MSR_MAGIC, image.height, image.width, image.bands, image.bit_depth)
    return header + image.samples.tobytes(order="C")


def decode_raster(data: bytes) -> MultiSpectralImage:
    if len(data) < MSR_HEADER_SIZE:
        raise RasterFormatError("malformed header: file shorter than MSR header")
    magic, height, width, bands, bit_depth = _MSR_HEADER.unpack_from(data)
    if magic != MSR_MAGIC:
        raise RasterFormatError(f"malformed header: bad magic {magic!r}")
    if data[17:20] != b"\x00\x00\x00":
        raise RasterFormatError("malformed header: reserved bytes must be zero")
    if bit_depth not in _DTYPES:
        raise RasterFormatError(f"malformed header: unsupported bit depth {bit_depth}")
    if min(height, width, bands) < 1:
        raise RasterFormatError("malformed header: zero dimension")
    dtype = _DTYPES[bit_depth]
    payload = data[MSR_HEADER_SIZE:]
    expected = height * width * bands
    if len(payload) != expected * dtype.itemsize:
        raise RasterFormatError(
            f"sample count mismatch: header declares {expected} samples, "
            f"payload holds {len(payload) / dtype.itemsize:g}"
        )
    samples = np.frombuffer(payload, dtype=dtype).reshape(bands, height, width)
    return MultiSpectralImage(samples, bit_depth)


def save_raster(image: MultiSpectralImage, path) -> None:
    Path(path).write_bytes(encode_raster(image))


def load_raster(path) -> MultiSpectralImage:
    return decode_raster(Path(path).read_bytes())


# --- Netpbm interop -----------------------------------------------------------


def _netpbm_header(data: bytes) -> tuple[bytes, list[int], int]:
    """Parse a P5/P6 header, return (magic, [width, height, maxval], offset)."""
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise RasterFormatError("malformed header: truncated netpbm header")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates maxval from the raster
    pos += 1
    try:
        values = [int(t) for t in tokens[1:]]
    except ValueError as exc:
        raise RasterFormatError(f"malformed header: {exc}") from None
    return tokens[0], values, pos


def read_pgm(path) -> MultiSpectralImage:
    """Read a binary PGM (P5) as a single-band image."""
    data = Path(path).read_bytes()
    magic, (width, height, maxval), offset = _netpbm_header(data)
    if magic != b"P5":
        raise RasterFormatError(f"malformed header: expected P5, got {magic!r}")
    if not 0 < maxval < 65536:
        raise RasterFormatError(f"malformed header: maxval {maxval}")
    bit_depth = 8 if maxval < 256 else 16
    dtype = np.dtype("u1") if bit_depth == 8 else np.dtype(">u2")
    raster = data[offset:]
    if len(raster) != width * height * dtype.itemsize:
        raise RasterFormatError("sample count mismatch: PGM raster length disagrees with header")
    samples = np.frombuffer(raster, dtype=dtype).reshape(1, height, width)
    if samples.max(initial=0) > maxval:
        raise RasterFormatError("sample exceeding maxval")
    return MultiSpectralImage(samples.astype(_DTYPES[bit_depth]), bit_depth)


def write_pgm(image: MultiSpectralImage, path, band: int = 0) -> None:
    """Write one band as a binary PGM (16-bit samples big-endian, per netpbm)."""
    plane = image.samples[band]
    dtype = "u1" if image.bit_depth == 8 else ">u2"
    header = f"P5\n{image.width} {image.height}\n{image.max_value}\n".encode("ascii")
    Path(path).write_bytes(header + plane.astype(dtype).tobytes())


def write_ppm(image: MultiSpectralImage, path, bands: tuple[int, int, int] = (0, 1, 2)) -> None:
    """Write three bands (in R, G, B order) as a binary PPM."""
    rgb = select_bands(image, list(bands))
    write_rgb_ppm(np.moveaxis(rgb.samples, 0, -1), path, rgb.max_value)


def write_rgb_ppm(rgb: np.ndarray, path, maxval: int = 255) -> None:
    """Write an ``(height, width, 3)`` array as P6."""
    height, width, _ = rgb.shape
    dtype = "u1" if maxval < 256 else ">u2"
    header = f"P6\n{width} {height}\n{maxval}\n".encode("ascii")
    Path(path).write_bytes(header + np.ascontiguousarray(rgb).astype(dtype).tobytes())


def stack_bands(images: list[MultiSpectralImage]) -> MultiSpectralImage:
    if not images:
        raise ValueError("need at least one image to stack")
    depth = {im.bit_depth for im in images}
    sizes = {(im.height, im.width) for im in images}
    if len(depth) != 1 or len(sizes) != 1:
        raise ValueError("stacked bands must share size and bit depth")
    return MultiSpectralImage(np.concatenate([im.samples for im in images]), depth.pop())


# --- preprocessing ------------------------------------------------------------


def select_bands(image: MultiSpectralImage, indices) -> MultiSpectralImage:
    indices = [int(k) for k in indices]
    if not indices:
        raise ValueError("band index list is empty")
    if len(set(indices)) != len(indices):
        raise ValueError(f"duplicate band index in {indices}")
    bad = [k for k in indices if not 0 <= k < image.bands]
    if bad:
        raise IndexError(f"band index {bad[0]} out of range for {image.bands}-band image")
    return MultiSpectralImage(image.samples[indices], image.bit_depth)


def _band_stats(plane: np.ndarray) -> BandStats:
    n = plane.size
    # integer sum is exact; squared deviations use fsum so the result is order independent
    mean = int(plane.sum(dtype=np.int64)) / n
    dev = plane.astype(np.float64).ravel() - mean
    var = math.fsum((dev * dev).tolist()) / n
    return BandStats(mean, math.sqrt(var))


def normalize_zscore(image: MultiSpectralImage) -> NormalizedImage:
    """Standardize each band to zero mean and unit (population) standard deviation.

    Constant bands map to all zeros and record ``std = 0``.
    """
    out = np.zeros(image.shape, dtype=np.float64)
    stats = []
    for k in range(image.bands):
        st = _band_stats(image.samples[k])
        if st.std > 0:
            out[k] = (image.samples[k] - st.mean) / st.std
        stats.append(st)
    out.setflags(write=False)
    return NormalizedImage(out, tuple(stats))


# --- synthetic fixtures -------------------------------------------------------


def synth_pair(
    seed: int,
    height: int,
    width: int,
    bands: int,
    change_fraction: float,
    bit_depth: int = 16,
) -> tuple[ImagePair, np.ndarray]:
    """Random coregistered pair plus its ``(height, width)`` boolean change mask.

    Changed pixels get fresh samples, redrawn until at least one band differs.
    """
    if min(height, width, bands) < 1:
        raise ValueError("dimensions must be positive")
    if not 0.0 <= change_fraction <= 1.0:
        raise ValueError(f"change_fraction must lie in [0, 1], got {change_fraction}")
    rng = np.random.default_rng(seed)
    hi = 2**bit_depth
    reference = rng.integers(0, hi, size=(bands, height, width), dtype=np.int64)

    n_pix = height * width
    n_changed = int(round(change_fraction * n_pix))
    flat = np.sort(rng.choice(n_pix, size=n_changed, replace=False))
    mask = np.zeros(n_pix, dtype=bool)
    mask[flat] = True
    mask = mask.reshape(height, width)

    acquired = reference.copy()
    rows, cols = np.nonzero(mask)
    pending = np.arange(rows.size)
    while pending.size:
        fresh = rng.integers(0, hi, size=(bands, pending.size), dtype=np.int64)
        acquired[:, rows[pending], cols[pending]] = fresh
        same = np.all(fresh == reference[:, rows[pending], cols[pending]], axis=0)
        pending = pending[same]

    pair = ImagePair(MultiSpectralImage(reference, bit_depth), MultiSpectralImage(acquired, bit_depth))
    return pair, mask
