import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_image
from eo_downlink.codec import (
    HEADER_SIZE, PayloadError, bits_per_pixel, decode, encode, payload_size, reconstruct,
)
from eo_downlink.imaging import MultiSpectralImage
from eo_downlink.selection import SelectionResult


def selection_of(coords):
    return SelectionResult(tuple(coords), 0, 0.0)


def test_bits_per_pixel():
    assert bits_per_pixel(4, 16) == 96
    assert bits_per_pixel(1, 8) == 40
    with pytest.raises(ValueError):
        bits_per_pixel(0, 16)


def test_golden_bytes():
    samples = np.arange(2 * 2 * 3, dtype=np.uint16).reshape(2, 2, 3) * 1000
    img = MultiSpectralImage(samples, 16)
    data = encode(img, selection_of([(1, 2), (0, 1)]))
    expected = b"MSP1" + struct.pack("<IIIB3xI", 2, 3, 2, 16, 2)
    expected += struct.pack("<HHHH", 0, 1, 1000, 7000)  # row-major order, not pick order
    expected += struct.pack("<HHHH", 1, 2, 5000, 11000)
    assert data == expected
    assert HEADER_SIZE == 24


def test_golden_bytes_8bit():
    img = MultiSpectralImage(np.array([[[7, 9]]], dtype=np.uint8), 8)
    assert encode(img, selection_of([(0, 1)])) == b"MSP1" + struct.pack("<IIIB3xI", 1, 2, 1, 8, 1) \
        + struct.pack("<HHB", 0, 1, 9)


def test_empty_selection_roundtrip(rng):
    ref = random_image(rng)
    data = encode(random_image(rng), SelectionResult())
    assert len(data) == HEADER_SIZE
    assert reconstruct(ref, decode(data)) == ref


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([8, 16]), st.integers(1, 5))
def test_roundtrip_property(seed, depth, bands):
    rng = np.random.default_rng(seed)
    h, w = (int(x) for x in rng.integers(1, 9, size=2))
    ref, acq = (random_image(rng, bands, h, w, depth) for _ in range(2))
    m = rng.random((h, w)) < rng.random()
    coords = list(zip(*np.nonzero(m)))
    data = encode(acq, selection_of([(int(i), int(j)) for i, j in coords]))
    assert len(data) == payload_size(len(coords), bands, depth)
    out = reconstruct(ref, decode(data))
    assert np.array_equal(out.samples[:, m], acq.samples[:, m])
    assert np.array_equal(out.samples[:, ~m], ref.samples[:, ~m])


def test_full_selection_reconstructs_exactly(rng):
    ref, acq = random_image(rng), random_image(rng)
    every = [(i, j) for i in range(acq.height) for j in range(acq.width)]
    assert reconstruct(ref, decode(encode(acq, selection_of(every)))) == acq


def test_truncated_and_bad_magic(rng):
    img = random_image(rng)
    data = encode(img, selection_of([(0, 0), (1, 1)]))
    with pytest.raises(PayloadError, match="truncated"):
        decode(data[:-1])
    with pytest.raises(PayloadError, match="truncated"):
        decode(data[:10])
    with pytest.raises(PayloadError, match="magic"):
        decode(b"XXXX" + data[4:])
    with pytest.raises(PayloadError, match="trailing"):
        decode(data + b"\0")


def test_decode_rejects_duplicates_and_out_of_range():
    head = b"MSP1" + struct.pack("<IIIB3xI", 2, 2, 1, 16, 2)
    with pytest.raises(PayloadError, match="duplicate"):
        decode(head + struct.pack("<HHH", 1, 1, 5) * 2)
    with pytest.raises(PayloadError, match="out-of-range"):
        decode(head + struct.pack("<HHH", 0, 0, 5) + struct.pack("<HHH", 2, 0, 5))


def test_decode_rejects_zero_bands():
    with pytest.raises(PayloadError):
        decode(b"MSP1" + struct.pack("<IIIB3xI", 2, 2, 0, 16, 0))


def test_reconstruct_dimension_mismatch(rng):
    small = random_image(rng, height=4)
    with pytest.raises(PayloadError, match="dimension mismatch"):
        reconstruct(small, decode(encode(random_image(rng), SelectionResult())))


def test_encode_rejects_out_of_range_selection(rng):
    with pytest.raises(PayloadError):
        encode(random_image(rng), selection_of([(5, 0)]))
