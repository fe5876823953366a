import math

import numpy as np
import pytest

from conftest import random_image
from eo_downlink.imaging import MultiSpectralImage
from eo_downlink.metrics import Category, PALETTE, change_encoding_rate, confusion_map, psnr
from eo_downlink.scoring import ChangeMap
from eo_downlink.selection import SelectionResult


def test_identical_is_infinite(rng):
    img = random_image(rng)
    r = psnr(img, img)
    assert r.infinite and r.mse == 0.0 and r.to_json_value() == "inf" and r.as_float() == math.inf


def test_known_values():
    a = MultiSpectralImage(np.zeros((1, 1, 2), dtype=np.uint8), 8)
    b = MultiSpectralImage(np.array([[[255, 0]]], dtype=np.uint8), 8)
    # mse = 255^2 / 2 -> 10 log10(2)
    assert psnr(a, b).psnr_db == pytest.approx(10 * math.log10(2), abs=1e-12)
    c = MultiSpectralImage(np.ones((1, 1, 2), dtype=np.uint8), 8)
    assert psnr(a, c).psnr_db == pytest.approx(48.1308036086791, abs=1e-12)
    d = MultiSpectralImage(np.full((2, 3, 3), 25500, dtype=np.uint16), 16)
    e = MultiSpectralImage(np.zeros((2, 3, 3), dtype=np.uint16), 16)
    assert psnr(d, e).mse == 25500.0**2


def test_symmetric(rng):
    a, b = random_image(rng), random_image(rng)
    assert psnr(a, b) == psnr(b, a)


def test_psnr_dimension_mismatch(rng):
    with pytest.raises(ValueError, match="dimension mismatch"):
        psnr(random_image(rng), random_image(rng, width=6))
    with pytest.raises(ValueError, match="dimension mismatch"):
        psnr(random_image(rng, bit_depth=8), random_image(rng, bit_depth=16))


def test_encoding_rate():
    truth = ChangeMap(np.array([[1, 1], [0, 1]]))
    sel = SelectionResult(((0, 0), (1, 0)), 0, 0.0)
    assert change_encoding_rate(sel, truth) == pytest.approx(1 / 3)
    assert change_encoding_rate(SelectionResult(((0, 0), (0, 1), (1, 1)), 0, 0.0), truth) == 1.0
    with pytest.raises(ValueError):
        change_encoding_rate(sel, ChangeMap(np.zeros((2, 2), bool)))


def test_confusion_categories(tmp_path):
    truth = ChangeMap(np.array([[1, 1], [0, 0]]))
    sel = SelectionResult(((0, 0), (1, 0)), 0, 0.0)
    cm = confusion_map(sel, truth)
    assert cm.categories.tolist() == [[Category.TRUE_POSITIVE, Category.MISSED_CHANGE],
                                      [Category.ENCODED_ONLY, Category.BACKGROUND]]
    assert cm.counts() == {"background": 1, "encoded_only": 1, "true_positive": 1, "missed_change": 1}
    assert cm.to_rgb()[0, 0].tolist() == [0, 255, 0]
    assert PALETTE[Category.ENCODED_ONLY].tolist() == [255, 0, 0]
    cm.write_ppm(tmp_path / "c.ppm")
    data = (tmp_path / "c.ppm").read_bytes()
    assert data.startswith(b"P6") and data.endswith(bytes(cm.to_rgb().ravel()))
