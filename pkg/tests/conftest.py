import numpy as np
import pytest

from eo_downlink.config import ScenarioConfig
from eo_downlink.imaging import MultiSpectralImage

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def default_config():
    return ScenarioConfig()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_image(rng, bands=3, height=5, width=7, bit_depth=16):
    hi = 2**bit_depth
    return MultiSpectralImage(rng.integers(0, hi, size=(bands, height, width)), bit_depth)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
