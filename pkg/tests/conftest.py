import numpy as np
import pytest

from percdetect.pdlib.models.images import BinaryImage, GrayImage
from percdetect.pdlib.models.noise import NoiseModel


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """Keep every test away from the user's cache and environment overrides."""
    monkeypatch.setenv("PD_CACHE_DIR", str(tmp_path.joinpath("cache")))
    monkeypatch.delenv("PD_PC", raising=False)
    monkeypatch.delenv("PD_WORKERS", raising=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture
def gaussian_18():
    return NoiseModel.gaussian(1.8)


@pytest.fixture
def noiseless():
    return NoiseModel.point_mass(0.0)


@pytest.fixture
def pattern_3x3():
    return BinaryImage.from_rows(["110", "010", "001"])


@pytest.fixture
def float_csv_image(tmp_path):
    """A 16x16 float-csv picture holding a bright 6x6 block on a dark background."""
    values = np.zeros((16, 16))
    values[5:11, 5:11] = 1.0
    fp = tmp_path.joinpath("block.csv")
    fp.write_text("\n".join(",".join(repr(v) for v in row) for row in values.tolist()) + "\n", encoding="utf-8")
    return (fp, GrayImage(values))
