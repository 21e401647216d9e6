import re

from argparse import Namespace
from pathlib import Path
from typing import Any, Optional

from .. import PercDetect
from ..detection.calibrate import CalibrationCache
from ..detection.experiment import make_square_object
from ..errors import InvalidProbability
from ..fileio.images import read_truth
from ..fileio.tables import read_noise_table
from ..models.images import BinaryImage
from ..models.noise import NoiseModel

_SQUARE_RE = re.compile(r"^square:(?P<side>\d+)@(?P<row>\d+),(?P<col>\d+)$")


def parse_noise_option(noise: str, sigma: Optional[float], interpolate: bool = False) -> NoiseModel:
    """Build a noise model from a '--noise' value.
    :param noise: 'gaussian' or 'table:PATH'
    :param sigma: noise level, required for gaussian noise; empirical tables carry their own scale
    :param interpolate: interpolate between table rows"""
    if noise == "gaussian":
        if sigma is None:
            raise ValueError("--sigma is required with gaussian noise")

        return NoiseModel.gaussian(sigma)

    if noise.startswith("table:") and len(noise) > len("table:"):
        return read_noise_table(Path(noise[len("table:") :]), interpolate=interpolate)

    raise ValueError(f"unknown noise {noise!r}, expected 'gaussian' or 'table:PATH'")


def parse_truth_option(truth: str, width: Optional[int], height: Optional[int], invert: bool = False) -> BinaryImage:
    """Build a ground truth from a '--truth' value.
    :param truth: 'square:SIDE@ROW,COL' (needs width and height), 'empty' (likewise) or a picture path
    :param width: picture width for synthetic truths
    :param height: picture height for synthetic truths
    :param invert: PGM truths only, treat dark samples as black"""
    match = _SQUARE_RE.match(truth)

    if match or truth == "empty":
        if not width or not height:
            raise ValueError(f"--width and --height are required with truth {truth!r}")

        if truth == "empty":
            return BinaryImage.blank(width, height)

        side, row, col = (int(match.group(g)) for g in ("side", "row", "col"))
        return make_square_object(width, height, side, (row, col))

    image = read_truth(truth, invert=invert)

    if (width and width != image.width) or (height and height != image.height):
        raise ValueError(f"truth {truth!r} is {image.width}x{image.height}, not {width}x{height}")

    return image


class CommandReport(PercDetect):
    """Shared plumbing for the command line reports; 'opts' is the parsed argument namespace."""

    def __init__(self, opts: Namespace, dry_run: bool = False, **kwargs) -> None:
        self.opts = opts
        super().__init__(dry_run, **kwargs)

    @property
    def p_c(self) -> float:
        """Critical probability; '--pc' wins over 'PD_PC'."""
        value = getattr(self.opts, "pc", None)

        if value is None:
            return super().p_c

        if not 0 < value < 1:
            raise InvalidProbability("pc", value)

        return value

    @property
    def calibration_cache(self) -> Optional[CalibrationCache]:
        return None if getattr(self.opts, "no_cache", False) else CalibrationCache(self.cache_dir)

    def noise_model(self) -> NoiseModel:
        return parse_noise_option(self.opts.noise, self.opts.sigma, getattr(self.opts, "interpolate", False))

    def write_artifacts(self, data: Any) -> None:
        """Write side files (CSV) next to the JSON report; nothing by default."""
