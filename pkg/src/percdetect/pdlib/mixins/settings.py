import os

from pathlib import Path

from ..errors import InvalidProbability
from ..models.threshold import DEFAULT_P_C


def default_p_c() -> float:
    """Critical probability for site percolation; the 'PD_PC' environment variable overrides the default."""
    raw = os.environ.get("PD_PC")

    if raw is None or raw.strip() == "":
        return DEFAULT_P_C

    value = float(raw)

    if not 0 < value < 1:
        raise InvalidProbability("PD_PC", value)

    return value


def default_cache_dir() -> Path:
    """Calibration cache directory from 'PD_CACHE_DIR'; defaults to '~/.cache/percdetect'."""
    raw = os.environ.get("PD_CACHE_DIR")
    return Path(raw).expanduser() if raw else Path.home().joinpath(".cache", "percdetect")


def default_workers() -> int:
    """Worker processes for Monte Carlo loops from 'PD_WORKERS'; defaults to 1 (inline)."""
    return max(1, int(os.environ.get("PD_WORKERS", "1")))


class SettingsMixin:
    """A mixin for environment driven settings, such as the critical probability, cache location, etc."""

    @property
    def p_c(self) -> float:
        """Critical probability used for feasibility checks."""
        return default_p_c()

    @property
    def cache_dir(self) -> Path:
        """Directory holding cached calibration tables."""
        return default_cache_dir()

    @property
    def workers(self) -> int:
        """Worker processes for replicate loops; an explicit constructor value wins over 'PD_WORKERS'."""
        return self._workers if self._workers else default_workers()
