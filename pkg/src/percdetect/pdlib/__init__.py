"""Core PercDetect Class"""
from pathlib import Path
from typing import Optional

from .mixins.reports import ReportWriterMixin
from .mixins.settings import SettingsMixin
from .mixins.utils import UtilsMixin

__title__ = "pdlib"
__summary__ = "percdetect-core package for percolation based object detection in noisy images"
__version__ = "1.0.20261018"
__author__ = "percdetect contributors"
__license__ = "MIT License"
__copyright__ = f"2026 {__author__}"


class PercDetect(UtilsMixin, ReportWriterMixin, SettingsMixin):
    """The PercDetect parent class."""

    def __init__(
        self,
        dry_run: bool = False,
        out_dir: Optional[Path] = None,
        workers: Optional[int] = None,
        timings: bool = True,
    ) -> None:
        self.dry_run = dry_run
        self.timings = timings
        self.out_dir = Path(out_dir) if out_dir else Path.cwd()
        self._workers = workers
