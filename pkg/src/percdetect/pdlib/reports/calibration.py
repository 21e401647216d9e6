from argparse import Namespace
from typing import Any

from ..detection.calibrate import CalibrationResult, calibrate
from .command import CommandReport


class CalibrationReport(CommandReport):
    """Calibration Report."""

    def __init__(self, opts: Namespace, dry_run: bool = False, **kwargs) -> None:
        self.report_fn = "calibration.json"
        super().__init__(opts, dry_run, **kwargs)

    def report_data(self) -> CalibrationResult:
        """Simulate the null largest-cluster distribution and derive phi."""
        return calibrate(
            self.opts.width,
            self.opts.height,
            self.noise_model(),
            self.opts.theta,
            self.opts.alpha,
            self.opts.replicates,
            self.opts.seed,
            self.opts.margin,
            self.workers,
            self.calibration_cache,
        )

    def write_artifacts(self, data: Any) -> None:
        if self.opts.samples_csv:
            rows = [{"max_cluster": s} for s in data.samples]
            self.write_report(rows, self.opts.samples_csv, fmt="csv", fn=["max_cluster"])
