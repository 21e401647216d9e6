import logging

from argparse import Namespace
from typing import Any

from ..detection.calibrate import calibrate
from ..detection.detect import DetectionConfig, DetectionResult, PhiSource, detect
from ..errors import InfeasibleThreshold
from ..fileio.images import read_image
from ..lattice.cluster import CLUSTER_FIELDS, cluster_rows, label_components
from ..models.images import GrayImage
from ..models.noise import NoiseModel
from ..models.threshold import ThresholdConfig, apply_threshold, optimize_theta
from .command import CommandReport

log = logging.getLogger(__name__)


class DetectionReport(CommandReport):
    """Detection Report.
    Thresholds the input picture at a fixed or optimized theta and looks for a black cluster of at least phi pixels,
    with phi either given or calibrated by simulating pure-noise pictures of the same size."""

    def __init__(self, opts: Namespace, dry_run: bool = False, **kwargs) -> None:
        self.report_fn = "detect.json"
        super().__init__(opts, dry_run, **kwargs)
        self._image = None

    @property
    def image(self) -> GrayImage:
        if self._image is None:
            self._image = read_image(self.opts.input, self.opts.format, self.opts.invert)

        return self._image

    def _theta(self, model: NoiseModel) -> float:
        """The threshold given with '--theta', or the optimizer's pick for '--auto-theta'."""
        if self.opts.theta is not None:
            return self.opts.theta

        return optimize_theta(model, self.p_c, self.opts.auto_theta, self.opts.grid_step)

    def _phi(self, model: NoiseModel, theta: float) -> tuple[int, PhiSource]:
        if self.opts.phi is not None:
            return (self.opts.phi, PhiSource.USER_FIXED)

        # calibrating on an infeasible threshold would only postpone the failure
        if not ThresholdConfig.from_theta(model, theta, self.p_c).feasible:
            raise InfeasibleThreshold(model.sigma, self.p_c, f"theta={theta}")

        result = calibrate(
            self.image.width,
            self.image.height,
            model,
            theta,
            self.opts.alpha,
            self.opts.replicates,
            self.opts.seed,
            self.opts.margin,
            self.workers,
            self.calibration_cache,
        )
        return (result.phi, PhiSource.CALIBRATED)

    def report_data(self) -> DetectionResult:
        """Run detection on the input picture."""
        model = self.noise_model()
        theta = self._theta(model)
        phi, source = self._phi(model, theta)
        config = DetectionConfig.for_theta(model, theta, phi, self.p_c, alpha=self.opts.alpha, source_of_phi=source)
        result = detect(self.image, config, exhaustive=self.opts.exhaustive, seed=self.opts.seed)
        log.info(f"Detected: {result.detected} (theta={theta}, phi={phi}, {source.value})")
        return result

    def write_artifacts(self, data: Any) -> None:
        if not self.opts.clusters_csv:
            return

        pixels = self.opts.cluster_pixels
        labeling = label_components(apply_threshold(self.image, data.theta_used), store_pixels=pixels)
        fn = CLUSTER_FIELDS + (["pixels"] if pixels else [])
        self.write_report(cluster_rows(labeling, pixels), self.opts.clusters_csv, fmt="csv", fn=fn)
