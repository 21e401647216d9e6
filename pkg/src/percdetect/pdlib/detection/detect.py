"""Detection of an object in a noisy picture by looking for one anomalously large black cluster.

Steps: threshold the picture, search black clusters depth first until one of at least phi pixels is found or all
clusters are exhausted, then report the verdict. The work is linear in the number of pixels.

The cluster size phi is expected to grow faster than log N for the asymptotic guarantees; that condition constrains
a sequence of problems and is not checked on a single picture."""
import logging
import math
import time

from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

import numpy as np

from ..errors import InconsistentDetectionConfig, InfeasibleThreshold, InvalidProbability
from ..lattice.cluster import Cluster, cluster_at, find_cluster_at_least, label_components, max_cluster_size
from ..models.images import BLACK, GrayImage
from ..models.noise import NoiseModel
from ..models.threshold import DEFAULT_P_C, ThresholdConfig, apply_threshold

log = logging.getLogger(__name__)


class PhiSource(str, Enum):
    CALIBRATED = "calibrated"
    USER_FIXED = "user-fixed"


@dataclass(frozen=True)
class DetectionConfig:
    threshold: ThresholdConfig
    phi: int
    alpha: float = 0.05
    source_of_phi: PhiSource = PhiSource.USER_FIXED

    def __post_init__(self) -> None:
        if self.phi < 1:
            raise InconsistentDetectionConfig(f"phi must be at least 1, got {self.phi}")

        if not 0 < self.alpha < 1:
            raise InvalidProbability("alpha", self.alpha)

        object.__setattr__(self, "source_of_phi", PhiSource(self.source_of_phi))

    @classmethod
    def for_theta(
        cls, model: NoiseModel, theta: float, phi: int, p_c: float = DEFAULT_P_C, **kwargs
    ) -> "DetectionConfig":
        """Config with a threshold built from 'theta'.
        :param **kwargs: alpha and source_of_phi"""
        return cls(ThresholdConfig.from_theta(model, theta, p_c), int(phi), **kwargs)

    def check_image(self, width: int, height: int) -> None:
        if self.phi > width * height:
            raise InconsistentDetectionConfig(f"phi={self.phi} exceeds the pixel count {width * height}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "threshold": self.threshold.to_dict(),
            "phi": self.phi,
            "alpha": self.alpha,
            "source_of_phi": self.source_of_phi.value,
        }


@dataclass(frozen=True)
class DetectionResult:
    detected: bool
    witness: Optional[Cluster]
    phi_used: int
    theta_used: float
    elapsed: float
    pixel_count: int
    width: int
    height: int
    seed: Optional[int] = None
    max_cluster: Optional[int] = None

    def to_dict(self, timings: bool = True) -> dict[str, Any]:
        result: dict[str, Any] = {
            "detected": self.detected,
            "phi_used": self.phi_used,
            "theta_used": self.theta_used,
            "width": self.width,
            "height": self.height,
        }

        if timings:
            result["elapsed_ms"] = round(self.elapsed * 1000.0, 3)

        if self.witness is not None:
            result["witness"] = {"size": self.witness.size, "bbox": list(self.witness.bbox)}

        if self.seed is not None:
            result["seed"] = self.seed

        if self.max_cluster is not None:
            result["max_cluster"] = self.max_cluster

        return result


def detect(
    image: GrayImage, config: DetectionConfig, exhaustive: bool = False, seed: Optional[int] = None
) -> DetectionResult:
    """Run the detection procedure on one picture.
    :param image: observed picture
    :param config: threshold and significant cluster size
    :param exhaustive: label every black cluster instead of stopping at the first one of size phi; the verdict is
                       identical, the result additionally carries the largest cluster size
    :param seed: seed that produced the picture, recorded in the result only"""
    config.check_image(image.width, image.height)

    if config.source_of_phi is PhiSource.CALIBRATED and not config.threshold.feasible:
        raise InfeasibleThreshold(None, config.threshold.p_c, f"theta={config.threshold.theta}")

    start = time.perf_counter()
    binary = apply_threshold(image, config.threshold.theta)
    max_cluster = None

    if exhaustive:
        labeling = label_components(binary, BLACK)
        max_cluster = max_cluster_size(labeling)
        witness = None

        for c in labeling.clusters:
            if c.size >= config.phi:
                first = int(np.flatnonzero(labeling.labels.ravel() == c.id)[0])
                witness = cluster_at(binary, *divmod(first, binary.width), cluster_id=c.id)
                break
    else:
        witness = find_cluster_at_least(binary, config.phi)

    elapsed = time.perf_counter() - start
    detected = witness is not None
    log.debug(f"Detection verdict {detected} with phi={config.phi} in {elapsed * 1000:.2f} ms")

    return DetectionResult(
        detected=detected,
        witness=witness,
        phi_used=config.phi,
        theta_used=config.threshold.theta,
        elapsed=elapsed,
        pixel_count=image.pixel_count,
        width=image.width,
        height=image.height,
        seed=seed,
        max_cluster=max_cluster,
    )


def false_detection_bound(width: int, height: int, n: int, lam: float) -> float:
    """Leading-order union bound on the probability that pure noise shows a black cluster of at least n pixels:
    min(1, width * height * exp(-n * lam)).
    :param width: picture width
    :param height: picture height
    :param n: cluster size, at least 1
    :param lam: exponential tail rate of subcritical cluster sizes, strictly positive"""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")

    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")

    exponent = math.log(width * height) - n * lam
    return 1.0 if exponent >= 0 else math.exp(exponent)
