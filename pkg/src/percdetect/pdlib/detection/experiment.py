"""Repeated detection on synthetic ground truths: power on pictures with an object, false alarms on empty ones, and
left-right crossing frequencies of plain site percolation."""
import logging
import time

from dataclasses import dataclass, field
from functools import partial
from typing import Any, Optional, Sequence

import numpy as np

from scipy import stats

from ..lattice.cluster import largest_black_cluster
from ..lattice.crossing import has_left_right_crossing
from ..mixins.utils import map_replicates, replicate_rng
from ..models.images import BinaryImage, GrayImage
from ..models.noise import NoiseModel
from ..models.threshold import DEFAULT_P_C, threshold_array
from .detect import DetectionConfig, detect

log = logging.getLogger(__name__)


def make_square_object(width: int, height: int, side: int, offset: tuple[int, int]) -> BinaryImage:
    """Ground truth holding one black side x side square with its top-left corner at offset (row, col).
    :param width: picture width
    :param height: picture height
    :param side: square side, at least 1
    :param offset: (row, col) of the top-left corner"""
    row, col = offset

    if side < 1 or row < 0 or col < 0 or row + side > height or col + side > width:
        raise ValueError(f"a {side}x{side} square at {offset} does not fit a {width}x{height} picture")

    bits = np.zeros((height, width), dtype=np.uint8)
    bits[row : row + side, col : col + side] = 1
    return BinaryImage(bits)


def contains_square(truth: BinaryImage, side: int) -> bool:
    """True if some side x side block of the truth is entirely black."""
    if side < 1 or side > min(truth.width, truth.height):
        return False

    sat = np.zeros((truth.height + 1, truth.width + 1), dtype=np.int64)
    sat[1:, 1:] = truth.bits.astype(np.int64).cumsum(axis=0).cumsum(axis=1)
    blocks = sat[side:, side:] - sat[:-side, side:] - sat[side:, :-side] + sat[:-side, :-side]
    return bool(np.any(blocks == side * side))


def noisy_values(truth: BinaryImage, model: NoiseModel, rng: np.random.Generator) -> np.ndarray:
    return truth.bits + model.draw(rng, truth.bits.shape)


def add_noise(truth: BinaryImage, model: NoiseModel, seed: int) -> GrayImage:
    """Observation Y = Im + sigma * eps with i.i.d. noise, deterministic per seed."""
    return GrayImage(noisy_values(truth, model, np.random.default_rng(seed)))


@dataclass(frozen=True)
class RunOutcome:
    run_index: int
    detected: bool
    max_cluster: Optional[int]
    elapsed_ms: float


@dataclass(frozen=True)
class ExperimentReport:
    runs: int
    detections: int
    rate: float
    wilson_ci: tuple[float, float]
    config: dict[str, Any]
    truth_descriptor: str
    seed: int
    mean_elapsed: float = field(default=0.0, compare=False)
    outcomes: tuple[RunOutcome, ...] = field(default=(), compare=False, repr=False)

    def to_dict(self, timings: bool = True) -> dict[str, Any]:
        result = {
            "runs": self.runs,
            "detections": self.detections,
            "rate": self.rate,
            "wilson_ci": list(self.wilson_ci),
            "config": self.config,
            "truth": self.truth_descriptor,
            "seed": self.seed,
        }

        if timings:
            result["mean_elapsed_ms"] = round(self.mean_elapsed * 1000.0, 3)

        return result


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial rate, clipped so it always contains the point estimate."""
    ci = stats.binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    rate = successes / trials
    return (max(0.0, min(float(ci.low), rate)), min(1.0, max(float(ci.high), rate)))


def _run_once(
    index: int, truth: BinaryImage, model: NoiseModel, config: DetectionConfig, seed: int, record_max: bool
) -> RunOutcome:
    values = noisy_values(truth, model, replicate_rng(seed, index))
    result = detect(GrayImage(values), config)
    max_cluster = largest_black_cluster(threshold_array(values, config.threshold.theta)) if record_max else None
    return RunOutcome(index, result.detected, max_cluster, round(result.elapsed * 1000.0, 3))


def run_experiment(
    truth: BinaryImage,
    model: NoiseModel,
    theta: float,
    phi: int,
    runs: int,
    seed: int,
    p_c: float = DEFAULT_P_C,
    truth_descriptor: str = "custom",
    workers: int = 1,
    record_max_cluster: bool = False,
) -> ExperimentReport:
    """Add fresh noise to the truth 'runs' times, run detection on each picture and summarize the verdicts.
    :param truth: ground truth picture
    :param model: noise model
    :param theta: threshold
    :param phi: significant cluster size
    :param runs: number of noisy pictures, at least 1
    :param seed: base seed; run r uses a generator derived from (seed, r)
    :param p_c: critical probability, recorded in the threshold config
    :param truth_descriptor: text describing the truth for the report
    :param workers: worker processes
    :param record_max_cluster: also record the largest black cluster of every run (a second pass per picture)"""
    if runs < 1:
        raise ValueError(f"runs must be at least 1, got {runs}")

    config = DetectionConfig.for_theta(model, theta, phi, p_c)
    config.check_image(truth.width, truth.height)
    log.info(f"Running {runs} detections on truth {truth_descriptor!r} with theta={theta}, phi={phi}")

    start = time.perf_counter()
    fn = partial(_run_once, truth=truth, model=model, config=config, seed=seed, record_max=record_max_cluster)
    outcomes = tuple(map_replicates(fn, range(runs), workers))
    detections = sum(o.detected for o in outcomes)
    log.info(f"{detections}/{runs} detections in {time.perf_counter() - start:.1f}s")

    return ExperimentReport(
        runs=runs,
        detections=detections,
        rate=detections / runs,
        wilson_ci=wilson_interval(detections, runs),
        config=config.to_dict(),
        truth_descriptor=truth_descriptor,
        seed=seed,
        mean_elapsed=float(np.mean([o.elapsed_ms for o in outcomes])) / 1000.0,
        outcomes=outcomes,
    )


def _replicate_crossings(index: int, ps: tuple[float, ...], size: int, seed: int) -> list[bool]:
    # one uniform field per replicate couples every density
    field_ = replicate_rng(seed, index).random((size, size))
    return [has_left_right_crossing(BinaryImage((field_ < p).astype(np.uint8))) for p in ps]


def crossing_curve(ps: Sequence[float], size: int, replicates: int, seed: int, workers: int = 1) -> list[float]:
    """Left-right crossing frequencies at each density, all densities sharing the same uniform fields so the
    curve is nondecreasing in p."""
    if replicates < 1:
        raise ValueError(f"replicates must be at least 1, got {replicates}")

    for p in ps:
        if not 0 <= p <= 1:
            raise ValueError(f"density {p} outside [0, 1]")

    fn = partial(_replicate_crossings, ps=tuple(float(p) for p in ps), size=size, seed=seed)
    hits = np.array(map_replicates(fn, range(replicates), workers), dtype=bool).reshape(replicates, len(ps))
    return [float(v) for v in hits.mean(axis=0)]


def crossing_probability(p: float, size: int, replicates: int, seed: int, workers: int = 1) -> float:
    """Monte Carlo frequency of a black left-right crossing of a size x size lattice at site density p."""
    return crossing_curve([p], size, replicates, seed, workers)[0]
