"""Monte Carlo calibration of the significant cluster size phi.

Pure-noise pictures are simulated, thresholded, and the largest black cluster of each is recorded; phi is then
placed strictly above the empirical (1 - alpha) quantile of that null distribution, optionally inflated by a safety
margin (the default 1.3 turns a null quantile of 191 into 250)."""
import hashlib
import json
import logging
import math
import time

from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from ..errors import InvalidProbability
from ..lattice.cluster import largest_black_cluster
from ..mixins.reports import atomic_open, canonical_json
from ..mixins.utils import map_replicates, replicate_rng
from ..mixins.versions import CACHE_SCHEMA_VERSION, cache_schema_compatible
from ..models.noise import NoiseModel
from ..models.threshold import threshold_array

DEFAULT_MARGIN = 1.3
_EPS = 1e-9

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CalibrationResult:
    width: int
    height: int
    model: dict[str, Any]
    theta: float
    alpha: float
    replicates: int
    seed: int
    samples: tuple[int, ...]
    phi: int
    margin: float = DEFAULT_MARGIN
    elapsed: float = field(default=0.0, compare=False)

    @property
    def quantile(self) -> int:
        """Empirical (1 - alpha) null quantile the threshold was derived from."""
        return empirical_quantile(self.samples, self.alpha)

    def to_dict(self, timings: bool = True) -> dict[str, Any]:
        result = {
            "width": self.width,
            "height": self.height,
            "model": self.model,
            "theta": self.theta,
            "alpha": self.alpha,
            "replicates": self.replicates,
            "seed": self.seed,
            "samples": list(self.samples),
            "quantile": self.quantile,
            "phi": self.phi,
            "margin": self.margin,
        }

        if timings:
            result["elapsed_ms"] = round(self.elapsed * 1000.0, 3)

        return result

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "CalibrationResult":
        return cls(
            width=int(d["width"]),
            height=int(d["height"]),
            model=dict(d["model"]),
            theta=float(d["theta"]),
            alpha=float(d["alpha"]),
            replicates=int(d["replicates"]),
            seed=int(d["seed"]),
            samples=tuple(int(s) for s in d["samples"]),
            phi=int(d["phi"]),
            margin=float(d["margin"]),
        )


def _replicate_null_max(index: int, width: int, height: int, model: NoiseModel, theta: float, seed: int) -> int:
    # empty truth: the observation is the noise term alone
    values = model.draw(replicate_rng(seed, index), (height, width))
    return largest_black_cluster(threshold_array(values, theta))


def simulate_null_max_clusters(
    width: int, height: int, model: NoiseModel, theta: float, replicates: int, seed: int, workers: int = 1
) -> np.ndarray:
    """Largest black cluster of each thresholded pure-noise picture, ordered by replicate index.
    :param width: picture width
    :param height: picture height
    :param model: noise model
    :param theta: threshold
    :param replicates: number of simulated pictures, at least 1
    :param seed: base seed; replicate r uses a generator derived from (seed, r)
    :param workers: worker processes"""
    if replicates < 1:
        raise ValueError(f"replicates must be at least 1, got {replicates}")

    fn = partial(_replicate_null_max, width=width, height=height, model=model, theta=theta, seed=seed)
    return np.array(map_replicates(fn, range(replicates), workers), dtype=np.int64)


def empirical_quantile(samples: Sequence[int], alpha: float) -> int:
    """Order statistic number ceil((1 - alpha) * R), 1-based, of the sorted samples."""
    if len(samples) == 0:
        raise ValueError("samples must not be empty")

    if not 0 < alpha < 1:
        raise InvalidProbability("alpha", alpha)

    ordered = np.sort(np.asarray(samples, dtype=np.int64))
    rank = min(max(math.ceil((1.0 - alpha) * len(ordered) - _EPS), 1), len(ordered))
    return int(ordered[rank - 1])


def phi_from_quantile(samples: Sequence[int], alpha: float, margin: float = DEFAULT_MARGIN) -> int:
    """Significant cluster size: ceil(margin * q) + 1 with q the empirical (1 - alpha) quantile.
    :param samples: null largest-cluster sizes
    :param alpha: target false detection rate in (0, 1)
    :param margin: safety factor, at least 1"""
    if margin < 1:
        raise ValueError(f"margin must be at least 1, got {margin}")

    q = empirical_quantile(samples, alpha)
    return max(1, math.ceil(margin * q - _EPS) + 1)


class CalibrationCache:
    """On-disk store of null samples keyed by (width, height, model, theta, replicates, seed).

    Samples do not depend on alpha or margin, so one entry serves every (alpha, margin) pair."""

    def __init__(self, cache_dir: Path) -> None:
        self.cache_dir = Path(cache_dir)

    @staticmethod
    def key(width: int, height: int, model: NoiseModel, theta: float, replicates: int, seed: int) -> str:
        payload = json.dumps(
            {
                "width": width,
                "height": height,
                "model": model.digest(),
                "theta": repr(float(theta)),
                "replicates": replicates,
                "seed": seed,
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:24]

    def path(self, key: str) -> Path:
        return self.cache_dir.joinpath(f"null-{key}.json")

    def load(self, key: str) -> Optional[np.ndarray]:
        fp = self.path(key)

        if not fp.exists():
            log.info(f"Calibration cache miss for {key}")
            return None

        with fp.open("r", encoding="utf-8") as f:
            entry = json.load(f)

        if not cache_schema_compatible(str(entry.get("schema", "0"))):
            log.info(f"Ignoring calibration cache entry {key} written with schema {entry.get('schema')!r}")
            return None

        log.info(f"Calibration cache hit for {key}")
        return np.array(entry["samples"], dtype=np.int64)

    def store(self, key: str, samples: np.ndarray) -> None:
        self.cache_dir.mkdir(parents=True, exist_ok=True)

        with atomic_open(self.path(key), "w", encoding="utf-8") as f:
            f.write(canonical_json({"schema": CACHE_SCHEMA_VERSION, "samples": samples.tolist()}))


def calibrate(
    width: int,
    height: int,
    model: NoiseModel,
    theta: float,
    alpha: float,
    replicates: int,
    seed: int,
    margin: float = DEFAULT_MARGIN,
    workers: int = 1,
    cache: Optional[CalibrationCache] = None,
) -> CalibrationResult:
    """Simulate the null distribution of the largest black cluster and derive phi from it.
    :param width: picture width
    :param height: picture height
    :param model: noise model
    :param theta: threshold
    :param alpha: target false detection rate in (0, 1)
    :param replicates: number of simulated pictures
    :param seed: base seed
    :param margin: safety factor applied to the null quantile
    :param workers: worker processes
    :param cache: optional on-disk sample cache"""
    if not 0 < alpha < 1:
        raise InvalidProbability("alpha", alpha)

    start = time.perf_counter()
    key = CalibrationCache.key(width, height, model, theta, replicates, seed)
    samples = cache.load(key) if cache else None

    if samples is None:
        log.info(f"Calibrating {width}x{height}, theta={theta}, {replicates} replicates")
        samples = simulate_null_max_clusters(width, height, model, theta, replicates, seed, workers)

        if cache:
            cache.store(key, samples)

    phi = phi_from_quantile(samples, alpha, margin)
    elapsed = time.perf_counter() - start
    log.info(f"Calibrated phi={phi} (alpha={alpha}, margin={margin}) in {elapsed:.1f}s")

    return CalibrationResult(
        width=width,
        height=height,
        model=model.descriptor(),
        theta=float(theta),
        alpha=float(alpha),
        replicates=replicates,
        seed=seed,
        samples=tuple(int(s) for s in samples),
        phi=phi,
        margin=float(margin),
        elapsed=elapsed,
    )
