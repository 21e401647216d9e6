"""Empirical tail rate of the largest cluster in subcritical site percolation.

Below the critical density P(|C_max| >= n) decays exponentially in n; the rate is estimated by a least squares fit
of log P(|C_max| >= n) against n over the sizes whose empirical probability lies in a band."""
import logging
import math
import time

from dataclasses import dataclass, field
from functools import partial
from typing import Any, Optional

import numpy as np

from scipy import stats

from ..errors import InvalidProbability
from ..lattice.cluster import largest_black_cluster
from ..mixins.utils import map_replicates, replicate_rng
from ..models.threshold import DEFAULT_P_C

MIN_LATTICE_SIZE = 64
DEFAULT_BAND = (0.01, 0.5)

log = logging.getLogger(__name__)


def site_percolation(rng: np.random.Generator, p: float, height: int, width: Optional[int] = None) -> np.ndarray:
    """Bit plane with each site black independently with probability p."""
    return (rng.random((height, width or height)) < p).astype(np.uint8)


def _replicate_max_cluster(index: int, seed: int, p: float, size: int) -> int:
    return largest_black_cluster(site_percolation(replicate_rng(seed, index), p, size))


def max_cluster_samples(p: float, size: int, replicates: int, seed: int, workers: int = 1) -> np.ndarray:
    """Largest black cluster of 'replicates' independent size x size lattices at density p."""
    fn = partial(_replicate_max_cluster, seed=seed, p=p, size=size)
    return np.array(map_replicates(fn, range(replicates), workers), dtype=np.int64)


@dataclass(frozen=True)
class TailRateEstimate:
    lambda_hat: float
    r_squared: float
    p: float
    size: int
    replicates: int
    seed: int
    fitted_sizes: tuple[int, ...] = ()
    reason: Optional[str] = None
    elapsed: float = field(default=0.0, compare=False)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.lambda_hat)

    def to_dict(self, timings: bool = True) -> dict[str, Any]:
        result: dict[str, Any] = {
            "mode": "tail",
            "p": self.p,
            "size": self.size,
            "replicates": self.replicates,
            "seed": self.seed,
            "fitted_sizes": list(self.fitted_sizes),
        }

        # JSON has no NaN; a degenerate fit omits the estimate and states why
        if self.finite:
            result["lambda_hat"] = self.lambda_hat
            result["r_squared"] = self.r_squared

        if self.reason:
            result["reason"] = self.reason

        if timings:
            result["elapsed_ms"] = round(self.elapsed * 1000.0, 3)

        return result


def fit_tail_rate(samples: np.ndarray, band: tuple[float, float] = DEFAULT_BAND) -> tuple[float, float, np.ndarray]:
    """Fit log P(M >= n) = a - lambda * n over sizes n whose survival probability is inside 'band'.
    Returns (lambda_hat, r_squared, sizes_used); NaNs when fewer than two sizes qualify."""
    samples = np.asarray(samples, dtype=np.int64)
    top = int(samples.max()) if samples.size else 0
    ns = np.arange(1, top + 1)
    counts = np.bincount(samples, minlength=top + 1)
    survival = counts[::-1].cumsum()[::-1][1:] / samples.size
    mask = (survival >= band[0]) & (survival <= band[1])

    if np.count_nonzero(mask) < 2:
        return (math.nan, math.nan, ns[mask])

    fit = stats.linregress(ns[mask], np.log(survival[mask]))
    return (float(-fit.slope), float(fit.rvalue**2), ns[mask])


def estimate_tail_rate(
    p: float,
    size: int,
    replicates: int,
    seed: int,
    p_c: float = DEFAULT_P_C,
    band: tuple[float, float] = DEFAULT_BAND,
    workers: int = 1,
) -> TailRateEstimate:
    """Estimate the exponential tail rate of the largest cluster at subcritical density p.
    :param p: site density, 0 <= p < p_c
    :param size: lattice side, at least 64
    :param replicates: number of simulated lattices
    :param seed: base seed; replicate r uses a generator derived from (seed, r)
    :param p_c: critical probability
    :param band: survival probability range used by the fit
    :param workers: worker processes"""
    if not 0 <= p < p_c:
        raise InvalidProbability("p", p, f"[0, {p_c}) (subcritical)")

    if size < MIN_LATTICE_SIZE:
        raise ValueError(f"size must be at least {MIN_LATTICE_SIZE}, got {size}")

    if replicates < 1:
        raise ValueError(f"replicates must be at least 1, got {replicates}")

    start = time.perf_counter()
    samples = max_cluster_samples(p, size, replicates, seed, workers)
    lambda_hat, r_squared, used = fit_tail_rate(samples, band)
    elapsed = time.perf_counter() - start
    reason = None

    if not math.isfinite(lambda_hat):
        reason = f"fewer than two cluster sizes with survival probability in [{band[0]}, {band[1]}]"
        log.warning(f"No finite tail rate at p={p}: {reason}")
    else:
        log.info(f"Tail rate at p={p}: lambda={lambda_hat:.4f}, r^2={r_squared:.3f} over {used.size} sizes")

    return TailRateEstimate(
        lambda_hat, r_squared, p, size, replicates, seed, tuple(int(n) for n in used), reason, elapsed
    )
