"""Threshold selection and thresholding of noisy pictures.

A threshold theta is usable when background pixels turn black with a subcritical probability p_out and object
pixels with a supercritical probability p_im, i.e. p_out < p_c < p_im."""
import logging
import math

from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Mapping, Optional

import numpy as np

from scipy.special import ndtri

from ..errors import InfeasibleThreshold, InvalidProbability
from .images import BinaryImage, GrayImage
from .noise import ArrayOrFloat, NoiseModel

# Site percolation threshold of the square lattice (numerical estimate); overridable with PD_PC.
DEFAULT_P_C = 0.592746
DEFAULT_GRID_STEP = 1e-3
_MIN_NUDGE = 1e-300

log = logging.getLogger(__name__)


class Objective(str, Enum):
    QUADRATIC = "quadratic"
    SIGN = "sign"


@dataclass(frozen=True)
class ThetaInterval:
    """Set of thresholds satisfying both phase conditions, stored by its endpoints."""

    lo: float
    hi: float

    @property
    def midpoint(self) -> float:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def grid(self, step: float) -> np.ndarray:
        """Grid points lo + k*step strictly inside the interval, keeping one step away from either end."""
        count = int(math.floor(self.width / step))
        return self.lo + step * np.arange(1, count, dtype=np.float64)


@dataclass(frozen=True)
class ThresholdConfig:
    theta: float
    alpha0: float
    p_c: float
    p_out: float
    p_im: float

    def __post_init__(self) -> None:
        if not 0 < self.p_c < 1:
            raise InvalidProbability("p_c", self.p_c)

    @property
    def feasible(self) -> bool:
        return self.p_out < self.p_c < self.p_im

    @classmethod
    def from_theta(cls, model: NoiseModel, theta: float, p_c: float = DEFAULT_P_C) -> "ThresholdConfig":
        """Config for a given threshold; alpha0 is the false-black rate that threshold achieves."""
        p_out, p_im = percolation_probs(model, theta)
        return cls(float(theta), p_out, p_c, p_out, p_im)

    @classmethod
    def from_alpha(cls, model: NoiseModel, alpha0: float, p_c: float = DEFAULT_P_C) -> "ThresholdConfig":
        theta = theta_from_alpha(model, alpha0)
        p_out, p_im = percolation_probs(model, theta)
        return cls(theta, float(alpha0), p_c, p_out, p_im)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ThresholdConfig":
        return cls(**{key: float(d[key]) for key in ("theta", "alpha0", "p_c", "p_out", "p_im")})

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


def theta_from_alpha(model: NoiseModel, alpha0: float) -> float:
    """Smallest threshold whose white-pixel exceedance probability is at most alpha0.
    :param model: noise model
    :param alpha0: per-pixel false-black rate in (0, 1]"""
    if not 0 < alpha0 <= 1:
        raise InvalidProbability("alpha0", alpha0, "(0, 1]")

    if alpha0 == 1:
        return -math.inf

    theta = float(model.unstandardize(model.tail_quantile(alpha0)))
    step = max(math.ulp(theta), _MIN_NUDGE)

    # rescaling by sigma can leave the exceedance a few ulps above alpha0
    while model.white_exceed_prob(theta) > alpha0:
        theta += step
        step *= 2.0

    return theta


def percolation_probs(model: NoiseModel, theta: float) -> tuple[float, float]:
    """Black probabilities after thresholding: (p_out for background pixels, p_im for object pixels)."""
    p_out = model.white_exceed_prob(theta)
    p_im = 1.0 - model.black_below_prob(theta)
    return (float(p_out), float(p_im))


def is_feasible(model: NoiseModel, theta: ArrayOrFloat, p_c: float) -> ArrayOrFloat:
    """Evaluate p_out < p_c < p_im exactly, elementwise for arrays."""
    p_out = model.white_exceed_prob(theta)
    p_im = 1.0 - model.black_below_prob(theta)
    result = (np.asarray(p_out) < p_c) & (p_c < np.asarray(p_im))
    return bool(result) if np.ndim(result) == 0 else result


def feasible_theta_interval(
    model: NoiseModel, p_c: float, bounds: Optional[tuple[float, float]] = None
) -> Optional[ThetaInterval]:
    """Thresholds satisfying both phase conditions, or None when sigma is not 1-small.
    :param model: noise model
    :param p_c: critical probability in (0, 1)
    :param bounds: optional closed range (lo, hi) the threshold is restricted to"""
    if not 0 < p_c < 1:
        raise InvalidProbability("p_c", p_c)

    q = 1.0 - p_c
    lo = float(model.unstandardize(model.upper_quantile(q)))
    hi = 1.0 + float(model.unstandardize(model.quantile(q)))

    if bounds is not None:
        lo, hi = max(lo, bounds[0]), min(hi, bounds[1])

    if lo > hi:
        return None

    inner = lo if lo == hi else (lo + hi) / 2

    if not is_feasible(model, inner, p_c):
        return None

    return ThetaInterval(lo, hi)


def quadratic_objective(model: NoiseModel, theta: ArrayOrFloat, p_c: float) -> ArrayOrFloat:
    """Squared distances of p_out and p_im from the critical probability."""
    p_out = model.white_exceed_prob(theta)
    p_im = 1.0 - model.black_below_prob(theta)
    return (p_out - p_c) ** 2 + (p_im - p_c) ** 2


def optimize_theta(
    model: NoiseModel,
    p_c: float,
    objective: Objective | str = Objective.QUADRATIC,
    grid_step: float = DEFAULT_GRID_STEP,
    bounds: Optional[tuple[float, float]] = None,
) -> float:
    """Pick a threshold inside the feasible interval.
    quadratic: grid maximizer of the quadratic objective, ties to the smaller theta.
    sign: the sign objective is constant on the feasible interval, so its midpoint is returned.
    :param model: noise model
    :param p_c: critical probability
    :param objective: 'quadratic' or 'sign'
    :param grid_step: grid spacing for the quadratic search
    :param bounds: optional closed range restricting theta"""
    if grid_step <= 0:
        raise ValueError(f"grid_step must be positive, got {grid_step}")

    objective = Objective(objective)
    interval = feasible_theta_interval(model, p_c, bounds)

    if interval is None:
        raise InfeasibleThreshold(model.sigma, p_c)

    if objective is Objective.SIGN or interval.width == 0:
        log.debug(f"Sign objective: midpoint of ({interval.lo:.6f}, {interval.hi:.6f})")
        return interval.midpoint

    grid = interval.grid(grid_step)
    grid = grid[is_feasible(model, grid, p_c)] if grid.size else grid

    if not grid.size:
        log.debug("Feasible interval narrower than the grid, falling back to its midpoint")
        return interval.midpoint

    scores = quadratic_objective(model, grid, p_c)
    best = float(grid[int(np.argmax(scores))])
    log.debug(f"Quadratic objective maximized at theta={best:.6f} over {grid.size} grid points")
    return best


def noise_limit(p_c: float = DEFAULT_P_C, theta: float = 0.5) -> float:
    """Largest Gaussian noise level for which the fixed threshold theta in (0, 1) satisfies both phase conditions.
    For theta = 0.5 this is 1/(2 * inverse_normal(p_c))."""
    if not 0.5 < p_c < 1:
        raise InvalidProbability("p_c", p_c, "(0.5, 1)")

    if not 0 < theta < 1:
        raise InvalidProbability("theta", theta)

    return (1.0 - theta) / float(ndtri(p_c))


def apply_threshold(image: GrayImage, theta: float) -> BinaryImage:
    """Black where Y >= theta, white elsewhere."""
    return BinaryImage(threshold_array(image.values, theta))


def threshold_array(values: np.ndarray, theta: float) -> np.ndarray:
    return (values >= theta).astype(np.uint8)
