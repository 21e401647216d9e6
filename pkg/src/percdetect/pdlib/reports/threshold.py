import logging

from argparse import Namespace
from typing import Any

from ..models.noise import NoiseKind
from ..models.threshold import (
    ThresholdConfig,
    feasible_theta_interval,
    noise_limit,
    optimize_theta,
    quadratic_objective,
)
from .command import CommandReport

log = logging.getLogger(__name__)


class ThresholdReport(CommandReport):
    """Threshold Report."""

    def __init__(self, opts: Namespace, dry_run: bool = False, **kwargs) -> None:
        self.report_fn = "threshold.json"
        super().__init__(opts, dry_run, **kwargs)

    def report_data(self) -> dict[str, Any]:
        """Optimize theta and describe the feasible interval it was picked from."""
        model = self.noise_model()
        p_c = self.p_c
        bounds = tuple(self.opts.bounds) if self.opts.bounds else None
        theta = optimize_theta(model, p_c, self.opts.objective, self.opts.grid_step, bounds)
        interval = feasible_theta_interval(model, p_c, bounds)
        result = {
            "noise": model.descriptor(),
            "objective": self.opts.objective,
            "grid_step": self.opts.grid_step,
            "p_c": p_c,
            "interval": [interval.lo, interval.hi],
            "threshold": ThresholdConfig.from_theta(model, theta, p_c).to_dict(),
            "quadratic_objective": float(quadratic_objective(model, theta, p_c)),
        }

        # the fixed-threshold noise ceiling only has a closed form for gaussian noise
        if model.kind is NoiseKind.GAUSSIAN and 0.5 < p_c < 1:
            result["noise_limit_at_half"] = noise_limit(p_c, 0.5)

        log.info(f"Optimized theta={theta} over ({interval.lo}, {interval.hi})")
        return result
