import logging
import time

from argparse import Namespace
from typing import Any

import numpy as np

from ..detection.detect import false_detection_bound
from ..detection.experiment import crossing_probability
from ..detection.tail import estimate_tail_rate, site_percolation
from ..lattice.crossing import count_disjoint_crossings
from ..models.images import BinaryImage
from .command import CommandReport

log = logging.getLogger(__name__)


class PercolationReport(CommandReport):
    """Percolation Report.
    Modes:
        - 'tail': exponential tail rate of the largest cluster at a subcritical density, optionally with the union
          bound on false detections at cluster size '--bound-n'.
        - 'crossing': frequency of a black left-right crossing, optionally with the mean number of vertex-disjoint
          crossings ('--disjoint', a max flow per lattice)."""

    def __init__(self, opts: Namespace, dry_run: bool = False, **kwargs) -> None:
        self.report_fn = "percolation.json"
        super().__init__(opts, dry_run, **kwargs)

    def _tail(self) -> dict[str, Any]:
        o = self.opts
        estimate = estimate_tail_rate(o.p, o.size, o.replicates, o.seed, p_c=self.p_c, workers=self.workers)
        result = estimate.to_dict(timings=self.timings)

        if o.bound_n is not None:
            if not estimate.finite:
                log.warning("No tail rate estimate, skipping the false detection bound")
            else:
                width, height = o.bound_width or o.size, o.bound_height or o.size
                result["bound"] = {
                    "n": o.bound_n,
                    "width": width,
                    "height": height,
                    "false_detection_bound": false_detection_bound(width, height, o.bound_n, estimate.lambda_hat),
                }

        return result

    def _crossing(self) -> dict[str, Any]:
        o = self.opts
        start = time.perf_counter()
        result: dict[str, Any] = {
            "mode": "crossing",
            "p": o.p,
            "size": o.size,
            "replicates": o.replicates,
            "seed": o.seed,
            "frequency": crossing_probability(o.p, o.size, o.replicates, o.seed, self.workers),
        }

        if o.disjoint:
            # replicate indices past the crossing replicates keep the two streams apart
            rngs = (self.replicate_rng(o.seed, o.replicates + i) for i in range(o.replicates))
            counts = [count_disjoint_crossings(BinaryImage(site_percolation(rng, o.p, o.size))) for rng in rngs]
            result["disjoint_crossings_mean"] = float(np.mean(counts))

        if self.timings:
            result["elapsed_ms"] = round((time.perf_counter() - start) * 1000.0, 3)

        return result

    def report_data(self) -> dict[str, Any]:
        """Run the requested percolation check."""
        return self._tail() if self.opts.mode == "tail" else self._crossing()
