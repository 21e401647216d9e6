from argparse import Namespace
from typing import Any, Iterable, Mapping

from ..detection.experiment import ExperimentReport, contains_square, run_experiment
from .command import CommandReport, parse_truth_option


class SimulationReport(CommandReport):
    """Simulation Report.
    Note: the per-run CSV carries one row per noisy picture, the JSON report only the aggregate rate and its Wilson
          interval."""

    _OUTCOME_FIELDS: list[str] = ["run_index", "detected", "max_cluster", "elapsed_ms"]

    def __init__(self, opts: Namespace, dry_run: bool = False, **kwargs) -> None:
        self.report_fn = "simulation.json"
        super().__init__(opts, dry_run, **kwargs)

    def report_data(self) -> ExperimentReport:
        """Detection rate over repeated noisy copies of the ground truth."""
        truth = parse_truth_option(self.opts.truth, self.opts.width, self.opts.height, self.opts.invert)

        if self.opts.check_square and not contains_square(truth, self.opts.check_square):
            raise ValueError(f"truth {self.opts.truth!r} holds no all-black {self.opts.check_square}-square")

        return run_experiment(
            truth,
            self.noise_model(),
            self.opts.theta,
            self.opts.phi,
            self.opts.runs,
            self.opts.seed,
            p_c=self.p_c,
            truth_descriptor=self.opts.truth,
            workers=self.workers,
            record_max_cluster=bool(self.opts.per_run_csv),
        )

    def _outcome_rows(self, report: ExperimentReport) -> Iterable[Mapping[str, Any]]:
        for o in report.outcomes:
            yield {
                "run_index": o.run_index,
                "detected": self.bool2int(o.detected),
                "max_cluster": "" if o.max_cluster is None else o.max_cluster,
                "elapsed_ms": o.elapsed_ms,
            }

    def write_artifacts(self, data: Any) -> None:
        if self.opts.per_run_csv:
            self.write_report(self._outcome_rows(data), self.opts.per_run_csv, fmt="csv", fn=self._OUTCOME_FIELDS)
