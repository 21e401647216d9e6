"""Command line entry point.

Every subcommand prints its report as canonical JSON on stdout, or writes it to '--output' (default name under
'--out-dir', e.g. calibration.json); logging goes to stderr.
Exit codes: 0 the command ran (a detection verdict is in the report), 2 bad input, 3 no feasible threshold."""
import argparse
import logging
import sys

from pathlib import Path
from typing import Optional, Sequence

from . import __summary__, __version__
from .detection.calibrate import DEFAULT_MARGIN
from .errors import InfeasibleThreshold
from .fileio.images import ImageFormat
from .mixins.utils import parse_seed
from .models.threshold import DEFAULT_GRID_STEP, Objective
from .reports.calibration import CalibrationReport
from .reports.command import CommandReport
from .reports.detection import DetectionReport
from .reports.percolation import PercolationReport
from .reports.simulation import SimulationReport
from .reports.threshold import ThresholdReport

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_INFEASIBLE = 3

REPORTS: dict[str, type[CommandReport]] = {
    "detect": DetectionReport,
    "calibrate": CalibrationReport,
    "optimize-theta": ThresholdReport,
    "simulate": SimulationReport,
    "percolation-check": PercolationReport,
}

_MARGIN_HELP = f"phi safety factor (default: {DEFAULT_MARGIN})"

log = logging.getLogger(__name__)


def _seed(s: str) -> int:
    try:
        return parse_seed(s)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _positive_int(s: str) -> int:
    value = int(s)

    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s!r}")

    return value


def _common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging on stderr, repeatable")
    parser.add_argument("-o", "--output", type=Path, help="write the JSON report here instead of stdout")
    parser.add_argument("--out-dir", type=Path, help="write reports and side files under this directory")
    parser.add_argument("--no-timings", action="store_true", help="omit timing fields for byte-stable reports")
    parser.add_argument("--workers", type=_positive_int, help="worker processes (default: PD_WORKERS or 1)")
    parser.add_argument("--dry-run", action="store_true", help="compute the report without writing any files")
    parser.add_argument("--pc", type=float, help="critical probability (default: PD_PC or 0.592746)")
    parser.add_argument("--seed", type=_seed, default=0, help="64-bit seed, decimal or 0x-hex (default: 0)")
    return parser


def _noise_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--noise", default="gaussian", help="'gaussian' (default) or 'table:PATH'")
    parser.add_argument("--sigma", type=float, help="gaussian noise level")
    parser.add_argument("--interpolate", action="store_true", help="interpolate between noise table rows")
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="percdetect", description=__summary__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parents = [_common_parser(), _noise_parser()]
    objectives = [o.value for o in Objective]
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("detect", parents=parents, help="look for an object in a picture")
    p.add_argument("--input", type=Path, required=True, help="PGM or float-csv picture")
    p.add_argument("--format", choices=[f.value for f in ImageFormat], help="picture format (default: by suffix)")
    p.add_argument("--invert", action="store_true", help="PGM only, dark samples are the object")
    theta = p.add_mutually_exclusive_group(required=True)
    theta.add_argument("--theta", type=float, help="fixed threshold")
    theta.add_argument("--auto-theta", choices=objectives, help="optimize the threshold with this objective")
    phi = p.add_mutually_exclusive_group(required=True)
    phi.add_argument("--phi", type=_positive_int, help="fixed significant cluster size")
    phi.add_argument("--calibrate", action="store_true", help="calibrate phi on simulated pure-noise pictures")
    p.add_argument("--alpha", type=float, default=0.05, help="target false detection rate (default: 0.05)")
    p.add_argument("--replicates", type=_positive_int, default=1000, help="calibration replicates (default: 1000)")
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN, help=_MARGIN_HELP)
    p.add_argument("--grid-step", type=float, default=DEFAULT_GRID_STEP, help="threshold search grid spacing")
    p.add_argument("--exhaustive", action="store_true", help="label every cluster and report the largest")
    p.add_argument("--no-cache", action="store_true", help="do not read or write the calibration cache")
    p.add_argument("--clusters-csv", type=Path, help="write the black clusters of the thresholded picture here")
    p.add_argument("--cluster-pixels", action="store_true", help="include member pixels in the clusters CSV")

    p = sub.add_parser("calibrate", parents=parents, help="calibrate phi on pure-noise pictures")
    p.add_argument("--width", type=_positive_int, required=True)
    p.add_argument("--height", type=_positive_int, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.05, help="target false detection rate (default: 0.05)")
    p.add_argument("--replicates", type=_positive_int, default=1000, help="simulated pictures (default: 1000)")
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN, help=_MARGIN_HELP)
    p.add_argument("--no-cache", action="store_true", help="do not read or write the calibration cache")
    p.add_argument("--samples-csv", type=Path, help="write the simulated largest cluster sizes here")

    p = sub.add_parser("optimize-theta", parents=parents, help="pick a threshold for a noise model")
    p.add_argument("--objective", choices=objectives, default=Objective.QUADRATIC.value)
    p.add_argument("--grid-step", type=float, default=DEFAULT_GRID_STEP, help="search grid spacing")
    p.add_argument("--bounds", type=float, nargs=2, metavar=("LO", "HI"), help="restrict theta to [LO, HI]")

    p = sub.add_parser("simulate", parents=parents, help="detection rate on noisy copies of a ground truth")
    p.add_argument("--truth", required=True, help="picture path, 'empty' or 'square:SIDE@ROW,COL'")
    p.add_argument("--width", type=_positive_int)
    p.add_argument("--height", type=_positive_int)
    p.add_argument("--invert", action="store_true", help="PGM truths only, dark samples are black")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--phi", type=_positive_int, required=True)
    p.add_argument("--runs", type=_positive_int, default=200, help="noisy pictures (default: 200)")
    p.add_argument("--check-square", type=_positive_int, help="require an all-black square of this side in the truth")
    p.add_argument("--per-run-csv", type=Path, help="write one row per run here")

    p = sub.add_parser("percolation-check", parents=parents[:1], help="site percolation sanity checks")
    p.add_argument("--mode", choices=["tail", "crossing"], required=True)
    p.add_argument("--p", type=float, required=True, help="site density")
    p.add_argument("--size", type=_positive_int, default=128, help="lattice side (default: 128)")
    p.add_argument("--replicates", type=_positive_int, default=500, help="simulated lattices (default: 500)")
    p.add_argument("--bound-n", type=_positive_int, help="tail mode, cluster size for the false detection bound")
    p.add_argument("--bound-width", type=_positive_int, help="picture width for the bound (default: --size)")
    p.add_argument("--bound-height", type=_positive_int, help="picture height for the bound (default: --size)")
    p.add_argument("--disjoint", action="store_true", help="crossing mode, also count vertex-disjoint crossings")

    return parser


def run(opts: argparse.Namespace) -> int:
    """Run one parsed command and return its exit code."""
    kwargs = {"out_dir": opts.out_dir, "workers": opts.workers, "timings": not opts.no_timings}
    report = REPORTS[opts.command](opts, dry_run=opts.dry_run, **kwargs)

    try:
        if opts.out_dir and not opts.dry_run:
            opts.out_dir.mkdir(parents=True, exist_ok=True)

        data = report.report_data()

        if opts.output or opts.out_dir:
            report.write_report(data, opts.output or report.report_fn)
        else:
            sys.stdout.write(report.render_json(data))

        report.write_artifacts(data)
    except InfeasibleThreshold as e:
        log.error(str(e))
        return EXIT_INFEASIBLE
    except (ValueError, OSError) as e:
        log.error(str(e))
        return EXIT_BAD_INPUT

    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    opts = build_parser().parse_args(argv)
    level = max(logging.DEBUG, logging.WARNING - 10 * opts.verbose)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    return run(opts)


if __name__ == "__main__":
    sys.exit(main())
