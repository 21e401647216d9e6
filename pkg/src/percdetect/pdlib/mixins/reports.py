import csv
import json
import logging
import os
import tempfile

from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping, Optional

from ..errors import InvalidReportFormat

log = logging.getLogger(__name__)


def canonical_json(data: Mapping[str, Any]) -> str:
    """Serialize with sorted keys and fixed separators so identical inputs give identical bytes."""
    return json.dumps(data, sort_keys=True, indent=2, separators=(",", ": "), allow_nan=False) + "\n"


@contextmanager
def atomic_open(fp: Path, _mode: str = "w", **kwargs) -> Iterator[Any]:
    """Open a temporary sibling of 'fp' for writing and rename it over 'fp' once the block completes.
    :param fp: destination path
    :param **kwargs: additional arguments passed on to the open call"""
    fd, tmp = tempfile.mkstemp(prefix=f".{fp.name}.", dir=fp.parent)

    try:
        with os.fdopen(fd, _mode, **kwargs) as f:
            yield f

        os.replace(tmp, fp)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


class ReportWriterMixin:
    """A mixin for writing report data."""

    def _dict2csv(self, fp: Path, fn: list[str], data: Iterable[Mapping[str, Any]], **kwargs) -> None:
        """Write rows of mappings to a CSV file path.
        :param fp: destination as a path object
        :param fn: fieldnames (all fieldnames must be in the data object)
        :param data: mapping objects to write
        :param **kwargs: additional arguments to pass on to the dictionary writer"""
        with atomic_open(fp, "w", newline="", encoding="utf-8") as f:
            w = csv.DictWriter(f, fieldnames=fn, **kwargs)
            w.writeheader()

            for row in data:
                w.writerow(row)

    def _list2csv(self, fp: Path, data: Iterable[Iterable[Any]], **kwargs) -> None:
        """Write rows of sequences to a CSV file path.
        :param fp: destination as a path object
        :param data: sequences to write, one per row
        :param **kwargs: additional arguments to pass on to the csv writer"""
        with atomic_open(fp, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, **kwargs)

            for row in data:
                w.writerow(row)

    def render_json(self, data: Any) -> str:
        """Canonical JSON text of a report object (anything with a 'to_dict' method) or a mapping; timing fields
        are included only when the instance was created with timings enabled."""
        payload = data.to_dict(timings=self.timings) if hasattr(data, "to_dict") else data
        return canonical_json(payload)

    def write_report(self, data: Any, fp: Path | str, fmt: str = "json", fn: Optional[list[str]] = None, **kwargs):
        """Write a report to file.
        :param data: report object (anything with a 'to_dict' method), a mapping, or rows for CSV output
        :param fp: destination; relative paths are joined to the output directory of the PercDetect instance
        :param fmt: 'json' or 'csv'
        :param fn: fieldnames, required when writing mapping rows to CSV
        :param **kwargs: additional arguments to pass on to the underlying writer"""
        valid_fmts = ["csv", "json"]

        if fmt not in valid_fmts:
            raise InvalidReportFormat(fmt, valid_fmts)

        fp = Path(fp)
        fp = fp if fp.is_absolute() else self.out_dir.joinpath(fp)

        if self.dry_run:
            log.info(f"Dry run, not writing {fmt} report to {str(fp)!r}")
            return

        if fmt == "json":
            with atomic_open(fp, "w", encoding="utf-8") as f:
                f.write(self.render_json(data))
        elif fn:
            self._dict2csv(fp, fn, data, **kwargs)
        else:
            self._list2csv(fp, data, **kwargs)

        log.info(f"Wrote {fmt} report to {str(fp)!r}")
