"""Empirical noise tables: two-column CSV of (value, cumulative_probability), header optional."""
import csv

from pathlib import Path

from ..errors import InvalidNoiseTable
from ..mixins.reports import atomic_open
from ..models.noise import NoiseModel


def _is_number(field: str) -> bool:
    try:
        float(field)
    except ValueError:
        return False

    return True


def read_noise_table(path: Path | str, interpolate: bool = False) -> NoiseModel:
    """Load an empirical noise law.
    :param path: CSV file, UTF-8 with or without a byte order mark, '.' decimal separator
    :param interpolate: interpolate linearly between rows instead of right-continuous steps"""
    path = Path(path)
    rows: list[tuple[float, float]] = []

    with path.open("r", newline="", encoding="utf-8-sig") as f:
        for lineno, record in enumerate(csv.reader(f), start=1):
            if not record or all(not field.strip() for field in record):
                continue

            if len(record) != 2:
                raise InvalidNoiseTable(f"line {lineno}: expected 2 columns, got {len(record)}", path)

            # a header names both columns; a half-numeric first line is a broken data row
            if lineno == 1 and not any(_is_number(field) for field in record):
                continue

            try:
                rows.append((float(record[0]), float(record[1])))
            except ValueError:
                raise InvalidNoiseTable(f"line {lineno}: non-numeric row {record!r}", path) from None

    try:
        return NoiseModel.from_table(rows, interpolate=interpolate)
    except InvalidNoiseTable as e:
        raise InvalidNoiseTable(e.reason, path) from None


def write_noise_table(model: NoiseModel, path: Path | str) -> None:
    """Write the table of an empirical model with a 'value,cumulative_probability' header."""
    table = model.descriptor().get("table")

    if table is None:
        raise ValueError("only empirical-table models have a table to write")

    with atomic_open(Path(path), "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["value", "cumulative_probability"])
        w.writerows(table)
