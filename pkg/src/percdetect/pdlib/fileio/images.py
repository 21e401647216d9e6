"""Reading and writing pictures.

Supported formats:
    - 'pgm': Netpbm graymap, plain (P2) or raw (P5), maxval up to 65535 (raw samples above 255 are 16-bit
      big-endian). A sample s maps to s/maxval, so white paper reads as 1; pass invert=True when dark pixels are
      the object, a sample then maps to 1 - s/maxval.
    - 'float-csv': one picture row per line, comma separated reals, written with shortest round-trip reprs."""
import logging
import math

from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import ImageParseError
from ..mixins.reports import atomic_open
from ..models.images import BinaryImage, GrayImage

MAX_PGM_MAXVAL = 65535
_WHITESPACE = b" \t\r\n\v\f"

log = logging.getLogger(__name__)


class ImageFormat(str, Enum):
    PGM = "pgm"
    FLOAT_CSV = "float-csv"


def infer_format(path: Path) -> ImageFormat:
    """Guess the format from the file suffix; anything that is not '.csv' is treated as PGM."""
    return ImageFormat.FLOAT_CSV if path.suffix.lower() in (".csv", ".txt") else ImageFormat.PGM


def _pgm_header(data: bytes, path: Path) -> tuple[bytes, int, int, int, int]:
    """Parse magic, width, height and maxval; returns them with the offset just past the header."""
    tokens: list[bytes] = []
    pos = 0

    while len(tokens) < 4:
        while pos < len(data) and data[pos] in _WHITESPACE:
            pos += 1

        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue

        if pos >= len(data):
            raise ImageParseError(path, "truncated header", offset=pos)

        start = pos

        while pos < len(data) and data[pos] not in _WHITESPACE and data[pos : pos + 1] != b"#":
            pos += 1

        tokens.append(data[start:pos])

    magic = tokens[0]

    if magic not in (b"P2", b"P5"):
        raise ImageParseError(path, f"unsupported magic number {magic!r}, expected P2 or P5", offset=0)

    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ImageParseError(path, f"malformed header fields {tokens[1:]!r}", offset=pos) from None

    if width < 1 or height < 1:
        raise ImageParseError(path, f"dimensions must be positive, got {width}x{height}", offset=pos)

    if not 0 < maxval <= MAX_PGM_MAXVAL:
        raise ImageParseError(path, f"maxval {maxval} outside 1..{MAX_PGM_MAXVAL}", offset=pos)

    return (magic, width, height, maxval, pos)


def _plain_samples(data: bytes, pos: int, count: int, maxval: int, path: Path) -> np.ndarray:
    samples = np.empty(count, dtype=np.int64)
    found = 0
    line = data.count(b"\n", 0, pos) + 1

    for lineno, raw in enumerate(data[pos:].split(b"\n"), start=line):
        for token in raw.split(b"#", 1)[0].split():
            if found == count:
                raise ImageParseError(path, f"more than {count} samples (dimension mismatch)", line=lineno)

            try:
                value = int(token)
            except ValueError:
                raise ImageParseError(path, f"non-integer sample {token!r}", line=lineno) from None

            if not 0 <= value <= maxval:
                raise ImageParseError(path, f"sample {value} outside 0..{maxval}", line=lineno)

            samples[found] = value
            found += 1

    if found != count:
        raise ImageParseError(path, f"expected {count} samples, found {found} (dimension mismatch)", line=lineno)

    return samples


def _raw_samples(data: bytes, pos: int, count: int, maxval: int, path: Path) -> np.ndarray:
    # exactly one whitespace byte separates the header from the raster
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise ImageParseError(path, "missing whitespace after maxval", offset=pos)

    start = pos + 1
    width = 1 if maxval < 256 else 2
    expected = start + count * width

    if len(data) < expected:
        raise ImageParseError(path, f"truncated raster, expected {expected} bytes, got {len(data)}", offset=len(data))

    dtype = np.dtype(np.uint8) if width == 1 else np.dtype(">u2")
    samples = np.frombuffer(data, dtype=dtype, count=count, offset=start).astype(np.int64)
    over = np.flatnonzero(samples > maxval)

    if over.size:
        offset = start + int(over[0]) * width
        raise ImageParseError(path, f"sample {samples[over[0]]} exceeds maxval {maxval}", offset=offset)

    return samples


def read_pgm(path: Path, invert: bool = False) -> GrayImage:
    data = path.read_bytes()
    magic, width, height, maxval, pos = _pgm_header(data, path)

    if magic == b"P2":
        samples = _plain_samples(data, pos, width * height, maxval, path)
    else:
        samples = _raw_samples(data, pos, width * height, maxval, path)

    values = samples.reshape(height, width) / maxval
    log.debug(f"Read {magic.decode()} image {str(path)!r}: {width}x{height}, maxval {maxval}")
    return GrayImage(1.0 - values if invert else values)


def read_float_csv(path: Path) -> GrayImage:
    rows: list[list[float]] = []

    with path.open("r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue

            try:
                row = [float(tok) for tok in line.strip().split(",")]
            except ValueError as e:
                raise ImageParseError(path, f"non-numeric value ({e})", line=lineno) from None

            if not all(math.isfinite(v) for v in row):
                raise ImageParseError(path, "non-finite value", line=lineno)

            if rows and len(row) != len(rows[0]):
                raise ImageParseError(
                    path, f"row has {len(row)} values, expected {len(rows[0])} (dimension mismatch)", line=lineno
                )

            rows.append(row)

    if not rows:
        raise ImageParseError(path, "no data rows", line=0)

    return GrayImage(np.array(rows, dtype=np.float64))


def read_image(path: Path | str, fmt: Optional[ImageFormat | str] = None, invert: bool = False) -> GrayImage:
    """Read a picture.
    :param path: file path
    :param fmt: 'pgm' or 'float-csv'; inferred from the suffix when omitted
    :param invert: PGM only, map sample s to 1 - s/maxval"""
    path = Path(path)
    fmt = ImageFormat(fmt) if fmt else infer_format(path)

    if fmt is ImageFormat.PGM:
        return read_pgm(path, invert)

    return read_float_csv(path)


def read_truth(path: Path | str, fmt: Optional[ImageFormat | str] = None, invert: bool = False) -> BinaryImage:
    """Read a ground truth picture; values >= 0.5 are black."""
    image = read_image(path, fmt, invert)
    return BinaryImage((image.values >= 0.5).astype(np.uint8))


def write_image(
    image: GrayImage | BinaryImage,
    path: Path | str,
    fmt: Optional[ImageFormat | str] = None,
    maxval: int = 255,
    plain: bool = False,
) -> None:
    """Write a picture atomically.
    :param image: picture to write
    :param path: destination
    :param fmt: 'pgm' or 'float-csv'; inferred from the suffix when omitted
    :param maxval: PGM sample range; values are scaled by maxval, rounded and clipped to 0..maxval
    :param plain: write P2 instead of P5"""
    path = Path(path)
    fmt = ImageFormat(fmt) if fmt else infer_format(path)
    values = image.as_gray().values if isinstance(image, BinaryImage) else image.values

    if fmt is ImageFormat.FLOAT_CSV:
        with atomic_open(path, "w", encoding="utf-8") as f:
            for row in values.tolist():
                f.write(",".join(repr(v) for v in row) + "\n")
        return

    if not 0 < maxval <= MAX_PGM_MAXVAL:
        raise ValueError(f"maxval {maxval} outside 1..{MAX_PGM_MAXVAL}")

    height, width = values.shape
    samples = np.clip(np.rint(values * maxval), 0, maxval).astype(np.int64)
    header = f"{'P2' if plain else 'P5'}\n{width} {height}\n{maxval}\n".encode("ascii")

    with atomic_open(path, "wb") as f:
        f.write(header)

        if plain:
            f.write("\n".join(" ".join(str(s) for s in row) for row in samples.tolist()).encode("ascii") + b"\n")
        else:
            f.write(samples.astype(np.uint8 if maxval < 256 else ">u2").tobytes())
