"""Lattice images: real observations and two-colour pictures, both stored row-major as (height, width) arrays."""
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable

import numpy as np


class Color(IntEnum):
    WHITE = 0
    BLACK = 1


WHITE, BLACK = Color.WHITE, Color.BLACK


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Observed picture Y, one finite real per pixel."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64, order="C")

        if values.ndim != 2 or values.size == 0:
            raise ValueError(f"a gray image needs a nonempty 2-D array, got shape {values.shape}")

        if not np.all(np.isfinite(values)):
            raise ValueError("gray image values must all be finite")

        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def pixel_count(self) -> int:
        return self.values.size

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GrayImage) and np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """Black (1) and white (0) picture: a ground truth or a thresholded picture."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits)

        if bits.ndim != 2 or bits.size == 0:
            raise ValueError(f"a binary image needs a nonempty 2-D array, got shape {bits.shape}")

        if not np.all((bits == WHITE) | (bits == BLACK)):
            raise ValueError("binary image values must be 0 or 1")

        bits = np.array(bits, dtype=np.uint8, order="C")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def blank(cls, width: int, height: int, color: int = WHITE) -> "BinaryImage":
        return cls(np.full((height, width), color, dtype=np.uint8))

    @classmethod
    def from_rows(cls, rows: Iterable[str]) -> "BinaryImage":
        """Build from strings of '0'/'1' characters, one per row; handy for hand-written patterns."""
        return cls(np.array([[int(ch) for ch in row] for row in rows], dtype=np.uint8))

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def pixel_count(self) -> int:
        return self.bits.size

    @property
    def black_count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def as_gray(self) -> GrayImage:
        return GrayImage(self.bits.astype(np.float64))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BinaryImage) and np.array_equal(self.bits, other.bits)
