from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np

MAX_SEED = 2**64 - 1

T = TypeVar("T")


def parse_seed(s: str | int) -> int:
    """Parse a 64-bit unsigned seed given in decimal or '0x' hexadecimal.
    :param s: seed string or integer"""
    if isinstance(s, int):
        value = s
    else:
        text = s.strip().lower()
        value = int(text, 16) if text.startswith("0x") else int(text, 10)

    if not 0 <= value <= MAX_SEED:
        raise ValueError(f"seed {s!r} outside the unsigned 64-bit range")

    return value


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for replicate 'index' of a run seeded with 'seed'; independent of scheduling order."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def map_replicates(fn: Callable[[int], T], indices: Iterable[int], workers: int = 1) -> list[T]:
    """Apply 'fn' to every replicate index, results ordered by index regardless of completion order.
    :param fn: picklable callable of one replicate index
    :param indices: replicate indices
    :param workers: process count; 1 runs inline"""
    indices = list(indices)

    if workers <= 1 or len(indices) < 2:
        return [fn(i) for i in indices]

    chunksize = max(1, len(indices) // (workers * 4))

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, indices, chunksize=chunksize))


class UtilsMixin:
    """A mixin for various utilities."""

    def bool2int(self, b: bool) -> int:
        """Convert a boolean to 1 (True) or 0 (False).
        :param b: boolean value"""
        return 1 if b else 0

    def replicate_rng(self, seed: int, index: int) -> np.random.Generator:
        """Generator for one replicate, see 'replicate_rng'."""
        return replicate_rng(seed, index)
