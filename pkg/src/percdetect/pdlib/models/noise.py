"""Pixel noise laws: the standardized Gaussian scaled by sigma, or an arbitrary known law given as a table.

For the table kind the table describes the law of the whole noise term, so sigma is not applied to it; it is only
kept so descriptors stay uniform across kinds."""
import hashlib
import json
import math

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping, Optional

import numpy as np

from scipy.special import ndtr, ndtri

from ..errors import InvalidNoiseTable, InvalidProbability

ArrayOrFloat = float | np.ndarray
TableType = tuple[tuple[float, float], ...]


class NoiseKind(str, Enum):
    GAUSSIAN = "standard-gaussian"
    TABLE = "empirical-table"


def _scalar(value: np.ndarray | np.floating, like: Any) -> ArrayOrFloat:
    """Return a python float when the caller passed a scalar, otherwise the array untouched."""
    return float(value) if np.ndim(like) == 0 else value


@dataclass(frozen=True)
class NoiseModel:
    """Noise law F and level sigma of the observation model Y = Im + sigma * eps."""

    kind: NoiseKind = NoiseKind.GAUSSIAN
    sigma: float = 1.0
    table: Optional[TableType] = None
    interpolate: bool = False
    _values: np.ndarray = field(init=False, repr=False, compare=False)
    _cums: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidProbability("sigma", self.sigma, "(0, inf)")

        if self.kind is NoiseKind.GAUSSIAN:
            object.__setattr__(self, "_values", np.empty(0))
            object.__setattr__(self, "_cums", np.empty(0))
            return

        if not self.table:
            raise InvalidNoiseTable("an empirical table needs at least one (value, cumulative) row")

        values = np.array([row[0] for row in self.table], dtype=np.float64)
        cums = np.array([row[1] for row in self.table], dtype=np.float64)

        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(cums))):
            raise InvalidNoiseTable("values and cumulative probabilities must be finite")

        if np.any(np.diff(values) <= 0):
            raise InvalidNoiseTable("values must be strictly increasing")

        if np.any(np.diff(cums) < 0):
            raise InvalidNoiseTable("cumulative probabilities must be nondecreasing")

        if cums[0] < 0:
            raise InvalidNoiseTable(f"cumulative probabilities must start at or above 0, got {cums[0]}")

        if abs(cums[-1] - 1.0) > 1e-9:
            raise InvalidNoiseTable(f"cumulative probabilities must end at 1, got {cums[-1]}")

        cums[-1] = 1.0
        values.setflags(write=False)
        cums.setflags(write=False)
        object.__setattr__(self, "_values", values)
        object.__setattr__(self, "_cums", cums)

    @classmethod
    def gaussian(cls, sigma: float) -> "NoiseModel":
        """Gaussian noise of level sigma.
        :param sigma: noise level, strictly positive"""
        return cls(NoiseKind.GAUSSIAN, float(sigma))

    @classmethod
    def from_table(cls, rows: Iterable[tuple[float, float]], interpolate: bool = False) -> "NoiseModel":
        """Empirical noise law from (value, cumulative probability) rows.
        :param rows: rows sorted by value
        :param interpolate: use linear interpolation between rows instead of right-continuous steps"""
        table = tuple((float(v), float(c)) for v, c in rows)
        return cls(NoiseKind.TABLE, 1.0, table, interpolate)

    @classmethod
    def point_mass(cls, value: float = 0.0) -> "NoiseModel":
        """Degenerate noise, all mass at 'value'; the zero-noise limit when value is 0."""
        return cls.from_table([(value, 1.0)])

    @classmethod
    def from_descriptor(cls, d: Mapping[str, Any]) -> "NoiseModel":
        kind = NoiseKind(d["kind"])

        if kind is NoiseKind.GAUSSIAN:
            return cls.gaussian(d["sigma"])

        return cls.from_table(d["table"], interpolate=d.get("interpolate", False))

    def descriptor(self) -> dict[str, Any]:
        """JSON-ready description of the model."""
        result: dict[str, Any] = {"kind": self.kind.value, "sigma": self.sigma}

        if self.kind is NoiseKind.TABLE:
            result["table"] = [[v, c] for v, c in zip(self._values.tolist(), self._cums.tolist())]
            result["interpolate"] = self.interpolate

        return result

    def digest(self) -> str:
        """Stable hash of the descriptor, used to key calibration caches."""
        payload = json.dumps(self.descriptor(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]

    def standardize(self, y: ArrayOrFloat) -> ArrayOrFloat:
        """Map an observation offset to the argument of F: y/sigma for Gaussian, y for tables."""
        return y / self.sigma if self.kind is NoiseKind.GAUSSIAN else y

    def unstandardize(self, z: ArrayOrFloat) -> ArrayOrFloat:
        """Inverse of 'standardize'."""
        return z * self.sigma if self.kind is NoiseKind.GAUSSIAN else z

    def cdf(self, x: ArrayOrFloat) -> ArrayOrFloat:
        """Evaluate F(x).
        :param x: finite scalar or array"""
        xs = np.asarray(x, dtype=np.float64)

        if self.kind is NoiseKind.GAUSSIAN:
            return _scalar(ndtr(xs), x)

        if self.interpolate:
            return _scalar(np.interp(xs, self._values, self._cums, left=0.0, right=1.0), x)

        idx = np.searchsorted(self._values, xs, side="right") - 1
        result = np.where(idx >= 0, self._cums[np.clip(idx, 0, None)], 0.0)
        return _scalar(result, x)

    def sf(self, x: ArrayOrFloat) -> ArrayOrFloat:
        """Survival function 1 - F(x), computed from the upper tail for the Gaussian kind."""
        if self.kind is NoiseKind.GAUSSIAN:
            return _scalar(ndtr(-np.asarray(x, dtype=np.float64)), x)

        return 1.0 - self.cdf(x)

    def _table_inverse(self, p: np.ndarray, side: str) -> np.ndarray:
        # side="left": first row with cum >= p; side="right": first row with cum > p
        k = np.clip(np.searchsorted(self._cums, p, side=side), 0, len(self._cums) - 1)

        if not self.interpolate:
            return self._values[k]

        prev = np.clip(k - 1, 0, None)
        c0, c1 = self._cums[prev], self._cums[k]
        v0, v1 = self._values[prev], self._values[k]
        span = np.where(c1 > c0, c1 - c0, 1.0)
        inner = v0 + (p - c0) / span * (v1 - v0)
        return np.where(k == 0, self._values[0], inner)

    def _check_p(self, p: ArrayOrFloat) -> np.ndarray:
        ps = np.asarray(p, dtype=np.float64)

        if not np.all((ps > 0) & (ps < 1)):
            bad = ps[~((ps > 0) & (ps < 1))] if ps.ndim else ps
            raise InvalidProbability("p", float(np.ravel(bad)[0]))

        return ps

    def quantile(self, p: ArrayOrFloat) -> ArrayOrFloat:
        """Smallest x with F(x) >= p.
        :param p: probability strictly inside (0, 1)"""
        ps = self._check_p(p)

        if self.kind is NoiseKind.GAUSSIAN:
            return _scalar(ndtri(ps), p)

        return _scalar(self._table_inverse(ps, "left"), p)

    def upper_quantile(self, p: ArrayOrFloat) -> ArrayOrFloat:
        """Largest x with F(x) <= p; equals 'quantile' for continuous strictly increasing F.
        :param p: probability strictly inside (0, 1)"""
        ps = self._check_p(p)

        if self.kind is NoiseKind.GAUSSIAN:
            return _scalar(ndtri(ps), p)

        return _scalar(self._table_inverse(ps, "right"), p)

    def tail_quantile(self, a: float) -> float:
        """Smallest x with 1 - F(x) <= a, inverted from the upper tail so tiny a stay finite.
        :param a: tail probability strictly inside (0, 1)"""
        if not 0 < a < 1:
            raise InvalidProbability("a", a)

        if self.kind is NoiseKind.GAUSSIAN:
            return float(-ndtri(a))

        tail = 1.0 - self._cums
        k = int(np.argmax(tail <= a))

        if not self.interpolate or k == 0:
            return float(self._values[k])

        t0, t1 = tail[k - 1], tail[k]
        v0, v1 = self._values[k - 1], self._values[k]
        return float(v0 + (t0 - a) / (t0 - t1) * (v1 - v0))

    def draw(self, rng: np.random.Generator, shape: int | tuple[int, ...]) -> np.ndarray:
        """Draw i.i.d. noise terms (sigma * eps for Gaussian) from an existing generator."""
        if self.kind is NoiseKind.GAUSSIAN:
            return self.sigma * rng.standard_normal(shape)

        return self._table_inverse(rng.random(shape), "left")

    def sample(self, seed: int, count: int) -> np.ndarray:
        """Deterministic sample of 'count' noise terms.
        :param seed: generator seed
        :param count: number of draws, at least 1"""
        if count < 1:
            raise ValueError(f"count must be at least 1, got {count}")

        return self.draw(np.random.default_rng(seed), count)

    def white_exceed_prob(self, y: ArrayOrFloat) -> ArrayOrFloat:
        """P0(Y >= y) for a white pixel, 1 - F(y/sigma)."""
        return self.sf(self.standardize(y))

    def black_below_prob(self, y: ArrayOrFloat) -> ArrayOrFloat:
        """P1(Y <= y) for a black pixel, F((y - 1)/sigma)."""
        return self.cdf(self.standardize(y - 1.0))
