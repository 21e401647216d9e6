"""Exceptions raised by the percdetect library."""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional


@dataclass
class InvalidProbability(ValueError):
    name: str
    value: float
    bounds: str = "(0, 1)"

    def __str__(self) -> str:
        return f"{self.name} value {self.value!r} invalid, must lie in {self.bounds}"


@dataclass
class InvalidNoiseTable(ValueError):
    reason: str
    source: Optional[Path] = None

    def __str__(self) -> str:
        where = f" in {str(self.source)!r}" if self.source else ""
        return f"Invalid empirical noise table{where}: {self.reason}"


@dataclass
class InfeasibleThreshold(Exception):
    sigma: Optional[float]
    p_c: float
    detail: str = ""

    def __str__(self) -> str:
        at = f" at sigma={self.sigma}" if self.sigma is not None else ""
        msg = f"noise not 1-small: no threshold satisfies p_out < {self.p_c} < p_im{at}"
        return f"{msg} ({self.detail})" if self.detail else msg


@dataclass
class InconsistentDetectionConfig(ValueError):
    reason: str

    def __str__(self) -> str:
        return f"Inconsistent detection config: {self.reason}"


@dataclass
class ImageParseError(ValueError):
    path: Path
    reason: str
    line: Optional[int] = None
    offset: Optional[int] = None

    def __str__(self) -> str:
        position = ""

        if self.line is not None:
            position = f" (line {self.line})"
        elif self.offset is not None:
            position = f" (byte offset {self.offset})"

        return f"Cannot parse image {str(self.path)!r}{position}: {self.reason}"


@dataclass
class InvalidReportFormat(ValueError):
    fmt: str
    valid_fmts: list[str] = field(default_factory=list)

    def __str__(self) -> str:
        fmts = [f"'{ft}'" for ft in self.valid_fmts]
        suffix = f"{', '.join(fmts[0:-1])} or {fmts[-1]}" if len(fmts) > 1 else ", ".join(fmts)
        return f"Report format value {self.fmt!r} invalid, must be one of: {suffix}"
