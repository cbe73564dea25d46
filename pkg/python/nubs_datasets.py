#!/usr/bin/env python3
"""
Data ingestion, the embedded fatigue-life sample and the JSON run report
"""

import json
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from normal_kernel import ArrayLike, FloatArray
from nubs_errors import (
    DatasetError,
    DatasetParseError,
    DatasetReadError,
    NonFiniteValueError,
    NonPositiveValueError,
)

# Cycles to failure (thousands) of 101 aluminum 6061-T6 coupons, in table order
TABLE1_FATIGUE_LIVES: Tuple[float, ...] = (
    70, 90, 96, 97, 99, 100, 103, 104, 104, 105,
    107, 108, 108, 108, 109, 109, 112, 112, 113, 114,
    114, 114, 116, 119, 120, 120, 120, 121, 121, 123,
    124, 124, 124, 124, 124, 128, 128, 129, 129, 130,
    130, 130, 131, 131, 131, 131, 131, 132, 132, 132,
    133, 134, 134, 134, 134, 134, 136, 136, 137, 138,
    138, 138, 139, 139, 141, 141, 142, 142, 142, 142,
    142, 142, 144, 144, 145, 146, 148, 148, 149, 151,
    151, 152, 155, 156, 157, 157, 157, 157, 158, 159,
    162, 163, 163, 164, 166, 166, 168, 170, 174, 196,
    212,
)

_TOKEN = re.compile(r"[^\s,]+")
_DECIMAL = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")


class DatasetSource(str, Enum):
    FILE = "file"
    EMBEDDED = "embedded"


@dataclass(frozen=True, eq=False)
class Dataset:
    """A named, nonempty sample of strictly positive values."""

    name: str
    values: FloatArray
    source: DatasetSource

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size == 0:
            raise DatasetError(f"dataset {self.name!r} is empty")
        _check_positive(values.tolist())
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)


def _read_text(path: Union[str, Path]) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise DatasetReadError(f"cannot read {path}: {e}") from e


def _parse_rows(text: str, path: Optional[str] = None) -> List[Tuple[int, List[float]]]:
    """(line number, values) for every line that is neither blank nor a comment."""
    rows = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if line.lstrip().startswith("#"):
            continue
        values = []
        for match in _TOKEN.finditer(line):
            token = match.group(0)
            if not _DECIMAL.fullmatch(token):
                raise DatasetParseError(token, line_no, match.start() + 1, path)
            values.append(float(token))
        if values:
            rows.append((line_no, values))
    return rows


def _check_positive(values: List[float]) -> None:
    for index, value in enumerate(values, start=1):
        if not value > 0.0:
            raise NonPositiveValueError(value, index)
        if not math.isfinite(value):
            raise NonFiniteValueError(value, index)


def parse_values(text: str, path: Optional[str] = None) -> List[float]:
    values = [v for _, row in _parse_rows(text, path) for v in row]
    _check_positive(values)
    return values


def load_dataset(path: Union[str, Path]) -> Dataset:
    """Whitespace- or comma-separated positive decimals; '#' starts a comment line.

    Raises DatasetReadError, DatasetParseError (line and column) or
    NonPositiveValueError or NonFiniteValueError (1-based index).
    """
    values = parse_values(_read_text(path), str(path))
    if not values:
        raise DatasetError(f"{path}: no values found")
    return Dataset(Path(path).stem, np.array(values), DatasetSource.FILE)


def load_paired_dataset(path: Union[str, Path]) -> FloatArray:
    """n x 2 array, one pair of positive values per data line."""
    rows = _parse_rows(_read_text(path), str(path))
    for line_no, row in rows:
        if len(row) != 2:
            raise DatasetError(f"{path}:{line_no}: expected two values, found {len(row)}")
    if not rows:
        raise DatasetError(f"{path}: no value pairs found")
    flat = [v for _, row in rows for v in row]
    _check_positive(flat)
    return np.array(flat).reshape(-1, 2)


def embedded_table1() -> Dataset:
    return Dataset("table1", np.array(TABLE1_FATIGUE_LIVES, dtype=float), DatasetSource.EMBEDDED)


def format_values(values: ArrayLike) -> str:
    """One value (or one row) per line with 17 significant digits."""
    array = np.asarray(values, dtype=float)
    if array.ndim == 1:
        lines = ["%.17g" % v for v in array]
    else:
        lines = [" ".join("%.17g" % v for v in row) for row in array]
    return "\n".join(lines) + "\n"


REPORT_KEYS = (
    "command",
    "tool_version",
    "seed",
    "params_in",
    "params_out",
    "fit",
    "gof",
    "result",
    "timing_ms",
)


@dataclass
class RunReport:
    """Machine-readable record of one CLI run, serialized with a fixed key order."""

    command: str
    tool_version: str
    seed: Optional[int] = None
    params_in: Optional[Dict[str, Any]] = None
    params_out: Optional[Dict[str, Any]] = None
    fit: Optional[Dict[str, Any]] = None
    gof: Optional[Dict[str, Any]] = None
    result: Any = None
    timing_ms: Optional[int] = field(default=None, compare=False)

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        payload = {key: getattr(self, key) for key in REPORT_KEYS}
        if not include_timing:
            del payload["timing_ms"]
        return payload

    def to_json(self, include_timing: bool = True) -> str:
        """Canonical text; include_timing=False gives the run-to-run stable view."""
        return json.dumps(self.to_dict(include_timing), indent=4)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        payload = json.loads(text)
        unknown = set(payload) - set(REPORT_KEYS)
        if unknown:
            raise DatasetError(f"unknown report fields: {sorted(unknown)}")
        if "command" not in payload or "tool_version" not in payload:
            raise DatasetError("report needs 'command' and 'tool_version'")
        return cls(**payload)
