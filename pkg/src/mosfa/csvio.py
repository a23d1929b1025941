"""CSV interchange with ``#`` header blocks.

Every file starts with comment lines recording the library version,
physical constants and the resolved run configuration, followed by one
column-name line and the data rows. Floats are printed with ``%.17g`` by
default, which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from mosfa.units import CONSTANTS


def _fmt(value, precision: int) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return f"{value:.{precision}g}"


def header_lines(command: str, version: str, config: Optional[Dict] = None,
                 extra: Optional[Dict] = None) -> List[str]:
    lines = [f"# mosfa {version}", f"# command = {command}"]
    lines += [f"# constant.{k} = {v!r}" for k, v in CONSTANTS.items()]
    for k, v in (config or {}).items():
        lines.append(f"# config.{k} = {v!r}")
    for k, v in (extra or {}).items():
        lines.append(f"# {k} = {v}")
    return lines


def format_table(columns: Sequence[str], rows: Sequence[Sequence], header: Sequence[str] = (),
                 precision: int = 17) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(line + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} values for {len(columns)} columns")
        buf.write(",".join(_fmt(v, precision) for v in row) + "\n")
    return buf.getvalue()


@dataclass
class Table:
    columns: List[str]
    data: Dict[str, np.ndarray]
    meta: Dict[str, str]

    def __getitem__(self, name):
        if name not in self.data:
            raise KeyError(f"column '{name}' not found; have {self.columns}")
        return self.data[name]


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def parse_table(text: str) -> Table:
    """Read a ``#``-headed CSV. ``# key = value`` and ``# key=value`` go to ``meta``.

    A first non-comment line that is not numeric is taken as column names;
    otherwise columns are named ``c0, c1, ...``.
    """
    meta, rows, columns = {}, [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip()
            continue
        cells = [c.strip() for c in line.split(",")]
        if columns is None and not rows and not all(_is_number(c) for c in cells):
            columns = cells
            continue
        if not all(_is_number(c) for c in cells):
            raise ValueError(f"line {lineno}: non-numeric value in {raw!r}")
        rows.append([float(c) for c in cells])
    width = len(columns) if columns else (len(rows[0]) if rows else 0)
    if any(len(r) != width for r in rows):
        raise ValueError("ragged CSV: rows have differing numbers of columns")
    columns = columns or [f"c{i}" for i in range(width)]
    arr = np.array(rows, dtype=float).reshape(len(rows), width)
    return Table(columns, {c: arr[:, i] for i, c in enumerate(columns)}, meta)


def read_table(path) -> Table:
    with open(path, encoding="utf-8") as fh:
        return parse_table(fh.read())


@dataclass
class ExternalCurve:
    """Digitized comparison data: (intensity W/cm^2, value) with a scale factor."""

    label: str
    intensities: np.ndarray
    values: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        self.intensities = np.asarray(self.intensities, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.intensities.size == 0:
            raise ValueError(f"external curve '{self.label}' is empty")
        if np.any(np.diff(self.intensities) <= 0):
            raise ValueError(f"external curve '{self.label}': intensities must be ascending")
        if not (np.all(np.isfinite(self.values)) and np.all(np.isfinite(self.intensities))):
            raise ValueError(f"external curve '{self.label}': values must be finite")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"external curve '{self.label}': scale must be positive")

    @property
    def scaled(self) -> np.ndarray:
        return self.scale * self.values

    def at(self, intensity):
        """Scaled value interpolated linearly in log I; NaN outside the data range."""
        x = np.log(np.asarray(intensity, dtype=float))
        xs = np.log(self.intensities)
        out = np.interp(x, xs, self.scaled, left=np.nan, right=np.nan)
        return float(out) if out.ndim == 0 else out


def read_external(path, label: Optional[str] = None) -> ExternalCurve:
    """Two-column CSV with optional ``# scale=`` and ``# label=`` directives."""
    tab = read_table(path)
    if len(tab.columns) != 2:
        raise ValueError(f"{path}: external curves need exactly 2 columns, got {len(tab.columns)}")
    scale = float(tab.meta.get("scale", 1.0))
    name = label or tab.meta.get("label") or str(path).rsplit("/", 1)[-1].rsplit(".", 1)[0]
    return ExternalCurve(name, tab.data[tab.columns[0]], tab.data[tab.columns[1]], scale)
