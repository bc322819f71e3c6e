"""CSV/JSON emission, measured-data ingestion and simulated-vs-measured comparison.

CSV files carry a ``# key: value`` metadata header followed by a column
header row. Numbers use 17 significant digits, lines end in LF, and no
timestamps are written, so equal inputs give byte-identical files.
"""
import csv
import io as _io
import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ComparisonError, IngestionError, ValidationError


def format_number(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (complex, np.complexfloating)):
        return f"{format_number(value.real)}{'+' if value.imag >= 0 or math.isnan(value.imag) else '-'}" \
               f"{format_number(abs(value.imag))}j"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def render_csv(columns, metadata=None):
    """CSV text for ``columns`` (ordered name -> 1-d sequence)."""
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    if len({a.shape for a in arrays}) > 1:
        raise ValidationError("CSV columns have different lengths")
    out = _io.StringIO()
    for key, value in (metadata or {}).items():
        out.write(f"# {key}: {format_number(value)}\n")
    out.write(",".join(names) + "\n")
    for row in zip(*arrays):
        out.write(",".join(format_number(v) for v in row) + "\n")
    return out.getvalue()


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, np.generic):
        return value.item()
    return value


def render_json(columns, metadata=None):
    doc = {"metadata": _jsonable(metadata or {}), "columns": _jsonable({k: list(v) for k, v in columns.items()})}
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def write_table(columns, metadata=None, path=None, fmt="csv", stream=None):
    """Render and write to ``path`` (LF endings), or to ``stream`` when no path."""
    text = render_csv(columns, metadata) if fmt == "csv" else render_json(columns, metadata)
    if path is None:
        stream.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text


@dataclass(frozen=True)
class MeasuredSeries:
    x: np.ndarray
    y: np.ndarray
    y_err: Optional[np.ndarray] = None

    def __post_init__(self):
        n = len(self.x)
        if len(self.y) != n or (self.y_err is not None and len(self.y_err) != n):
            raise ValidationError("measured series columns differ in length")
        for name in ("x", "y", "y_err"):
            v = getattr(self, name)
            if v is not None and not np.all(np.isfinite(v)):
                raise ValidationError(f"measured {name} contains non-finite values")

    def __len__(self):
        return len(self.x)


def read_measured(path):
    """Read a ``x,y[,y_err]`` CSV; '#' lines and blank lines are skipped.

    Errors name the 1-based data row (the header is not counted) and the
    file line.
    """
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc.strerror}") from None
    header, rows = None, []
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        cells = [c.strip() for c in next(csv.reader([stripped]))]
        if header is None:
            header = [c.lower() for c in cells]
            if header not in (["x", "y"], ["x", "y", "y_err"]):
                raise IngestionError(f"header must be 'x,y' or 'x,y,y_err', got {stripped!r} (line {line_no})")
            continue
        row_no = len(rows) + 1
        if len(cells) != len(header):
            raise IngestionError(f"expected {len(header)} cells, found {len(cells)} (line {line_no})", row_no)
        try:
            values = [float(c) for c in cells]
        except ValueError:
            bad = next(c for c in cells if not _is_float(c))
            raise IngestionError(f"non-numeric cell {bad!r} (line {line_no})", row_no) from None
        if not all(math.isfinite(v) for v in values):
            raise IngestionError(f"non-finite value (line {line_no})", row_no)
        rows.append(values)
    if header is None:
        raise IngestionError("no header row found")
    if not rows:
        raise IngestionError("no data rows")
    data = np.array(rows)
    return MeasuredSeries(data[:, 0], data[:, 1], data[:, 2] if data.shape[1] == 3 else None)


def _is_float(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def read_table(path, x_col, y_col):
    """Two columns of a CSV written by :func:`write_table` (metadata skipped)."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln.strip() and not ln.startswith("#")]
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc.strerror}") from None
    if not lines:
        raise IngestionError(f"{path}: empty table")
    header = [c.strip() for c in lines[0].split(",")]
    for col in (x_col, y_col):
        if col not in header:
            raise IngestionError(f"{path}: no column {col!r} (have {', '.join(header)})")
    ix, iy = header.index(x_col), header.index(y_col)
    xs, ys = [], []
    for row_no, line in enumerate(lines[1:], start=1):
        cells = line.split(",")
        try:
            xs.append(float(cells[ix]))
            ys.append(float(cells[iy]))
        except (ValueError, IndexError):
            raise IngestionError(f"{path}: malformed row", row_no) from None
    return np.array(xs), np.array(ys)


@dataclass(frozen=True)
class ComparisonReport:
    x: np.ndarray
    measured: np.ndarray
    simulated: np.ndarray
    residual: np.ndarray
    rms: float
    max_abs: float
    dropped: int  # measured points outside the simulated range

    def columns(self):
        return {"x": self.x, "measured": self.measured, "simulated": self.simulated, "residual": self.residual}


def compare(measured, sim_x, sim_y):
    """Residuals of ``measured`` against the simulated curve interpolated onto measured x.

    Measured points outside the simulated x-range are dropped and counted;
    if none remain the ranges are disjoint and ComparisonError is raised.
    """
    sim_x, sim_y = np.asarray(sim_x, dtype=float), np.asarray(sim_y, dtype=float)
    if sim_x.ndim != 1 or sim_x.shape != sim_y.shape or sim_x.size < 2:
        raise ValidationError("simulated curve needs matching 1-d x and y with >= 2 points")
    order = np.argsort(sim_x, kind="stable")
    sim_x, sim_y = sim_x[order], sim_y[order]
    inside = (measured.x >= sim_x[0]) & (measured.x <= sim_x[-1])
    if not inside.any():
        raise ComparisonError(
            f"measured x-range [{measured.x.min():g}, {measured.x.max():g}] does not overlap "
            f"simulated range [{sim_x[0]:g}, {sim_x[-1]:g}]"
        )
    x, y = measured.x[inside], measured.y[inside]
    sim = np.interp(x, sim_x, sim_y)
    residual = y - sim
    return ComparisonReport(x, y, sim, residual, float(np.sqrt(np.mean(residual**2))),
                            float(np.max(np.abs(residual))), int((~inside).sum()))
