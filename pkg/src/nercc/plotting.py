"""Render experiment CSVs as SVG line charts.

Output is byte-deterministic for identical input: matplotlib's hash salt is
pinned and the SVG date metadata is suppressed, so reruns of the same sweep
produce identical figures.
"""

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .errors import EmptyInput, UnknownColumn  # noqa: E402

__all__ = ["render_plot"]

_HASH_SALT = "nercc-figures"


def _read_columns(csv_path, wanted):
    with open(csv_path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in wanted:
            if column is not None and column not in header:
                raise UnknownColumn(f"{csv_path}: no column {column!r} in {header}")
        rows = list(reader)
    if not rows:
        raise EmptyInput(f"{csv_path}: no data rows")
    return rows


def render_plot(csv_path, x_column, y_column, group_column, out_path, title=None) -> Path:
    """Plot ``y_column`` against ``x_column``, one line per group value.

    Rows whose y value is missing or non-finite are skipped.  Returns the
    output path.
    """
    rows = _read_columns(csv_path, (x_column, y_column, group_column))

    series = {}
    for row in rows:
        try:
            x = float(row[x_column])
            y = float(row[y_column])
        except ValueError:
            continue
        if not (math.isfinite(x) and math.isfinite(y)):
            continue
        key = row[group_column] if group_column else ""
        series.setdefault(key, []).append((x, y))
    if not series:
        raise EmptyInput(f"{csv_path}: no finite ({x_column}, {y_column}) pairs")

    plt.rcParams["svg.hashsalt"] = _HASH_SALT
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for key in sorted(series):
        points = sorted(series[key])
        ax.plot(
            [p[0] for p in points],
            [p[1] for p in points],
            marker="o",
            markersize=3.5,
            label=key if group_column else None,
        )
    ax.set_xlabel(x_column)
    ax.set_ylabel(y_column)
    if title:
        ax.set_title(title)
    if group_column:
        ax.legend(title=group_column)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return out_path
