"""Render scheduler-comparison figures from an aggregate results CSV.

Input is the simulator's aggregate schema: scheduler, axis_value,
mean_completed, std_completed, mean_throughput_gbps, std_throughput_gbps.
Each figure draws one line per scheduler with markers and a mean +/- std
band. Styling is fixed by SCHEDULER_STYLE and rendering is deterministic:
the same CSV and spec produce byte-identical PNG and SVG files.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "fdplots"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = ["SchemaError", "FigureSpec", "SCHEDULER_STYLE", "load_aggregate", "render", "render_pair"]

REQUIRED_COLUMNS = [
    "scheduler",
    "axis_value",
    "mean_completed",
    "std_completed",
    "mean_throughput_gbps",
    "std_throughput_gbps",
]

METRICS = {
    "completed": ("mean_completed", "std_completed", "Mean completed flows"),
    "throughput": (
        "mean_throughput_gbps",
        "std_throughput_gbps",
        "Mean system throughput [Gbps]",
    ),
}

# Fixed color/marker per scheduler so figures are comparable across runs.
SCHEDULER_STYLE = {
    "proposed-fd": ("#1f77b4", "o"),
    "proposed-hd": ("#ff7f0e", "s"),
    "mqis": ("#2ca02c", "^"),
    "tdma": ("#d62728", "v"),
    "fdp": ("#9467bd", "D"),
}
FALLBACK_STYLE = ("#7f7f7f", "x")


class SchemaError(ValueError):
    """The CSV does not match the aggregate schema."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str
    axis_label: str
    metric: str  # "completed" | "throughput"
    series: tuple[str, ...]
    output_image: str


def load_aggregate(path) -> list[dict]:
    """Parse the aggregate CSV; raise SchemaError on missing columns or an
    empty table."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in REQUIRED_COLUMNS:
            if column not in header:
                raise SchemaError(f"missing column {column!r} in {path}")
        rows = [
            {
                "scheduler": r["scheduler"],
                "axis_value": float(r["axis_value"]),
                "mean_completed": float(r["mean_completed"]),
                "std_completed": float(r["std_completed"]),
                "mean_throughput_gbps": float(r["mean_throughput_gbps"]),
                "std_throughput_gbps": float(r["std_throughput_gbps"]),
            }
            for r in reader
        ]
    if not rows:
        raise SchemaError(f"no data rows in {path}")
    return rows


def _series_points(rows, scheduler, metric):
    mean_col, std_col, _ = METRICS[metric]
    points = sorted(
        (r["axis_value"], r[mean_col], r[std_col])
        for r in rows
        if r["scheduler"] == scheduler
    )
    xs = [p[0] for p in points]
    means = [p[1] for p in points]
    stds = [p[2] for p in points]
    return xs, means, stds


def _draw_panel(ax, rows, series, metric, axis_label):
    if metric not in METRICS:
        raise SchemaError(f"unknown metric {metric!r}")
    for name in series:
        xs, means, stds = _series_points(rows, name, metric)
        if not xs:
            raise SchemaError(f"no rows for series {name!r}")
        color, marker = SCHEDULER_STYLE.get(name, FALLBACK_STYLE)
        ax.plot(xs, means, color=color, marker=marker, label=name, linewidth=1.6)
        lo = [m - s for m, s in zip(means, stds)]
        hi = [m + s for m, s in zip(means, stds)]
        ax.fill_between(xs, lo, hi, color=color, alpha=0.15, linewidth=0)
    ax.set_xlabel(axis_label)
    ax.set_ylabel(METRICS[metric][2])
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)


def _save_both(fig, output_image) -> list[Path]:
    base = Path(output_image)
    if base.suffix.lower() in (".png", ".svg"):
        base = base.with_suffix("")
    base.parent.mkdir(parents=True, exist_ok=True)
    png = base.with_suffix(".png")
    svg = base.with_suffix(".svg")
    fig.savefig(png, format="png")
    fig.savefig(svg, format="svg", metadata={"Date": None})
    plt.close(fig)
    return [png, svg]


def render(spec: FigureSpec) -> list[Path]:
    """Render one metric panel; returns the written PNG and SVG paths.

    Validates the CSV before any file is created.
    """
    rows = load_aggregate(spec.input_csv)
    if not spec.series:
        raise SchemaError("at least one series required")
    fig, ax = plt.subplots(figsize=(6.2, 4.0), dpi=150)
    _draw_panel(ax, rows, spec.series, spec.metric, spec.axis_label)
    fig.tight_layout()
    return _save_both(fig, spec.output_image)


def render_pair(input_csv, axis_label, series, output_image) -> list[Path]:
    """Two stacked panels (completed flows, throughput) over one axis:
    the shape of the paper-style comparison figures."""
    rows = load_aggregate(input_csv)
    if not series:
        raise SchemaError("at least one series required")
    fig, (ax_top, ax_bottom) = plt.subplots(2, 1, figsize=(6.2, 7.6), dpi=150)
    _draw_panel(ax_top, rows, series, "completed", axis_label)
    _draw_panel(ax_bottom, rows, series, "throughput", axis_label)
    fig.tight_layout()
    return _save_both(fig, output_image)
