"""
A small standalone SVG writer for sweep results: labeled ``(x, y)`` series on linear or
logarithmic axes, with a legend.
"""

import logging
import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

from .common.aliases import PathOrStr
from .common.exceptions import ConfigurationError
from .format import CsvFormat, Format, JsonFormat

logger = logging.getLogger(__name__)

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]

WIDTH = 640
HEIGHT = 420
MARGIN_LEFT = 70
MARGIN_RIGHT = 160
MARGIN_TOP = 40
MARGIN_BOTTOM = 55
TICKS = 5


@dataclass
class Series:
    label: str
    x: List[float]
    y: List[float]
    line: bool = True

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise ConfigurationError(
                f"series '{self.label}' has {len(self.x)} x values and {len(self.y)} y values"
            )
        if not self.x:
            raise ConfigurationError(f"series '{self.label}' is empty")


@dataclass
class Figure:
    series: List[Series]
    title: str = ""
    x_label: str = "x"
    y_label: str = "y"
    log_x: bool = False
    log_y: bool = False
    width: int = WIDTH
    height: int = HEIGHT


class _Axis:
    def __init__(self, values: Sequence[float], log: bool, lo_px: float, hi_px: float, name: str):
        values = np.asarray(values, dtype=np.float64)
        if log:
            if np.any(values <= 0):
                raise ConfigurationError(f"a logarithmic {name} axis needs positive values")
            values = np.log10(values)
        lo, hi = float(values.min()), float(values.max())
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        pad = 0.05 * (hi - lo)
        self.lo, self.hi = lo - pad, hi + pad
        self.log = log
        self.lo_px, self.hi_px = lo_px, hi_px

    def __call__(self, value: float) -> float:
        if self.log:
            value = math.log10(value)
        return self.lo_px + (value - self.lo) / (self.hi - self.lo) * (self.hi_px - self.lo_px)

    def ticks(self) -> List[Tuple[float, str]]:
        out = []
        for i in range(TICKS + 1):
            value = self.lo + (self.hi - self.lo) * i / TICKS
            shown = 10.0**value if self.log else value
            position = self.lo_px + i / TICKS * (self.hi_px - self.lo_px)
            out.append((position, f"{shown:.3g}"))
        return out


def render_svg(figure: Figure) -> str:
    """Renders ``figure`` as the text of a standalone SVG document."""
    if not figure.series:
        raise ConfigurationError("nothing to plot: no series given")
    xs = [v for s in figure.series for v in s.x]
    ys = [v for s in figure.series for v in s.y]
    if not all(math.isfinite(v) for v in xs + ys):
        raise ConfigurationError("plot values must be finite")
    plot_right = figure.width - MARGIN_RIGHT
    plot_bottom = figure.height - MARGIN_BOTTOM
    ax = _Axis(xs, figure.log_x, MARGIN_LEFT, plot_right, "x")
    ay = _Axis(ys, figure.log_y, plot_bottom, MARGIN_TOP, "y")

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{figure.width}" '
        f'height="{figure.height}" viewBox="0 0 {figure.width} {figure.height}" '
        'font-family="sans-serif" font-size="12">',
        f'<rect width="{figure.width}" height="{figure.height}" fill="white"/>',
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_right - MARGIN_LEFT}" '
        f'height="{plot_bottom - MARGIN_TOP}" fill="none" stroke="black"/>',
    ]
    if figure.title:
        parts.append(
            f'<text x="{(MARGIN_LEFT + plot_right) / 2:.2f}" y="{MARGIN_TOP - 15}" '
            f'text-anchor="middle" font-size="14">{escape(figure.title)}</text>'
        )
    for x, text in ax.ticks():
        parts.append(
            f'<line x1="{x:.2f}" y1="{plot_bottom}" x2="{x:.2f}" y2="{plot_bottom + 5}" '
            'stroke="black"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{plot_bottom + 18}" text-anchor="middle">{text}</text>'
        )
    for y, text in ay.ticks():
        parts.append(
            f'<line x1="{MARGIN_LEFT - 5}" y1="{y:.2f}" x2="{MARGIN_LEFT}" y2="{y:.2f}" '
            'stroke="black"/>'
        )
        parts.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{y + 4:.2f}" text-anchor="end">{text}</text>'
        )
    x_suffix = " (log)" if figure.log_x else ""
    y_suffix = " (log)" if figure.log_y else ""
    parts.append(
        f'<text x="{(MARGIN_LEFT + plot_right) / 2:.2f}" y="{figure.height - 15}" '
        f'text-anchor="middle">{escape(figure.x_label + x_suffix)}</text>'
    )
    y_mid = (MARGIN_TOP + plot_bottom) / 2
    parts.append(
        f'<text x="18" y="{y_mid:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {y_mid:.2f})">{escape(figure.y_label + y_suffix)}</text>'
    )

    for index, series in enumerate(figure.series):
        color = PALETTE[index % len(PALETTE)]
        points = [(ax(x), ay(y)) for x, y in zip(series.x, series.y)]
        parts.append(f'<g class="series" data-label="{escape(series.label)}">')
        if series.line and len(points) > 1:
            path = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
            parts.append(
                f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
        for x, y in points:
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{color}"/>')
        parts.append("</g>")
        legend_y = MARGIN_TOP + 10 + 18 * index
        parts.append(
            f'<rect x="{plot_right + 15}" y="{legend_y - 8}" width="12" height="12" '
            f'fill="{color}"/>'
        )
        parts.append(
            f'<text x="{plot_right + 32}" y="{legend_y + 2}">{escape(series.label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


@Format.register("svg")
class SvgFormat(Format[Figure]):
    """Writes a :class:`Figure`. Figures cannot be read back."""

    VERSION = 1

    def write(self, artifact: Figure, path: PathOrStr):
        with open(path, "wt") as f:
            f.write(render_svg(artifact))

    def read(self, path: PathOrStr) -> Figure:
        raise ConfigurationError("SVG figures are write-only")


def series_from_csv(path: PathOrStr) -> List[Series]:
    """Reads ``label,x,y`` rows; rows with the same label form one series, in file order."""
    table = CsvFormat().read(path)
    if [c.strip() for c in table.columns] != ["label", "x", "y"]:
        raise ConfigurationError(f"{path}: expected the header 'label,x,y', got {table.columns}")
    grouped: "OrderedDict[str, Tuple[List[float], List[float]]]" = OrderedDict()
    for line, row in enumerate(table.rows, start=2):
        if len(row) != 3:
            raise ConfigurationError(f"{path}:{line}: expected 3 cells, got {len(row)}")
        try:
            x, y = float(row[1]), float(row[2])
        except ValueError:
            raise ConfigurationError(f"{path}:{line}: x and y must be numbers")
        xs, ys = grouped.setdefault(row[0], ([], []))
        xs.append(x)
        ys.append(y)
    return [Series(label, xs, ys) for label, (xs, ys) in grouped.items()]


def series_from_report(report: Dict[str, Any]) -> Tuple[List[Series], Dict[str, str]]:
    """
    Series and axis labels for a ``distortion`` or ``markov`` sweep report. Distortion sweeps
    plot the measured distortion next to the growth curve; Markov sweeps plot one ratio series
    per exponent ``p``.
    """
    command = report.get("command")
    rows = report.get("result", {})
    if isinstance(rows, dict):
        rows = rows.get("rows", [])
    if not isinstance(rows, list) or not rows:
        raise ConfigurationError(f"the {command} report has no sweep rows to plot")
    if command == "distortion":
        levels = [float(r["level"]) for r in rows]
        return [
            Series("measured", levels, [float(r["distortion"]) for r in rows]),
            Series("(M+n)^(1/4) sqrt(log2(M+n))", levels, [float(r["curve"]) for r in rows]),
        ], {"x_label": "level n", "y_label": "distortion"}
    if command == "markov":
        by_p: "OrderedDict[float, Tuple[List[float], List[float]]]" = OrderedDict()
        for r in rows:
            xs, ys = by_p.setdefault(float(r["p"]), ([], []))
            xs.append(float(r["level"]))
            ys.append(float(r["ratio_pi"]))
        return [Series(f"p = {p:g}", xs, ys) for p, (xs, ys) in by_p.items()], {
            "x_label": "level m",
            "y_label": "Markov convexity ratio",
        }
    raise ConfigurationError(
        f"cannot plot a '{command}' report; expected a distortion or markov sweep"
    )


def load_series(path: PathOrStr) -> Tuple[List[Series], Dict[str, str]]:
    """Series from a sweep report (``.json``) or a ``label,x,y`` CSV file."""
    if str(path).endswith(".json"):
        return series_from_report(JsonFormat().read(path))
    return series_from_csv(path), {}


def plot(
    series: Sequence[Series],
    out: PathOrStr,
    title: str = "",
    x_label: str = "x",
    y_label: str = "y",
    log_x: bool = False,
    log_y: bool = False,
) -> Figure:
    figure = Figure(
        list(series), title=title, x_label=x_label, y_label=y_label, log_x=log_x, log_y=log_y
    )
    SvgFormat().write(figure, out)
    logger.info("wrote %d series to %s", len(figure.series), out)
    return figure
