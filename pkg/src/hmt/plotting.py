"""Deterministic SVG output for experiment CSVs.

No plotting library: identical input bytes must yield identical SVG bytes,
so everything (fonts, sizes, float formatting, colors) is fixed here.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2")

W, H = 640, 460
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 16, 28, 46

DISTANCE_HEADER = ["experiment", "class", "method", "n", "trial",
                   "total_distance", "max_distance", "wall_ms", "status"]
HIST_HEADER_PREFIX = ["experiment", "mode", "outer", "inner"]
SAMPLES_HEADER = ["x", "method", "value"]


class SchemaMismatchError(ValueError):
    """CSV header does not match any known plot schema."""


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0]:
        raise SchemaMismatchError(f"{path}: empty CSV")
    return rows[0], rows[1:]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


class _Svg:
    def __init__(self):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
            f'viewBox="0 0 {W} {H}" font-family="DejaVu Sans, sans-serif">',
            f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        ]

    def line(self, x1, y1, x2, y2, color="#444444", width=1.0):
        self.parts.append(f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" '
                          f'y2="{_fmt(y2)}" stroke="{color}" stroke-width="{width}"/>')

    def polyline(self, pts, color, width=1.5):
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        self.parts.append(f'<polyline points="{coords}" fill="none" '
                          f'stroke="{color}" stroke-width="{width}"/>')

    def rect(self, x, y, w, h, color, opacity=1.0):
        self.parts.append(f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" '
                          f'height="{_fmt(h)}" fill="{color}" fill-opacity="{opacity}"/>')

    def text(self, x, y, s, size=11, anchor="middle", color="#222222"):
        self.parts.append(f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{size}" '
                          f'text-anchor="{anchor}" fill="{color}">{s}</text>')

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _axes(svg: _Svg, x_lo, x_hi, y_lo, y_hi, x_label, y_label, y_log=False):
    px = lambda x: MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (W - MARGIN_L - MARGIN_R)
    py = lambda y: H - MARGIN_B - (y - y_lo) / (y_hi - y_lo) * (H - MARGIN_T - MARGIN_B)
    svg.line(MARGIN_L, H - MARGIN_B, W - MARGIN_R, H - MARGIN_B)
    svg.line(MARGIN_L, MARGIN_T, MARGIN_L, H - MARGIN_B)
    for i in range(5):
        xv = x_lo + i * (x_hi - x_lo) / 4
        svg.line(px(xv), H - MARGIN_B, px(xv), H - MARGIN_B + 4)
        svg.text(px(xv), H - MARGIN_B + 18, f"{xv:.3g}")
        yv = y_lo + i * (y_hi - y_lo) / 4
        svg.line(MARGIN_L - 4, py(yv), MARGIN_L, py(yv))
        label = f"1e{yv:.2g}" if y_log else f"{yv:.3g}"
        svg.text(MARGIN_L - 8, py(yv) + 4, label, anchor="end")
    svg.text((MARGIN_L + W - MARGIN_R) / 2, H - 10, x_label)
    svg.text(14, MARGIN_T - 10, y_label, anchor="start")
    return px, py


def _plot_distance(header, rows, out_path):
    if header != DISTANCE_HEADER:
        raise SchemaMismatchError("expected the flat experiment schema")
    series: dict[str, dict[int, list[float]]] = {}
    for r in rows:
        rec = dict(zip(header, r))
        if rec["status"] not in ("ok", "mean"):
            continue
        if not rec["total_distance"]:
            continue
        key = rec["method"] if rec["class"] == "" else f'{rec["class"]}:{rec["method"]}'
        series.setdefault(key, {}).setdefault(int(rec["n"]), []).append(
            float(rec["total_distance"]))
    if not series:
        raise SchemaMismatchError("no plottable rows (status ok with distances)")
    pts = {}
    for key, by_n in sorted(series.items()):
        xs = sorted(by_n)
        med = [sorted(by_n[x])[len(by_n[x]) // 2] for x in xs]
        pts[key] = [(x, math.log10(max(v, 1e-16))) for x, v in zip(xs, med)]
    all_x = [p[0] for ps in pts.values() for p in ps]
    all_y = [p[1] for ps in pts.values() for p in ps]
    svg = _Svg()
    x_lo, x_hi = min(all_x), max(all_x) or 1
    y_lo, y_hi = min(all_y) - 0.2, max(all_y) + 0.2
    if x_hi == x_lo:
        x_hi = x_lo + 1
    px, py = _axes(svg, x_lo, x_hi, y_lo, y_hi, "number of moments n",
                   "log10 median total distance", y_log=True)
    for i, (key, ps) in enumerate(sorted(pts.items())):
        color = PALETTE[i % len(PALETTE)]
        svg.polyline([(px(x), py(y)) for x, y in ps], color)
        svg.text(W - MARGIN_R - 4, MARGIN_T + 14 * (i + 1), key, anchor="end",
                 color=color)
    Path(out_path).write_text(svg.render())


def _plot_histogram(header, rows, out_path):
    need = {"x_inf", "x_sup", "x_avg"}
    if not need.issubset(header):
        raise SchemaMismatchError("expected cm-histogram schema with x_* columns")
    idx = {name: header.index(name) for name in need}
    data = {name: [float(r[i]) for r in rows if r[i]] for name, i in idx.items()}
    if not any(data.values()):
        raise SchemaMismatchError("no histogram samples")
    bins = 20
    svg = _Svg()
    px, py = _axes(svg, 0.0, 1.0, 0.0, 1.0, "normalized position", "relative frequency")
    for i, name in enumerate(sorted(data)):
        vals = data[name]
        if not vals:
            continue
        counts = [0] * bins
        for v in vals:
            counts[min(bins - 1, max(0, int(v * bins)))] += 1
        peak = max(counts) or 1
        color = PALETTE[i % len(PALETTE)]
        bw = (W - MARGIN_L - MARGIN_R) / bins / 3.0
        for bidx, cnt in enumerate(counts):
            if cnt == 0:
                continue
            x = px(bidx / bins) + i * bw
            y = py(cnt / peak)
            svg.rect(x, y, bw, H - MARGIN_B - y, color, opacity=0.8)
        svg.text(W - MARGIN_R - 4, MARGIN_T + 14 * (i + 1), name, anchor="end",
                 color=color)
    Path(out_path).write_text(svg.render())


def _plot_samples(header, rows, out_path):
    if header != SAMPLES_HEADER:
        raise SchemaMismatchError("expected the single-run samples schema")
    series: dict[str, list[tuple[float, float]]] = {}
    for x, method, value in rows:
        series.setdefault(method, []).append((float(x), float(value)))
    if not series:
        raise SchemaMismatchError("no sample rows")
    svg = _Svg()
    px, py = _axes(svg, 0.0, 1.0, 0.0, 1.0, "x", "F(x)")
    for i, (method, ps) in enumerate(sorted(series.items())):
        color = PALETTE[i % len(PALETTE)]
        svg.polyline([(px(x), py(min(max(y, 0.0), 1.0))) for x, y in sorted(ps)], color)
        svg.text(W - MARGIN_R - 4, MARGIN_T + 14 * (i + 1), method, anchor="end",
                 color=color)
    Path(out_path).write_text(svg.render())


def emit_plot(csv_path, kind: str, out_path) -> None:
    """Render a CSV to a deterministic SVG. kind: distance | histogram | samples."""
    header, rows = _read_csv(csv_path)
    if kind == "distance":
        _plot_distance(header, rows, out_path)
    elif kind == "histogram":
        _plot_histogram(header, rows, out_path)
    elif kind == "samples":
        _plot_samples(header, rows, out_path)
    else:
        raise ValueError(f"unknown plot kind {kind!r}")
