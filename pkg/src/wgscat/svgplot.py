"""Native SVG emission for sweep curves, complex-plane loci and field maps.

No plotting dependency: curves are polylines, circle overlays are circle
elements and field maps are grids of rect elements with a fixed diverging
colormap.  Output is deterministic (fixed formatting, no timestamps).
"""

from __future__ import annotations

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

# diverging blue - white - red anchors
_CMAP = ((0.0, (33, 102, 172)), (0.5, (247, 247, 247)), (1.0, (178, 24, 43)))
_NAN_COLOR = "#cccccc"


def diverging_color(t: float) -> str:
    """Hex color for t in [0, 1] on the fixed blue-white-red map."""
    t = min(max(t, 0.0), 1.0)
    for (t0, c0), (t1, c1) in zip(_CMAP, _CMAP[1:]):
        if t <= t1:
            s = (t - t0) / (t1 - t0)
            rgb = [round(a + s * (b - a)) for a, b in zip(c0, c1)]
            return "#{:02x}{:02x}{:02x}".format(*rgb)
    return "#{:02x}{:02x}{:02x}".format(*_CMAP[-1][1])


def _fmt(v: float) -> str:
    return f"{v:.2f}"


class SvgCanvas:
    """Minimal retained-element SVG document with a data-to-pixel transform."""

    def __init__(self, width: int, height: int,
                 xlim: Tuple[float, float], ylim: Tuple[float, float],
                 margin: int = 50, title: str = ""):
        self.width, self.height, self.margin = width, height, margin
        self.xlim, self.ylim = xlim, ylim
        self.parts: List[str] = []
        if title:
            self.parts.append(
                f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" '
                f'font-family="sans-serif" font-size="14">{title}</text>')

    def px(self, x: float) -> float:
        a, b = self.xlim
        return self.margin + (x - a) / (b - a) * (self.width - 2 * self.margin)

    def py(self, y: float) -> float:
        a, b = self.ylim
        return (self.height - self.margin
                - (y - a) / (b - a) * (self.height - 2 * self.margin))

    def polyline(self, xs: Sequence[float], ys: Sequence[float],
                 color: str = "#1f77b4", width: float = 1.5) -> None:
        pts = " ".join(f"{_fmt(self.px(x))},{_fmt(self.py(y))}"
                       for x, y in zip(xs, ys)
                       if math.isfinite(x) and math.isfinite(y))
        self.parts.append(f'<polyline points="{pts}" fill="none" '
                          f'stroke="{color}" stroke-width="{width}"/>')

    def circle(self, cx: float, cy: float, r_data: float,
               color: str = "#888888", dash: bool = True) -> None:
        rx = abs(self.px(cx + r_data) - self.px(cx))
        style = ' stroke-dasharray="4,3"' if dash else ""
        self.parts.append(
            f'<ellipse cx="{_fmt(self.px(cx))}" cy="{_fmt(self.py(cy))}" '
            f'rx="{_fmt(rx)}" ry="{_fmt(abs(self.py(cy + r_data) - self.py(cy)))}" '
            f'fill="none" stroke="{color}" stroke-width="1"{style}/>')

    def rect(self, x0: float, y0: float, x1: float, y1: float,
             color: str) -> None:
        px0, px1 = self.px(x0), self.px(x1)
        py0, py1 = self.py(y1), self.py(y0)
        self.parts.append(
            f'<rect x="{_fmt(px0)}" y="{_fmt(py0)}" '
            f'width="{_fmt(px1 - px0 + 0.5)}" height="{_fmt(py1 - py0 + 0.5)}" '
            f'fill="{color}" stroke="none"/>')

    def marker(self, x: float, y: float, color: str = "#d62728") -> None:
        self.parts.append(f'<circle cx="{_fmt(self.px(x))}" '
                          f'cy="{_fmt(self.py(y))}" r="3" fill="{color}"/>')

    def text(self, x: float, y: float, s: str, size: int = 11,
             anchor: str = "middle") -> None:
        self.parts.append(
            f'<text x="{_fmt(self.px(x))}" y="{_fmt(self.py(y))}" '
            f'text-anchor="{anchor}" font-family="sans-serif" '
            f'font-size="{size}">{s}</text>')

    def axes(self, xlabel: str = "", ylabel: str = "",
             n_ticks: int = 6) -> None:
        m = self.margin
        w, h = self.width, self.height
        self.parts.append(
            f'<rect x="{m}" y="{m}" width="{w - 2 * m}" height="{h - 2 * m}" '
            f'fill="none" stroke="#000000" stroke-width="1"/>')
        for i in range(n_ticks):
            xv = self.xlim[0] + i * (self.xlim[1] - self.xlim[0]) / (n_ticks - 1)
            yv = self.ylim[0] + i * (self.ylim[1] - self.ylim[0]) / (n_ticks - 1)
            self.parts.append(
                f'<text x="{_fmt(self.px(xv))}" y="{h - m + 18}" '
                f'text-anchor="middle" font-family="sans-serif" '
                f'font-size="10">{xv:.3g}</text>')
            self.parts.append(
                f'<text x="{m - 6}" y="{_fmt(self.py(yv) + 3)}" '
                f'text-anchor="end" font-family="sans-serif" '
                f'font-size="10">{yv:.3g}</text>')
        if xlabel:
            self.parts.append(
                f'<text x="{w / 2:.0f}" y="{h - 8}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="12">{xlabel}</text>')
        if ylabel:
            self.parts.append(
                f'<text x="14" y="{h / 2:.0f}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="12" '
                f'transform="rotate(-90 14 {h / 2:.0f})">{ylabel}</text>')

    def save(self, path: str) -> None:
        body = "\n".join(self.parts)
        doc = (f'<svg xmlns="http://www.w3.org/2000/svg" '
               f'width="{self.width}" height="{self.height}" '
               f'viewBox="0 0 {self.width} {self.height}">\n'
               f'<rect width="100%" height="100%" fill="#ffffff"/>\n'
               f"{body}\n</svg>\n")
        with open(path, "w") as f:
            f.write(doc)


def line_plot(path: str, xs: Sequence[float],
              series: Sequence[Tuple[Sequence[float], str, str]],
              xlabel: str = "L", ylabel: str = "", title: str = "",
              markers: Sequence[float] = ()) -> None:
    """Curves (ys, color, label) over a shared x grid, with vertical markers."""
    finite = [y for ys, _, _ in series for y in ys if math.isfinite(y)]
    lo, hi = min(finite), max(finite)
    pad = 0.05 * (hi - lo or 1.0)
    cv = SvgCanvas(640, 420, (min(xs), max(xs)), (lo - pad, hi + pad),
                   title=title)
    cv.axes(xlabel, ylabel)
    for i, (ys, color, label) in enumerate(series):
        cv.polyline(xs, ys, color)
        if label:
            cv.parts.append(
                f'<text x="{cv.width - cv.margin - 4}" '
                f'y="{cv.margin + 16 + 14 * i}" text-anchor="end" '
                f'font-family="sans-serif" font-size="11" '
                f'fill="{color}">{label}</text>')
    for xm in markers:
        cv.polyline([xm, xm], [lo - pad, hi + pad], "#d62728", 0.8)
    cv.save(path)


def complex_locus(path: str, values: Sequence[complex], title: str = "",
                  overlays: Sequence[Tuple[complex, float]] = ((0j, 1.0),),
                  points: Sequence[complex] = ()) -> None:
    """Complex-plane curve with circle overlays (default the unit circle)."""
    cv = SvgCanvas(460, 460, (-1.35, 1.35), (-1.35, 1.35), title=title)
    cv.axes("Re", "Im")
    for center, radius in overlays:
        cv.circle(center.real, center.imag, radius)
    cv.polyline([v.real for v in values], [v.imag for v in values])
    for p in points:
        cv.marker(p.real, p.imag)
    cv.save(path)


def heatmap(path: str, xs: np.ndarray, ys: np.ndarray, Z: np.ndarray,
            title: str = "", vmax: Optional[float] = None) -> None:
    """Rect-per-cell field map; Z is (ny, nx), NaN cells drawn grey."""
    Z = np.asarray(Z, dtype=float)
    if vmax is None:
        vmax = float(np.nanmax(np.abs(Z))) or 1.0
    aspect = (ys[-1] - ys[0]) / (xs[-1] - xs[0])
    width = 720
    height = int(max(240, min(900, (width - 100) * aspect + 100)))
    cv = SvgCanvas(width, height, (xs[0], xs[-1]), (ys[0], ys[-1]),
                   title=title)
    for j in range(len(ys) - 1):
        for i in range(len(xs) - 1):
            v = Z[j, i]
            color = (_NAN_COLOR if not math.isfinite(v)
                     else diverging_color(0.5 + 0.5 * v / vmax))
            cv.rect(xs[i], ys[j], xs[i + 1], ys[j + 1], color)
    cv.axes("x", "y")
    cv.save(path)
