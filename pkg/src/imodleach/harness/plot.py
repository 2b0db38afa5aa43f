"""Static SVG line charts. Output depends only on the input, byte for byte."""

from __future__ import annotations

import math
from html import escape
from pathlib import Path
from typing import Mapping, Sequence, Tuple, Union

WIDTH, HEIGHT = 720, 460
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 80, 170, 40, 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")

Series = Mapping[str, Tuple[Sequence[float], Sequence[float]]]


def _nice_ticks(lo: float, hi: float, count: int = 5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + step * 1e-9:
        ticks.append(round(t, 12))
        t += step
    return ticks


def _range(values):
    lo, hi = min(values), max(values)
    if lo == hi:
        pad = abs(lo) * 0.1 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def render_svg(series: Series, title: str = "", xlabel: str = "", ylabel: str = "") -> str:
    if not series:
        raise ValueError("emit_plot needs at least one series")
    for name, (xs, ys) in series.items():
        if len(xs) == 0 or len(xs) != len(ys):
            raise ValueError(f"series {name!r} must be non-empty with matching x/y lengths")

    all_x = [float(v) for xs, _ in series.values() for v in xs]
    all_y = [float(v) for _, ys in series.values() for v in ys]
    x0, x1 = _range(all_x)
    y0, y1 = _range(all_y)
    pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(v):
        return MARGIN_LEFT + (float(v) - x0) / (x1 - x0) * pw

    def sy(v):
        return MARGIN_TOP + ph - (float(v) - y0) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>')

    # axes and ticks
    out.append(f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for t in _nice_ticks(x0, x1):
        px = sx(t)
        out.append(f'<line x1="{px:.2f}" y1="{MARGIN_TOP + ph}" x2="{px:.2f}" y2="{MARGIN_TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{MARGIN_TOP + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y0, y1):
        py = sy(t)
        out.append(f'<line x1="{MARGIN_LEFT - 5}" y1="{py:.2f}" x2="{MARGIN_LEFT}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_LEFT - 8}" y="{py + 4:.2f}" text-anchor="end">{t:g}</text>')
    out.append(f'<text class="xlabel" x="{MARGIN_LEFT + pw / 2:.2f}" y="{HEIGHT - 15}" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text class="ylabel" x="20" y="{MARGIN_TOP + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 20 {MARGIN_TOP + ph / 2:.2f})">{escape(ylabel)}</text>')

    for i, (name, (xs, ys)) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}">'
                   f'<title>{escape(name)}</title></polyline>')
        ly = MARGIN_TOP + 10 + 20 * i
        lx = WIDTH - MARGIN_RIGHT + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text class="legend" x="{lx + 26}" y="{ly + 4}">{escape(name)}</text>')

    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(series: Series, path: Union[str, Path], kind: str = "line",
              title: str = "", xlabel: str = "", ylabel: str = "") -> None:
    if kind != "line":
        raise ValueError(f"unsupported plot kind {kind!r}")
    text = render_svg(series, title=title, xlabel=xlabel, ylabel=ylabel)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
