"""Deterministic SVG plot emission with plain-data TSV sidecars.

Figures are written as SVG 1.1 with a fixed layout and fixed number
formatting, so identical inputs produce identical bytes.  Every figure gets
a TSV sidecar holding the exact plotted coordinates, which makes plots
regression-testable without image diffing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

WIDTH = 720.0
HEIGHT = 480.0
MARGIN_L = 72.0
MARGIN_R = 24.0
MARGIN_T = 34.0
MARGIN_B = 54.0

PALETTE = ("#000000", "#1f6fb4", "#c23b22", "#2e8b57", "#8860b2")

VIEWS = ("linlin", "loglin", "linlog", "loglog")


@dataclass(frozen=True)
class Curve:
    """One plotted series; kind is 'markers' or 'line'."""

    name: str
    xs: tuple[float, ...]
    ys: tuple[float, ...]
    kind: str = "line"


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    span = hi - lo
    step = 10.0 ** math.floor(math.log10(span / target))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if span / (step * mult) <= target:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * span:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _decade_ticks(lo: float, hi: float) -> list[tuple[float, str]]:
    """Ticks at powers of ten for an axis already in natural-log units."""
    lo10 = math.ceil(lo / math.log(10.0) - 1e-9)
    hi10 = math.floor(hi / math.log(10.0) + 1e-9)
    ticks = [(k * math.log(10.0), f"1e{k:+03d}" if k < 0 else f"{10 ** k:d}")
             for k in range(lo10, hi10 + 1)]
    if len(ticks) >= 2:
        return ticks
    return [(v, f"{math.exp(v):.3g}") for v in _nice_ticks(lo, hi, 4)]


def _tick_label(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return f"{v:.4g}"


class _SvgCanvas:
    def __init__(self, title: str, xlabel: str, ylabel: str):
        self.parts: list[str] = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{WIDTH:g}" height="{HEIGHT:g}" '
            f'viewBox="0 0 {WIDTH:g} {HEIGHT:g}">',
            f'<rect x="0" y="0" width="{WIDTH:g}" height="{HEIGHT:g}" fill="#ffffff"/>',
            f'<text x="{WIDTH / 2:.2f}" y="20" font-family="monospace" '
            f'font-size="14" text-anchor="middle">{_escape(title)}</text>',
            f'<text x="{WIDTH / 2:.2f}" y="{HEIGHT - 12:.2f}" font-family="monospace" '
            f'font-size="12" text-anchor="middle">{_escape(xlabel)}</text>',
            f'<text x="16" y="{HEIGHT / 2:.2f}" font-family="monospace" font-size="12" '
            f'text-anchor="middle" transform="rotate(-90 16 {HEIGHT / 2:.2f})">'
            f"{_escape(ylabel)}</text>",
        ]

    def add(self, fragment: str) -> None:
        self.parts.append(fragment)

    def finish(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


class _Frame:
    """Maps data coordinates onto the plotting rectangle."""

    def __init__(self, xlo, xhi, ylo, yhi):
        if xhi <= xlo:
            pad = max(1.0, abs(xlo)) * 0.5
            xlo, xhi = xlo - pad, xhi + pad
        if yhi <= ylo:
            pad = max(1.0, abs(ylo)) * 0.5
            ylo, yhi = ylo - pad, yhi + pad
        xpad = 0.02 * (xhi - xlo)
        ypad = 0.04 * (yhi - ylo)
        self.xlo, self.xhi = xlo - xpad, xhi + xpad
        self.ylo, self.yhi = ylo - ypad, yhi + ypad

    def px(self, x: float) -> float:
        frac = (x - self.xlo) / (self.xhi - self.xlo)
        return MARGIN_L + frac * (WIDTH - MARGIN_L - MARGIN_R)

    def py(self, y: float) -> float:
        frac = (y - self.ylo) / (self.yhi - self.ylo)
        return HEIGHT - MARGIN_B - frac * (HEIGHT - MARGIN_T - MARGIN_B)


def _axes(canvas: _SvgCanvas, frame: _Frame, xticks, yticks) -> None:
    x0, x1 = MARGIN_L, WIDTH - MARGIN_R
    y0, y1 = HEIGHT - MARGIN_B, MARGIN_T
    canvas.add(
        f'<path d="M {x0:.2f} {y1:.2f} L {x0:.2f} {y0:.2f} L {x1:.2f} {y0:.2f}" '
        f'fill="none" stroke="#000000" stroke-width="1"/>'
    )
    for value, label in xticks:
        px = frame.px(value)
        if px < x0 - 0.5 or px > x1 + 0.5:
            continue
        canvas.add(
            f'<line x1="{px:.2f}" y1="{y0:.2f}" x2="{px:.2f}" y2="{y0 + 5:.2f}" '
            f'stroke="#000000" stroke-width="1"/>'
        )
        canvas.add(
            f'<text x="{px:.2f}" y="{y0 + 18:.2f}" font-family="monospace" '
            f'font-size="11" text-anchor="middle">{_escape(label)}</text>'
        )
    for value, label in yticks:
        py = frame.py(value)
        if py > y0 + 0.5 or py < y1 - 0.5:
            continue
        canvas.add(
            f'<line x1="{x0 - 5:.2f}" y1="{py:.2f}" x2="{x0:.2f}" y2="{py:.2f}" '
            f'stroke="#000000" stroke-width="1"/>'
        )
        canvas.add(
            f'<text x="{x0 - 8:.2f}" y="{py + 4:.2f}" font-family="monospace" '
            f'font-size="11" text-anchor="end">{_escape(label)}</text>'
        )


def _draw_curve(canvas: _SvgCanvas, frame: _Frame, curve: Curve, color: str) -> None:
    if curve.kind == "markers":
        for x, y in zip(curve.xs, curve.ys):
            canvas.add(
                f'<circle cx="{frame.px(x):.2f}" cy="{frame.py(y):.2f}" r="2.2" '
                f'fill="{color}" fill-opacity="0.75"/>'
            )
        return
    points = " ".join(
        f"{frame.px(x):.2f},{frame.py(y):.2f}" for x, y in zip(curve.xs, curve.ys)
    )
    canvas.add(
        f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.6"/>'
    )


def _legend(canvas: _SvgCanvas, names_colors: list[tuple[str, str]]) -> None:
    x = WIDTH - MARGIN_R - 150
    y = MARGIN_T + 12
    for i, (name, color) in enumerate(names_colors):
        yy = y + 16 * i
        canvas.add(
            f'<line x1="{x:.2f}" y1="{yy - 4:.2f}" x2="{x + 22:.2f}" y2="{yy - 4:.2f}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        canvas.add(
            f'<text x="{x + 28:.2f}" y="{yy:.2f}" font-family="monospace" '
            f'font-size="11">{_escape(name)}</text>'
        )


def xy_figure(
    curves: list[Curve],
    view: str,
    title: str,
    xlabel: str,
    ylabel: str,
) -> str:
    """Render curves under one of the four axis views as an SVG string.

    Log views scale the axis by the natural log and label ticks at decades;
    points with non-positive coordinates are dropped from log axes.
    """
    if view not in VIEWS:
        raise ValueError(f"view must be one of {VIEWS}")
    logx = view in ("loglin", "loglog")
    logy = view in ("linlog", "loglog")

    transformed: list[Curve] = []
    for curve in curves:
        xs, ys = [], []
        for x, y in zip(curve.xs, curve.ys):
            if (logx and x <= 0) or (logy and y <= 0):
                continue
            xs.append(math.log(x) if logx else x)
            ys.append(math.log(y) if logy else y)
        if xs:
            transformed.append(Curve(curve.name, tuple(xs), tuple(ys), curve.kind))
    if not transformed:
        raise ValueError("nothing to plot after log-view filtering")

    xlo = min(min(c.xs) for c in transformed)
    xhi = max(max(c.xs) for c in transformed)
    ylo = min(min(c.ys) for c in transformed)
    yhi = max(max(c.ys) for c in transformed)
    frame = _Frame(xlo, xhi, ylo, yhi)

    if logx:
        xticks = _decade_ticks(frame.xlo, frame.xhi)
    else:
        xticks = [(v, _tick_label(v)) for v in _nice_ticks(frame.xlo, frame.xhi)]
    if logy:
        yticks = _decade_ticks(frame.ylo, frame.yhi)
    else:
        yticks = [(v, f"{v:.3g}") for v in _nice_ticks(frame.ylo, frame.yhi)]

    canvas = _SvgCanvas(title, xlabel, ylabel)
    _axes(canvas, frame, xticks, yticks)
    names_colors = []
    for i, curve in enumerate(transformed):
        color = PALETTE[i % len(PALETTE)]
        _draw_curve(canvas, frame, curve, color)
        names_colors.append((curve.name, color))
    if len(names_colors) > 1:
        _legend(canvas, names_colors)
    return canvas.finish()


def bar_figure(
    lefts: list[float],
    counts: list[int],
    bar_width: float,
    title: str,
    xlabel: str,
    ylabel: str,
    markers: list[tuple[float, str]] | None = None,
) -> str:
    """Histogram-style bar chart; optional labelled vertical marker lines."""
    if not lefts:
        raise ValueError("nothing to plot")
    xlo = min(lefts)
    xhi = max(lefts) + bar_width
    yhi = max(counts)
    frame = _Frame(xlo, xhi, 0.0, float(yhi))
    xticks = [(v, _tick_label(v)) for v in _nice_ticks(frame.xlo, frame.xhi)]
    yticks = [(v, _tick_label(v)) for v in _nice_ticks(0.0, frame.yhi)]
    canvas = _SvgCanvas(title, xlabel, ylabel)
    _axes(canvas, frame, xticks, yticks)
    base = frame.py(0.0)
    for left, count in zip(lefts, counts):
        if count <= 0:
            continue
        x0 = frame.px(left)
        x1 = frame.px(left + bar_width)
        top = frame.py(float(count))
        canvas.add(
            f'<rect x="{x0:.2f}" y="{top:.2f}" width="{max(x1 - x0 - 0.5, 0.5):.2f}" '
            f'height="{max(base - top, 0.0):.2f}" fill="#5b8cb8" stroke="#27506f" '
            f'stroke-width="0.5"/>'
        )
    for value, label in markers or []:
        if not frame.xlo <= value <= frame.xhi:
            continue
        px = frame.px(value)
        canvas.add(
            f'<line x1="{px:.2f}" y1="{frame.py(frame.yhi):.2f}" x2="{px:.2f}" '
            f'y2="{base:.2f}" stroke="#c23b22" stroke-width="1" '
            f'stroke-dasharray="4 3"/>'
        )
        canvas.add(
            f'<text x="{px + 3:.2f}" y="{MARGIN_T + 12:.2f}" font-family="monospace" '
            f'font-size="10" fill="#c23b22">{_escape(label)}</text>'
        )
    return canvas.finish()


def tsv_table(header: list[str], rows: list[list]) -> str:
    """Tab-separated sidecar; floats keep full round-trip precision."""
    lines = ["\t".join(header)]
    for row in rows:
        lines.append("\t".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)
