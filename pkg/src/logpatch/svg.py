"""Small deterministic SVG 1.1 writer for log-paper figures.

Output depends only on the drawing calls: floats are printed with 9
significant digits, element order is call order, and nothing time- or
platform-dependent is emitted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape, quoteattr

__all__ = ["fmt", "grid_step", "Panel", "Figure"]

PALETTE = ("#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#16a085")


def fmt(x: float) -> str:
    s = f"{float(x):.9g}"
    return "0" if s == "-0" else s


def grid_step(span: float, max_lines: int = 40) -> float:
    """Unit spacing unless that would draw more than ``max_lines`` lines."""
    step = 1.0
    for mult in (2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0):
        if span / step <= max_lines:
            break
        step = mult
    while span / step > max_lines:
        step *= 10.0
    return step


@dataclass
class Panel:
    """One framed plot with world window ``(x0, x1, y0, y1)``."""

    title: str
    window: tuple[float, float, float, float]
    xlabel: str = "u"
    ylabel: str = "v"
    grid: bool = True
    items: list[tuple] = field(default_factory=list)
    legend: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        x0, x1, y0, y1 = (float(c) for c in self.window)
        if not all(math.isfinite(c) for c in (x0, x1, y0, y1)) or x1 <= x0 or y1 <= y0:
            raise ValueError(f"bad panel window {self.window}")
        self.window = (x0, x1, y0, y1)

    def polyline(self, points, color="#000000", width=1.5, dash=None, label=None, closed=False):
        pts = [(float(x), float(y)) for x, y in points]
        if len(pts) >= 2:
            self.items.append(("poly", pts, color, width, dash, closed))
        if label:
            self.legend.append((label, color))

    def segment(self, a, b, color="#000000", width=1.0, dash=None):
        self.polyline([a, b], color, width, dash)

    def marker(self, x, y, color="#000000", radius=3.0, fill=True):
        self.items.append(("dot", (float(x), float(y)), color, radius, fill))

    def text(self, x, y, s: str, color="#000000", size=11):
        self.items.append(("text", (float(x), float(y)), s, color, size))


class Figure:
    def __init__(self, panels: Sequence[Panel], size: float = 340.0, columns: int | None = None):
        if not panels:
            raise ValueError("a figure needs at least one panel")
        self.panels = list(panels)
        self.size = float(size)
        self.columns = columns or min(len(self.panels), 3)

    def render(self) -> str:
        pad, head = 36.0, 24.0
        cell = self.size + 2 * pad
        rows = -(-len(self.panels) // self.columns)
        width, height = cell * self.columns, (cell + head) * rows
        out = [
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{fmt(width)}" '
            f'height="{fmt(height)}" viewBox="0 0 {fmt(width)} {fmt(height)}">',
            f'<rect x="0" y="0" width="{fmt(width)}" height="{fmt(height)}" fill="#ffffff"/>',
        ]
        for n, panel in enumerate(self.panels):
            ox = (n % self.columns) * cell + pad
            oy = (n // self.columns) * (cell + head) + pad + head
            out.extend(self._panel(n, panel, ox, oy))
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.render(), encoding="utf-8")

    def _panel(self, n: int, p: Panel, ox: float, oy: float) -> Iterable[str]:
        x0, x1, y0, y1 = p.window
        s = self.size
        sx, sy = s / (x1 - x0), s / (y1 - y0)

        def X(x: float) -> str:
            return fmt(ox + (x - x0) * sx)

        def Y(y: float) -> str:
            return fmt(oy + (y1 - y) * sy)

        clip = f"clip{n}"
        yield f'<g id="panel{n}">'
        yield f'<clipPath id="{clip}"><rect x="{fmt(ox)}" y="{fmt(oy)}" width="{fmt(s)}" height="{fmt(s)}"/></clipPath>'
        yield f'<text x="{fmt(ox + s / 2)}" y="{fmt(oy - 10)}" text-anchor="middle" font-family="sans-serif" font-size="13">{escape(p.title)}</text>'
        if p.grid:
            for axis, lo, hi in (("x", x0, x1), ("y", y0, y1)):
                step = grid_step(hi - lo)
                k = math.ceil(lo / step - 1e-9)
                while k * step <= hi + 1e-9:
                    c = k * step
                    strong = k == 0
                    style = 'stroke="#888888" stroke-width="1"' if strong else 'stroke="#dddddd" stroke-width="0.5"'
                    if axis == "x":
                        yield f'<line x1="{X(c)}" y1="{fmt(oy)}" x2="{X(c)}" y2="{fmt(oy + s)}" {style}/>'
                    else:
                        yield f'<line x1="{fmt(ox)}" y1="{Y(c)}" x2="{fmt(ox + s)}" y2="{Y(c)}" {style}/>'
                    k += 1
        yield f'<rect x="{fmt(ox)}" y="{fmt(oy)}" width="{fmt(s)}" height="{fmt(s)}" fill="none" stroke="#000000" stroke-width="1"/>'
        for label, x, y in ((fmt(x0), ox, oy + s + 14), (fmt(x1), ox + s, oy + s + 14)):
            yield f'<text x="{fmt(x)}" y="{fmt(y)}" text-anchor="middle" font-family="sans-serif" font-size="10">{label}</text>'
        for label, y in ((fmt(y0), oy + s), (fmt(y1), oy + 8)):
            yield f'<text x="{fmt(ox - 4)}" y="{fmt(y)}" text-anchor="end" font-family="sans-serif" font-size="10">{label}</text>'
        yield f'<text x="{fmt(ox + s / 2)}" y="{fmt(oy + s + 26)}" text-anchor="middle" font-family="sans-serif" font-size="11">{escape(p.xlabel)}</text>'
        yield f'<text x="{fmt(ox - 24)}" y="{fmt(oy + s / 2)}" text-anchor="middle" font-family="sans-serif" font-size="11">{escape(p.ylabel)}</text>'
        yield f'<g clip-path="url(#{clip})" fill="none" stroke-linejoin="round" stroke-linecap="round">'
        for item in p.items:
            kind = item[0]
            if kind == "poly":
                _, pts, color, width, dash, closed = item
                coords = " ".join(f"{X(x)},{Y(y)}" for x, y in pts)
                tag = "polygon" if closed else "polyline"
                extra = f' stroke-dasharray="{dash}"' if dash else ""
                yield f'<{tag} points="{coords}" stroke={quoteattr(color)} stroke-width="{fmt(width)}"{extra}/>'
            elif kind == "dot":
                _, (x, y), color, r, fill = item
                paint = f"fill={quoteattr(color)}" if fill else f'fill="#ffffff" stroke={quoteattr(color)}'
                yield f'<circle cx="{X(x)}" cy="{Y(y)}" r="{fmt(r)}" {paint}/>'
            else:
                _, (x, y), text, color, size = item
                yield f'<text x="{X(x)}" y="{Y(y)}" fill={quoteattr(color)} stroke="none" font-family="sans-serif" font-size="{fmt(size)}" text-anchor="middle">{escape(text)}</text>'
        yield "</g>"
        for i, (label, color) in enumerate(p.legend):
            y = oy + 14 + 14 * i
            yield f'<line x1="{fmt(ox + 8)}" y1="{fmt(y - 4)}" x2="{fmt(ox + 26)}" y2="{fmt(y - 4)}" stroke={quoteattr(color)} stroke-width="2"/>'
            yield f'<text x="{fmt(ox + 30)}" y="{fmt(y)}" font-family="sans-serif" font-size="10">{escape(label)}</text>'
        yield "</g>"
