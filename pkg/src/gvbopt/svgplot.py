"""Self-contained SVG line charts.

Just enough plotting for injection profiles: stacked panels, each with axes,
ticks, a handful of curves, and a legend.  Output is deterministic text so
rendered files diff cleanly between runs.
"""

from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#17becf",
    "#bcbd22",
)


@dataclass
class Curve:
    label: str
    points: list
    color: str
    dashed: bool = False


@dataclass
class Panel:
    title: str
    curves: list = field(default_factory=list)
    xlim: tuple = (0.0, 1.0)
    ylim: tuple = (0.0, 1.0)
    xlabel: str = "concentration c"
    ylabel: str = "switch time T"


_WIDTH = 660
_PANEL_H = 430
_MARGIN_L = 62
_MARGIN_R = 18
_MARGIN_T = 40
_MARGIN_B = 48


def _fmt(v):
    return f"{v:.2f}".rstrip("0").rstrip(".") if v == v else "nan"


def _ticks(lo, hi, count=6):
    return np.linspace(lo, hi, count)


def _panel_svg(panel, y_off):
    x0, x1 = _MARGIN_L, _WIDTH - _MARGIN_R
    y0, y1 = y_off + _PANEL_H - _MARGIN_B, y_off + _MARGIN_T
    xlo, xhi = panel.xlim
    ylo, yhi = panel.ylim

    def sx(v):
        return x0 + (v - xlo) / (xhi - xlo) * (x1 - x0)

    def sy(v):
        return y0 + (v - ylo) / (yhi - ylo) * (y1 - y0)

    parts = []
    parts.append(
        f'<text x="{(x0 + x1) / 2:.1f}" y="{y_off + 22}" text-anchor="middle" '
        f'font-size="14" font-weight="bold">{escape(panel.title)}</text>'
    )
    for tx in _ticks(xlo, xhi):
        px = sx(tx)
        parts.append(
            f'<line x1="{px:.1f}" y1="{y0:.1f}" x2="{px:.1f}" y2="{y1:.1f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px:.1f}" y="{y0 + 16:.1f}" text-anchor="middle" '
            f'font-size="11">{_fmt(tx)}</text>'
        )
    for ty in _ticks(ylo, yhi):
        py = sy(ty)
        parts.append(
            f'<line x1="{x0:.1f}" y1="{py:.1f}" x2="{x1:.1f}" y2="{py:.1f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x0 - 6:.1f}" y="{py + 4:.1f}" text-anchor="end" '
            f'font-size="11">{_fmt(ty)}</text>'
        )
    parts.append(
        f'<rect x="{x0:.1f}" y="{y1:.1f}" width="{x1 - x0:.1f}" '
        f'height="{y0 - y1:.1f}" fill="none" stroke="#333333" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="{(x0 + x1) / 2:.1f}" y="{y0 + 36:.1f}" text-anchor="middle" '
        f'font-size="12">{escape(panel.xlabel)}</text>'
    )
    parts.append(
        f'<text x="{x0 - 44:.1f}" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
        f'font-size="12" transform="rotate(-90 {x0 - 44:.1f} '
        f'{(y0 + y1) / 2:.1f})">{escape(panel.ylabel)}</text>'
    )

    for curve in panel.curves:
        coords = " ".join(f"{sx(px):.2f},{sy(py):.2f}" for px, py in curve.points)
        dash = ' stroke-dasharray="6,4"' if curve.dashed else ""
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{curve.color}" '
            f'stroke-width="1.6"{dash}/>'
        )

    lx, ly = x0 + 10, y1 + 12
    for i, curve in enumerate(panel.curves):
        cy = ly + 16 * i
        dash = ' stroke-dasharray="6,4"' if curve.dashed else ""
        parts.append(
            f'<line x1="{lx:.1f}" y1="{cy:.1f}" x2="{lx + 22:.1f}" y2="{cy:.1f}" '
            f'stroke="{curve.color}" stroke-width="1.6"{dash}/>'
        )
        parts.append(
            f'<text x="{lx + 28:.1f}" y="{cy + 4:.1f}" font-size="11">'
            f"{escape(curve.label)}</text>"
        )
    return "\n".join(parts)


def render_svg(panels, path):
    """Write stacked chart panels to an SVG file."""
    height = _PANEL_H * len(panels)
    chunks = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{height}" viewBox="0 0 {_WIDTH} {height}" '
        f'font-family="sans-serif">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{height}" fill="white"/>',
    ]
    for i, panel in enumerate(panels):
        chunks.append(_panel_svg(panel, i * _PANEL_H))
    chunks.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(chunks))
        fh.write("\n")
