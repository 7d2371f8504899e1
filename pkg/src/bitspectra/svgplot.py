"""Minimal self-contained SVG log-log scatter plots.

No plotting toolkit: documents are built with ElementTree, so output is
always well-formed XML. Values at or below zero cannot sit on a log
axis; they are clamped to the floor value and drawn with an open
diamond so the clamp is visible.
"""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from typing import Iterable, Sequence

DEFAULT_PALETTE = (
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#444444",
)

_SVG_NS = "http://www.w3.org/2000/svg"


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def _decade_label(parent: ET.Element, x: float, y: float, exponent: int, anchor: str) -> None:
    text = ET.SubElement(
        parent, "text",
        {"x": _fmt(x), "y": _fmt(y), "text-anchor": anchor, "font-size": "12"},
    )
    text.text = "10"
    sup = ET.SubElement(text, "tspan", {"dy": "-5", "font-size": "9"})
    sup.text = str(exponent)


def scatter_loglog(
    points: Iterable[tuple[float, float, str]],
    title: str,
    xlabel: str,
    ylabel: str,
    guides: Sequence[tuple[str, float, float]] = (),
    series_colors: dict[str, str] | None = None,
    width: int = 880,
    height: int = 640,
    clamp_floor: float = 1.0,
) -> str:
    """Render (x, y, series) triples on log-log axes.

    guides are (label, coeff, exponent) straight lines y = coeff * x**exponent,
    clipped to the plot box. Returns the SVG document as a string.
    """
    pts = list(points)
    if not pts:
        raise ValueError("no points to plot")

    clamped = [(x, clamp_floor, s) for x, y, s in pts if y <= 0.0]
    kept = [(x, y, s) for x, y, s in pts if y > 0.0]
    series_names = []
    for _, _, s in pts:
        if s not in series_names:
            series_names.append(s)
    colors = dict(series_colors or {})
    for i, name in enumerate(series_names):
        colors.setdefault(name, DEFAULT_PALETTE[i % len(DEFAULT_PALETTE)])

    xs = [x for x, _, _ in pts]
    ys = [y for _, y, _ in kept] or [clamp_floor]
    if clamped:
        ys.append(clamp_floor)
    x_lo = math.floor(math.log10(min(xs)))
    x_hi = max(math.ceil(math.log10(max(xs))), x_lo + 1)
    y_lo = math.floor(math.log10(min(ys)))
    y_hi = max(math.ceil(math.log10(max(ys))), y_lo + 1)

    ml, mr, mt, mb = 72, 24, 44, 56
    pw, ph = width - ml - mr, height - mt - mb

    def px(x: float) -> float:
        return ml + (math.log10(x) - x_lo) / (x_hi - x_lo) * pw

    def py(y: float) -> float:
        return mt + (1.0 - (math.log10(y) - y_lo) / (y_hi - y_lo)) * ph

    root = ET.Element(
        "svg",
        {
            "xmlns": _SVG_NS,
            "width": str(width),
            "height": str(height),
            "viewBox": f"0 0 {width} {height}",
            "font-family": "sans-serif",
        },
    )
    ET.SubElement(root, "rect", {"width": str(width), "height": str(height), "fill": "white"})
    title_el = ET.SubElement(
        root, "text",
        {"x": _fmt(width / 2), "y": "24", "text-anchor": "middle", "font-size": "16"},
    )
    title_el.text = title

    axes = ET.SubElement(root, "g", {"stroke": "#222", "fill": "none"})
    ET.SubElement(
        axes, "rect",
        {"x": str(ml), "y": str(mt), "width": _fmt(pw), "height": _fmt(ph), "stroke-width": "1"},
    )

    grid = ET.SubElement(root, "g", {"stroke": "#ddd", "stroke-width": "0.6"})
    labels = ET.SubElement(root, "g", {"fill": "#222"})
    for d in range(x_lo, x_hi + 1):
        gx = px(10.0**d)
        ET.SubElement(grid, "line", {"x1": _fmt(gx), "y1": str(mt), "x2": _fmt(gx), "y2": _fmt(mt + ph)})
        _decade_label(labels, gx, mt + ph + 20, d, "middle")
        if x_hi - x_lo <= 7:
            for k in range(2, 10):
                sub = 10.0**d * k
                if math.log10(sub) <= x_hi:
                    sx = px(sub)
                    ET.SubElement(grid, "line", {"x1": _fmt(sx), "y1": _fmt(mt + ph - 4),
                                                 "x2": _fmt(sx), "y2": _fmt(mt + ph)})
    for d in range(y_lo, y_hi + 1):
        gy = py(10.0**d)
        ET.SubElement(grid, "line", {"x1": str(ml), "y1": _fmt(gy), "x2": _fmt(ml + pw), "y2": _fmt(gy)})
        _decade_label(labels, ml - 10, gy + 4, d, "end")

    xl = ET.SubElement(
        root, "text",
        {"x": _fmt(ml + pw / 2), "y": _fmt(height - 14), "text-anchor": "middle", "font-size": "13"},
    )
    xl.text = xlabel
    yl = ET.SubElement(
        root, "text",
        {
            "x": "20", "y": _fmt(mt + ph / 2), "text-anchor": "middle", "font-size": "13",
            "transform": f"rotate(-90 20 {_fmt(mt + ph / 2)})",
        },
    )
    yl.text = ylabel

    guide_group = ET.SubElement(
        root, "g",
        {"stroke": "#888", "stroke-width": "1", "stroke-dasharray": "6 4", "fill": "#666"},
    )
    for label, coeff, exponent in guides:
        # In log space the guide is Y = log10(coeff) + exponent * X; clip to the box.
        b = math.log10(coeff)
        lo_x, hi_x = float(x_lo), float(x_hi)
        if exponent != 0.0:
            bounds = sorted(((y_lo - b) / exponent, (y_hi - b) / exponent))
            lo_x, hi_x = max(lo_x, bounds[0]), min(hi_x, bounds[1])
        elif not (y_lo <= b <= y_hi):
            continue
        if lo_x >= hi_x:
            continue
        x1, y1 = px(10.0**lo_x), py(10.0 ** (b + exponent * lo_x))
        x2, y2 = px(10.0**hi_x), py(10.0 ** (b + exponent * hi_x))
        ET.SubElement(guide_group, "line", {"x1": _fmt(x1), "y1": _fmt(y1), "x2": _fmt(x2), "y2": _fmt(y2)})
        anchor = ET.SubElement(
            guide_group, "text",
            {"x": _fmt(x2 - 4), "y": _fmt(y2 - 6), "text-anchor": "end",
             "font-size": "11", "stroke": "none"},
        )
        anchor.text = label

    dots = ET.SubElement(root, "g", {"stroke": "none"})
    for x, y, s in kept:
        ET.SubElement(
            dots, "circle",
            {"cx": _fmt(px(x)), "cy": _fmt(py(y)), "r": "3",
             "fill": colors[s], "fill-opacity": "0.75"},
        )
    for x, y, s in clamped:
        cx, cy = px(x), py(y)
        path = f"M {_fmt(cx)} {_fmt(cy - 4.5)} L {_fmt(cx + 4.5)} {_fmt(cy)} " \
               f"L {_fmt(cx)} {_fmt(cy + 4.5)} L {_fmt(cx - 4.5)} {_fmt(cy)} Z"
        ET.SubElement(dots, "path", {"d": path, "fill": "none",
                                     "stroke": colors[s], "stroke-width": "1.4"})

    legend = ET.SubElement(root, "g", {"font-size": "12"})
    ly = mt + 16
    for name in series_names:
        ET.SubElement(legend, "circle", {"cx": _fmt(ml + pw - 130), "cy": _fmt(ly - 4),
                                         "r": "4", "fill": colors[name]})
        item = ET.SubElement(legend, "text", {"x": _fmt(ml + pw - 120), "y": _fmt(ly)})
        item.text = name or "(unlabeled)"
        ly += 18
    if clamped:
        note = ET.SubElement(legend, "text", {"x": _fmt(ml + pw - 134), "y": _fmt(ly),
                                              "fill": "#555"})
        note.text = f"open diamonds: value <= 0, clamped to {_fmt(clamp_floor)}"

    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"
