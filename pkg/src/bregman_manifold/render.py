"""Minimal SVG plotting of chart-space polylines and points."""
from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

import numpy as np

STYLE = """
.primal { stroke: #d62728; fill: none; stroke-width: 1.5; }
.dual { stroke: #1f77b4; fill: none; stroke-width: 1.5; }
.curve { stroke: #2ca02c; fill: none; stroke-width: 1.2; }
.box { stroke: #7f7f7f; fill: none; stroke-width: 0.8; stroke-dasharray: 4 2; }
.axis { stroke: #000; stroke-width: 1; }
.tick { stroke: #000; stroke-width: 0.8; }
.vertex { fill: #000; }
text { font-family: sans-serif; font-size: 11px; }
"""


@dataclass
class Scene:
    """Polylines and labelled points in one chart, ready for drawing."""

    xlabel: str = "x"
    ylabel: str = "y"
    polylines: list = field(default_factory=list)
    points: list = field(default_factory=list)

    def add_polyline(self, coords, css_class: str = "curve") -> None:
        coords = np.asarray(coords, dtype=float)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise ValueError("polylines are drawn from (n, 2) coordinate arrays")
        if coords.shape[0] < 2:
            coords = np.vstack([coords, coords])
        self.polylines.append((coords, css_class))

    def add_point(self, xy, label: str = "") -> None:
        self.points.append((np.asarray(xy, dtype=float), label))

    def bounds(self):
        pts = [c for c, _ in self.polylines] + [p[None, :] for p, _ in self.points]
        allpts = np.vstack(pts)
        lo, hi = allpts.min(axis=0), allpts.max(axis=0)
        span = np.where(hi - lo > 0, hi - lo, np.maximum(np.abs(hi), 1.0))
        return lo - 0.05 * span, hi + 0.05 * span


def nice_ticks(lo: float, hi: float, target: int = 5) -> np.ndarray:
    raw = (hi - lo) / max(target, 1)
    mag = 10.0 ** np.floor(np.log10(raw))
    step = mag * min((1, 2, 5, 10), key=lambda s: abs(s * mag - raw))
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + 0.5 * step, step)


def to_svg(scene: Scene, width: int = 480, height: int = 480, pad: int = 48) -> str:
    if not scene.polylines and not scene.points:
        raise ValueError("nothing to draw")
    lo, hi = scene.bounds()
    w, h = width - 2 * pad, height - 2 * pad

    def px(xy):
        xy = np.atleast_2d(xy)
        x = pad + (xy[:, 0] - lo[0]) / (hi[0] - lo[0]) * w
        y = pad + h - (xy[:, 1] - lo[1]) / (hi[1] - lo[1]) * h
        return np.column_stack([x, y])

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(width),
                     height=str(height), viewBox=f"0 0 {width} {height}")
    ET.SubElement(svg, "style").text = STYLE
    ET.SubElement(svg, "rect", x=str(pad), y=str(pad), width=str(w), height=str(h),
                  attrib={"class": "axis", "fill": "none"})

    for t in nice_ticks(lo[0], hi[0]):
        x = px([[t, lo[1]]])[0, 0]
        ET.SubElement(svg, "line", x1=f"{x:.2f}", y1=str(pad + h), x2=f"{x:.2f}",
                      y2=str(pad + h + 5), attrib={"class": "tick"})
        ET.SubElement(svg, "text", x=f"{x:.2f}", y=str(pad + h + 18),
                      attrib={"text-anchor": "middle"}).text = f"{t:g}"
    for t in nice_ticks(lo[1], hi[1]):
        y = px([[lo[0], t]])[0, 1]
        ET.SubElement(svg, "line", x1=str(pad - 5), y1=f"{y:.2f}", x2=str(pad),
                      y2=f"{y:.2f}", attrib={"class": "tick"})
        ET.SubElement(svg, "text", x=str(pad - 8), y=f"{y + 4:.2f}",
                      attrib={"text-anchor": "end"}).text = f"{t:g}"
    ET.SubElement(svg, "text", x=str(pad + w / 2), y=str(height - 8),
                  attrib={"text-anchor": "middle"}).text = scene.xlabel
    ET.SubElement(svg, "text", x="12", y=str(pad + h / 2),
                  attrib={"text-anchor": "middle",
                          "transform": f"rotate(-90 12 {pad + h / 2})"}).text = scene.ylabel

    for coords, cls in scene.polylines:
        pts = " ".join(f"{x:.3f},{y:.3f}" for x, y in px(coords))
        ET.SubElement(svg, "polyline", points=pts, attrib={"class": cls})
    for xy, label in scene.points:
        x, y = px(xy)[0]
        ET.SubElement(svg, "circle", cx=f"{x:.3f}", cy=f"{y:.3f}", r="3",
                      attrib={"class": "vertex"})
        if label:
            ET.SubElement(svg, "text", x=f"{x + 5:.3f}", y=f"{y - 5:.3f}").text = label
    return ET.tostring(svg, encoding="unicode")
