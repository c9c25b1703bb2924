"""Hand-written SVG 1.1 figures of the planar images.

Coordinates inside the drawing are floats, but every label is the exact
rational value.  Unbounded regions are clipped to a viewport that covers all
generators plus 10% padding on each side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence
from xml.sax.saxutils import escape

from .duality import pi, slice_equation
from .linalg import unit
from .molp import ImageSet
from .polyhedra import Polyhedron, linear_image

WIDTH = HEIGHT = 480
MARGIN = 40
PAD = Fraction(1, 10)


def label(v: Sequence) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


@dataclass
class Figure:
    """Everything that goes into one planar drawing."""

    title: str
    axes: tuple[str, str]
    region: Polyhedron
    segments: list[Polyhedron] = field(default_factory=list)
    patches: list[Polyhedron] = field(default_factory=list)
    markers: list[tuple[tuple, str]] = field(default_factory=list)
    note: str = ""


def viewport(p: Polyhedron, extra: Sequence[Sequence] = ()) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """``(xmin, xmax, ymin, ymax)`` covering the generators of ``p``."""
    pts = [tuple(v) for v in p.v.vertices] + [tuple(e) for e in extra]
    if not pts:
        pts = [(Fraction(0), Fraction(0))]
    xs, ys = [x for x, _ in pts], [y for _, y in pts]
    span = max(max(xs) - min(xs), max(ys) - min(ys), Fraction(1))
    dirs = list(p.v.rays) + list(p.v.lines) + [tuple(-x for x in l) for l in p.v.lines]
    for d in dirs:
        norm = max(abs(d[0]), abs(d[1]))
        for v in p.v.vertices or [(Fraction(0), Fraction(0))]:
            xs.append(v[0] + d[0] * span / norm)
            ys.append(v[1] + d[1] * span / norm)
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - span / 2, x1 + span / 2
    if y1 == y0:
        y0, y1 = y0 - span / 2, y1 + span / 2
    px, py = (x1 - x0) * PAD, (y1 - y0) * PAD
    return x0 - px, x1 + px, y0 - py, y1 + py


def clip(p: Polyhedron, box) -> Polyhedron:
    x0, x1, y0, y1 = box
    return p.intersect(ineqs=[((1, 0), x0), ((-1, 0), -x1), ((0, 1), y0), ((0, -1), -y1)])


def _ordered(points: Sequence[Sequence]) -> list:
    if len(points) < 3:
        return list(points)
    cx = sum(float(p[0]) for p in points) / len(points)
    cy = sum(float(p[1]) for p in points) / len(points)
    return sorted(points, key=lambda p: math.atan2(float(p[1]) - cy, float(p[0]) - cx))


def render(fig: Figure) -> str:
    box = viewport(fig.region, [m[0] for m in fig.markers])
    x0, x1, y0, y1 = box
    sx = (WIDTH - 2 * MARGIN) / float(x1 - x0)
    sy = (HEIGHT - 2 * MARGIN) / float(y1 - y0)

    def xy(p) -> str:
        return f"{MARGIN + (float(p[0]) - float(x0)) * sx:.3f},{HEIGHT - MARGIN - (float(p[1]) - float(y0)) * sy:.3f}"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f"<title>{escape(fig.title)}</title>",
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{WIDTH - 2 * MARGIN}" height="{HEIGHT - 2 * MARGIN}" '
        'fill="none" stroke="#bbbbbb"/>',
    ]
    if x0 < 0 < x1:
        ax = xy((0, y0)).split(",")[0]
        out.append(f'<line class="axis" x1="{ax}" y1="{HEIGHT - MARGIN}" x2="{ax}" y2="{MARGIN}" stroke="#dddddd"/>')
    if y0 < 0 < y1:
        ay = xy((x0, 0)).split(",")[1]
        out.append(f'<line class="axis" x1="{MARGIN}" y1="{ay}" x2="{WIDTH - MARGIN}" y2="{ay}" stroke="#dddddd"/>')
    region = clip(fig.region, box) if not fig.region.empty else fig.region
    if not region.empty:
        pts = " ".join(xy(p) for p in _ordered(region.v.vertices))
        out.append(f'<polygon class="region" points="{pts}" fill="#dce9f7" stroke="#4a78b0"/>')
    for patch in fig.patches:
        pts = " ".join(xy(p) for p in _ordered(clip(patch, box).v.vertices))
        out.append(f'<polygon class="highlight" points="{pts}" fill="#f4c7a1" stroke="#c0392b"/>')
    for seg in fig.segments:
        ends = clip(seg, box).v.vertices
        if len(ends) == 2:
            a, b = (xy(p).split(",") for p in ends)
            out.append(f'<line class="highlight" x1="{a[0]}" y1="{a[1]}" x2="{b[0]}" y2="{b[1]}" '
                       'stroke="#c0392b" stroke-width="3"/>')
    for p, text in fig.markers:
        cx, cy = xy(p).split(",")
        out.append(f'<circle class="vertex" cx="{cx}" cy="{cy}" r="4" fill="#c0392b"/>')
        out.append(f'<text class="label" x="{float(cx) + 6:.3f}" y="{float(cy) - 6:.3f}" '
                   f'font-family="sans-serif" font-size="12">{escape(text)}</text>')
    out.append(f'<text x="{MARGIN}" y="{MARGIN - 14}" font-family="sans-serif" font-size="14">'
               f"{escape(fig.title)}</text>")
    if fig.note:
        out.append(f'<text x="{MARGIN}" y="{HEIGHT - 10}" font-family="sans-serif" font-size="11">'
                   f"{escape(fig.note)}</text>")
    out.append(f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 16}" font-family="sans-serif" '
               f'font-size="12" text-anchor="end">{escape(fig.axes[0])}</text>')
    out.append(f'<text x="{MARGIN - 6}" y="{MARGIN + 12}" font-family="sans-serif" font-size="12" '
               f'text-anchor="end">{escape(fig.axes[1])}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _face_poly(img: ImageSet, i: int, project=None) -> Polyhedron:
    f, v = img.lattice[i], img.poly.v
    poly = Polyhedron.from_generators(
        [v.vertices[k] for k in sorted(f.vertices)],
        [v.rays[k] for k in sorted(f.rays)],
        v.lines,
        dim=img.poly.dim,
    )
    return poly if project is None else linear_image(poly, project)


def _flagged(img: ImageSet, attr: str) -> list[int]:
    return [i for i, f in enumerate(img.lattice) if i != img.lattice.full and getattr(f.flags, attr)]


def _empty_figure(title: str, axes) -> Figure:
    return Figure(title, axes, Polyhedron.from_generators((), dim=2), note="image is empty")


def primal_figure(pimg: ImageSet) -> Figure:
    if pimg.empty:
        return _empty_figure("upper image", ("y1", "y2"))
    picked = _flagged(pimg, "weakly_minimal")
    fig = Figure("upper image: weakly minimal boundary", ("y1", "y2"), pimg.poly)
    for i in picked:
        f = pimg.lattice[i]
        if f.dim == 1:
            fig.segments.append(_face_poly(pimg, i))
        elif f.dim == 0:
            p = pimg.poly.v.vertices[next(iter(f.vertices))]
            fig.markers.append((p, label(p)))
    return fig


def dual_figure(dimg: ImageSet) -> Figure:
    q = dimg.poly.dim if not dimg.empty else 2
    axes = ("y*1", "y*2")
    if dimg.empty:
        return _empty_figure("geometric lower image", axes)
    picked = _flagged(dimg, "k_maximal")
    if q == 2:
        fig = Figure("geometric lower image: K-maximal boundary", axes, dimg.poly)
        proj = None
    else:
        proj = (unit(3, 0), unit(3, 1))
        fig = Figure("geometric lower image: K-maximal faces projected to (y*1, y*2)", axes,
                     linear_image(dimg.poly, proj))
    for i in picked:
        f = dimg.lattice[i]
        if f.dim == 0:
            p = dimg.poly.v.vertices[next(iter(f.vertices))]
            fig.markers.append((p[:2] if proj else p, label(p)))
        elif f.dim == 1:
            fig.segments.append(_face_poly(dimg, i, proj))
        elif f.dim == 2 and proj:
            fig.patches.append(_face_poly(dimg, i, proj))
    return fig


def parametric_figure(dbar: ImageSet) -> Figure:
    """The slice of the parametric image by ``sum(w) = 1`` in the ``(w1, t)`` chart."""
    axes = ("w1", "t")
    if dbar.empty:
        return _empty_figure("parametric lower image", axes)
    q = dbar.poly.dim - 1
    chart = (unit(q + 1, 0), unit(q + 1, q))
    cut = dbar.poly.intersect(eqs=[slice_equation(q)])
    fig = Figure("parametric lower image cut with sum(w) = 1, chart (w1, t)", axes,
                 linear_image(cut, chart), note="this slice coincides with the geometric lower image")
    for i in _flagged(dbar, "orthant_maximal"):
        f = dbar.lattice[i]
        if f.dim == 0:
            p = dbar.poly.v.vertices[next(iter(f.vertices))]
            fig.markers.append((pi(p), label(p)))
        elif f.dim == 1:
            fig.segments.append(_face_poly(dbar, i, chart))
    return fig
