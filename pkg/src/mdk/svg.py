"""Deterministic SVG emission for the three standard pictures.

All coordinates are formatted to 9 significant digits and elements are
emitted in a fixed order, so identical inputs produce byte-identical
documents.  Torus pictures use the unit square scaled by 512; x-plane
pictures auto-scale to the data bounding box with a 10% margin.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .coamoeba import fundamental_triangles, vertex_rays
from .dimer import DimerModel, Matching
from .lattice import NormalizedTriangle
from .tracing import MatchingPath, Trajectory

TORUS_SIZE = 512.0


def _fmt(x: float) -> str:
    return format(float(x), ".9g")


def _header(width: float, height: float) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f'<rect width="{_fmt(width)}" height="{_fmt(height)}" fill="white"/>',
    ]


def _polyline(points, stroke: str, width: float, fill: str = "none", extra: str = "") -> str:
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    return (
        f'<polyline points="{pts}" fill="{fill}" stroke="{stroke}" '
        f'stroke-width="{_fmt(width)}"{extra}/>'
    )


def _polygon(points, fill: str, stroke: str = "none", opacity: float = 1.0) -> str:
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    return f'<polygon points="{pts}" fill="{fill}" stroke="{stroke}" fill-opacity="{_fmt(opacity)}"/>'


def _circle(cx: float, cy: float, r: float, fill: str, stroke: str = "black") -> str:
    return (
        f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(r)}" fill="{fill}" '
        f'stroke="{stroke}" stroke-width="1"/>'
    )


# -- x-plane pictures ----------------------------------------------------------


def render_trajectories(traj: Trajectory, size: float = 640.0) -> str:
    """Branch-point trajectories in the x-plane with collision markers."""
    xs = [z for roots in traj.roots for z in roots]
    re = [z.real for z in xs]
    im = [z.imag for z in xs]
    lo_x, hi_x = min(re), max(re)
    lo_y, hi_y = min(im), max(im)
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-9)
    margin = 0.1 * span
    lo_x -= margin
    lo_y -= margin
    span += 2 * margin
    scale = size / span

    def to_px(z: complex) -> tuple[float, float]:
        return ((z.real - lo_x) * scale, size - (z.imag - lo_y) * scale)

    out = _header(size, size)
    for i in range(traj.degree):
        path = [to_px(z) for z in traj.root_path(i)]
        out.append(_polyline(path, stroke="#1f4e79", width=1.2))
        x0, y0 = path[0]
        out.append(_circle(x0, y0, 3.0, fill="#1f4e79", stroke="none"))
    for ev in traj.collisions:
        cx, cy = to_px(ev.location)
        out.append(_circle(cx, cy, 5.0, fill="#d62728"))
    out.append("</svg>")
    return "\n".join(out)


def render_matching_path(mp: MatchingPath, size: float = 640.0) -> str:
    """The full trajectory picture with the merging pair's arc emphasized."""
    base = render_trajectories(mp.trajectory, size=size).splitlines()
    xs = [z for roots in mp.trajectory.roots for z in roots]
    re = [z.real for z in xs]
    im = [z.imag for z in xs]
    lo_x, hi_x = min(re), max(re)
    lo_y, hi_y = min(im), max(im)
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-9)
    margin = 0.1 * span
    lo_x -= margin
    lo_y -= margin
    span += 2 * margin
    scale = size / span

    def to_px(z: complex) -> tuple[float, float]:
        return ((z.real - lo_x) * scale, size - (z.imag - lo_y) * scale)

    arc = [to_px(z) for z in mp.polyline]
    base.insert(-1, _polyline(arc, stroke="#d62728", width=2.4))
    return "\n".join(base)


# -- torus pictures ------------------------------------------------------------


def _torus_px(pt) -> tuple[float, float]:
    x = float(pt[0]) % 1.0
    y = float(pt[1]) % 1.0
    return (x * TORUS_SIZE, TORUS_SIZE - y * TORUS_SIZE)


def render_coamoeba(
    nt: NormalizedTriangle,
    curve_points=None,
    show_rays: bool = True,
    size: float = TORUS_SIZE,
) -> str:
    """The 2n coamoeba triangles in the unit square, with optional
    overlaid projected cycle and ray argument marks."""
    out = _header(size, size)
    out.append(f'<rect width="{_fmt(size)}" height="{_fmt(size)}" fill="none" stroke="#888" stroke-width="1"/>')
    tris = fundamental_triangles(nt)
    for tri in tris:
        # draw each triangle in all wraparound copies that touch the square
        color = "#7fb2d9" if tri.orientation > 0 else "#e8a87c"
        bx, by = tri.barycenter
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                pts = []
                visible = False
                for vx, vy in tri.vertices:
                    px = float(vx) + dx
                    py = float(vy) + dy
                    if -0.05 <= px <= 1.05 and -0.05 <= py <= 1.05:
                        visible = True
                    pts.append((px * size, size - py * size))
                if visible:
                    out.append(_polygon(pts, fill=color, opacity=0.85))
    if show_rays:
        for ray in vertex_rays(nt):
            theta = 2 * math.pi * float(ray.turn)
            x = 0.5 + 0.5 * math.cos(theta)
            y = 0.5 + 0.5 * math.sin(theta)
            out.append(
                f'<line x1="{_fmt(size / 2)}" y1="{_fmt(size / 2)}" '
                f'x2="{_fmt(x * size)}" y2="{_fmt(size - y * size)}" '
                f'stroke="#cccccc" stroke-width="0.5"/>'
            )
    if curve_points is not None:
        segments: list[list[tuple[float, float]]] = [[]]
        prev = None
        for pt in curve_points:
            x = float(pt[0]) % 1.0
            y = float(pt[1]) % 1.0
            if prev is not None and (abs(x - prev[0]) > 0.5 or abs(y - prev[1]) > 0.5):
                segments.append([])
            segments[-1].append((x * size, size - y * size))
            prev = (x, y)
        for seg in segments:
            if len(seg) > 1:
                out.append(_polyline(seg, stroke="#2ca02c", width=2.0))
    out.append("</svg>")
    return "\n".join(out)


def render_dimer(
    g: DimerModel,
    matching: Matching | None = None,
    size: float = TORUS_SIZE,
) -> str:
    """The honeycomb on the unit square; matched edges drawn bold."""
    out = _header(size, size)
    out.append(f'<rect width="{_fmt(size)}" height="{_fmt(size)}" fill="none" stroke="#888" stroke-width="1"/>')
    for e in g.edges:
        w = g.node_by_id[e.white].pos
        b = g.node_by_id[e.black].pos
        via = e.via if e.via is not None else None
        chain = [w, via, (b[0] + e.offset[0], b[1] + e.offset[1])] if via else [
            w,
            (b[0] + e.offset[0], b[1] + e.offset[1]),
        ]
        in_match = matching is not None and e.id in matching
        stroke = "#d62728" if in_match else "#555555"
        width = 4.0 if in_match else 1.5
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                pts = [((float(p[0]) + dx) * size, size - (float(p[1]) + dy) * size) for p in chain]
                if any(-0.05 * size <= x <= 1.05 * size and -0.05 * size <= y <= 1.05 * size for x, y in pts):
                    out.append(_polyline(pts, stroke=stroke, width=width))
    for v in g.nodes:
        cx, cy = _torus_px(v.pos)
        fill = "white" if v.color == "white" else "black"
        out.append(_circle(cx, cy, 7.0, fill=fill))
    out.append("</svg>")
    return "\n".join(out)
