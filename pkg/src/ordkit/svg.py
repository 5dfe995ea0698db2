"""Small deterministic SVG emitters for orbit tables and circle diagrams."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence
from xml.sax.saxutils import escape

from .circular import INF


def _header(w: int, h: int) -> list[str]:
    return [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">']


def orbit_svg(values: Sequence[Fraction], x0: Fraction, gap: tuple | None = None, width: int = 900) -> str:
    """Orbit points on a line; ``gap`` (left, right) is shaded."""
    lo, hi = min(values), max(values)
    span = (hi - lo) or 1
    pad = 20

    def x(v) -> float:
        return pad + float((v - lo) / span) * (width - 2 * pad)

    out = _header(width, 80)
    out.append(f'<line x1="{pad}" y1="40" x2="{width - pad}" y2="40" stroke="#888"/>')
    if gap is not None:
        a = lo if gap[0] is None else gap[0]
        b = hi if gap[1] is None else gap[1]
        out.append(f'<rect x="{x(a):.3f}" y="30" width="{x(b) - x(a):.3f}" height="20" fill="#fdd"/>')
    for v in values:
        out.append(f'<line x1="{x(v):.3f}" y1="34" x2="{x(v):.3f}" y2="46" stroke="#000" stroke-width="0.5"/>')
    out.append(f'<circle cx="{x(x0):.3f}" cy="40" r="3" fill="#c00"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def boundary_angle(p) -> float:
    """Counterclockwise angle of a boundary point, 0 at 0 and pi at infinity."""
    if p is INF:
        return math.pi
    return 2 * math.atan(float(p))


def circle_svg(labelled_points: Sequence[tuple[str, object]], arcs: Sequence[tuple[object, object]] = (), size: int = 600) -> str:
    """Points of the boundary circle with labels, plus highlighted ccw arcs."""
    c = size / 2
    r = size / 2 - 80

    def xy(theta: float, rad: float = r) -> tuple[float, float]:
        return c + rad * math.cos(theta), c - rad * math.sin(theta)

    out = _header(size, size)
    out.append(f'<circle cx="{c}" cy="{c}" r="{r}" fill="none" stroke="#888"/>')
    for left, right in arcs:
        a0, a1 = boundary_angle(left), boundary_angle(right)
        if a1 <= a0:
            a1 += 2 * math.pi
        (x0, y0), (x1, y1) = xy(a0, r + 6), xy(a1, r + 6)
        large = 1 if a1 - a0 > math.pi else 0
        out.append(
            f'<path d="M {x0:.3f} {y0:.3f} A {r + 6} {r + 6} 0 {large} 0 {x1:.3f} {y1:.3f}" '
            'fill="none" stroke="#36c" stroke-width="3"/>'
        )
    for label, p in labelled_points:
        theta = boundary_angle(p)
        x, y = xy(theta)
        lx, ly = xy(theta, r + 30)
        out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="3" fill="#000"/>')
        out.append(
            f'<text x="{lx:.3f}" y="{ly:.3f}" font-size="11" text-anchor="middle">{escape(label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
