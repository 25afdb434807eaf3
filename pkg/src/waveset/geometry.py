"""Exact planar convex-polygon helpers over Fraction (or mpf) coordinates."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Point = tuple


def shoelace(poly: Sequence[Point]):
    """Signed area (positive for counter-clockwise vertex order)."""
    n = len(poly)
    if n < 3:
        return Fraction(0)
    s = poly[0][0] * 0
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return s / 2


def area(poly: Sequence[Point]):
    return abs(shoelace(poly))


def clip_halfplane(poly: Sequence[Point], a, b, c) -> list[Point]:
    """Keep the part of ``poly`` with ``a*x + b*y <= c`` (Sutherland-Hodgman).

    Degenerate results (fewer than three vertices) come back empty.
    """
    out: list[Point] = []
    n = len(poly)
    if n == 0:
        return out
    vals = [a * p[0] + b * p[1] - c for p in poly]
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        vp, vq = vals[i], vals[(i + 1) % n]
        if vp <= 0:
            out.append(p)
        if (vp < 0 < vq) or (vq < 0 < vp):
            t = vp / (vp - vq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return dedupe(out)


def dedupe(poly: Sequence[Point]) -> list[Point]:
    out: list[Point] = []
    for p in poly:
        if not out or out[-1] != p:
            out.append(p)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    # drop collinear vertices so equal polygons compare equal
    changed = True
    while changed and len(out) >= 3:
        changed = False
        for i in range(len(out)):
            p0, p1, p2 = out[i - 1], out[i], out[(i + 1) % len(out)]
            cross = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0])
            if cross == 0:
                out.pop(i)
                changed = True
                break
    if len(out) < 3:
        return []
    return out


def clip_convex(poly: Sequence[Point], clipper: Sequence[Point]) -> list[Point]:
    """Intersection of a polygon with a counter-clockwise convex polygon."""
    out = list(poly)
    m = len(clipper)
    for i in range(m):
        (x0, y0), (x1, y1) = clipper[i], clipper[(i + 1) % m]
        # inside is to the left of the directed edge
        a, b = y1 - y0, -(x1 - x0)
        c = a * x0 + b * y0
        out = clip_halfplane(out, a, b, c)
        if not out:
            return []
    return out


def ccw(poly: Sequence[Point]) -> list[Point]:
    poly = list(poly)
    return poly if shoelace(poly) >= 0 else poly[::-1]


def box_polygon(x0, x1, y0, y1) -> list[Point]:
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


def contains_point(poly: Sequence[Point], p: Point, closed: bool = True) -> bool:
    """Point-in-convex-polygon test for a counter-clockwise polygon."""
    m = len(poly)
    for i in range(m):
        (x0, y0), (x1, y1) = poly[i], poly[(i + 1) % m]
        cross = (x1 - x0) * (p[1] - y0) - (y1 - y0) * (p[0] - x0)
        if cross < 0 or (cross == 0 and not closed):
            return False
    return True


def transform(poly: Sequence[Point], m, shift=(0, 0)) -> list[Point]:
    """Image under ``x -> m x + shift`` (orientation restored to CCW)."""
    out = [
        (m[0][0] * x + m[0][1] * y + shift[0], m[1][0] * x + m[1][1] * y + shift[1])
        for x, y in poly
    ]
    return ccw(out)


def halfplane_polygon(constraints, bound) -> list[Point]:
    """Polygon ``{c : |a_k . c| <= 1 for all k}`` clipped from ``[-bound, bound]^2``.

    ``constraints`` are pairs ``(a1, a2)``.
    """
    poly = box_polygon(-bound, bound, -bound, bound)
    for a1, a2 in constraints:
        poly = clip_halfplane(poly, a1, a2, 1)
        poly = clip_halfplane(poly, -a1, -a2, 1)
        if not poly:
            break
    return poly
