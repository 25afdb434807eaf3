"""Convex pieces: axis-aligned boxes (dims 1 and 3) and convex polygons (dim 2).

All coordinates are exact ``Fraction`` values. Pieces are closed; every
predicate downstream is up to measure zero, so two pieces that only share
a face are treated as disjoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .. import geometry
from ..errors import ValidationError


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ValidationError("boolean is not a coordinate")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"bad rational coordinate {x!r}") from exc
    if isinstance(x, float):
        return Fraction(x)
    raise ValidationError(f"region coordinates must be rational, got {type(x).__name__}")


@dataclass(frozen=True, order=True)
class Box:
    """Closed axis-aligned box ``prod [lo_i, hi_i]`` with ``lo_i < hi_i``."""

    lo: tuple
    hi: tuple

    @classmethod
    def make(cls, lo: Sequence, hi: Sequence) -> "Box | None":
        lo = tuple(frac(x) for x in lo)
        hi = tuple(frac(x) for x in hi)
        if len(lo) != len(hi):
            raise ValidationError("box corners differ in dimension")
        if any(a >= b for a, b in zip(lo, hi)):
            return None
        return cls(lo, hi)

    @property
    def n(self) -> int:
        return len(self.lo)

    def volume(self) -> Fraction:
        v = Fraction(1)
        for a, b in zip(self.lo, self.hi):
            v *= b - a
        return v

    def intersect(self, other: "Box") -> "Box | None":
        lo = tuple(max(a, b) for a, b in zip(self.lo, other.lo))
        hi = tuple(min(a, b) for a, b in zip(self.hi, other.hi))
        if any(a >= b for a, b in zip(lo, hi)):
            return None
        return Box(lo, hi)

    def difference(self, other: "Box") -> list["Box"]:
        """``self \\ other`` as at most ``2n`` disjoint boxes."""
        if self.intersect(other) is None:
            return [self]
        out = []
        lo, hi = list(self.lo), list(self.hi)
        for i in range(self.n):
            if lo[i] < other.lo[i]:
                h = hi.copy()
                h[i] = other.lo[i]
                out.append(Box(tuple(lo), tuple(h)))
                lo[i] = other.lo[i]
            if hi[i] > other.hi[i]:
                l2 = lo.copy()
                l2[i] = other.hi[i]
                out.append(Box(tuple(l2), tuple(hi)))
                hi[i] = other.hi[i]
        return out

    def translate(self, t: Sequence) -> "Box":
        return Box(tuple(a + s for a, s in zip(self.lo, t)), tuple(b + s for b, s in zip(self.hi, t)))

    def diagonal_image(self, d: Sequence, t: Sequence) -> "Box":
        """Image under ``x -> diag(d) x + t``."""
        lo, hi = [], []
        for a, b, s, u in zip(self.lo, self.hi, d, t):
            x, y = s * a + u, s * b + u
            lo.append(min(x, y))
            hi.append(max(x, y))
        return Box(tuple(lo), tuple(hi))

    def vertices(self) -> list[tuple]:
        if self.n == 1:
            return [self.lo, self.hi]
        if self.n == 2:
            return list(geometry.box_polygon(self.lo[0], self.hi[0], self.lo[1], self.hi[1]))
        pts = [()]
        for a, b in zip(self.lo, self.hi):
            pts = [p + (c,) for p in pts for c in (a, b)]
        return pts

    def bounds(self) -> tuple[tuple, tuple]:
        return self.lo, self.hi


# ---------------------------------------------------------------------------
# polygons (tuples of counter-clockwise Fraction vertices)


def make_polygon(vertices: Sequence) -> tuple | None:
    pts = [tuple(frac(c) for c in v) for v in vertices]
    if any(len(p) != 2 for p in pts):
        raise ValidationError("polygon vertices must be 2-D")
    hull = convex_hull(pts)
    if len(hull) < 3:
        return None
    return tuple(hull)


def convex_hull(points: Sequence[tuple]) -> list[tuple]:
    """Counter-clockwise convex hull without collinear vertices (monotone chain)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def polygon_bounds(poly: Sequence[tuple]) -> tuple[tuple, tuple]:
    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    return (min(xs), min(ys)), (max(xs), max(ys))


def polygon_intersect(p: tuple, q: tuple) -> tuple | None:
    if not bounds_overlap(polygon_bounds(p), polygon_bounds(q)):
        return None
    out = geometry.clip_convex(p, q)
    return tuple(out) if out else None


def polygon_difference(p: tuple, q: tuple) -> list[tuple]:
    """``p \\ q`` as disjoint convex polygons, one per edge of ``q`` at most."""
    if polygon_intersect(p, q) is None:
        return [p]
    out = []
    rem = list(p)
    m = len(q)
    for i in range(m):
        (x0, y0), (x1, y1) = q[i], q[(i + 1) % m]
        a, b = y1 - y0, -(x1 - x0)
        c = a * x0 + b * y0
        outside = geometry.clip_halfplane(rem, -a, -b, -c)
        if outside:
            out.append(tuple(outside))
        rem = geometry.clip_halfplane(rem, a, b, c)
        if not rem:
            break
    return out


def polygon_affine(p: tuple, m, t) -> tuple:
    return tuple(geometry.transform(p, m, t))


def bounds_overlap(b1, b2) -> bool:
    (lo1, hi1), (lo2, hi2) = b1, b2
    return all(a < d and c < b for a, b, c, d in zip(lo1, hi1, lo2, hi2))

