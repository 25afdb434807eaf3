"""Immutable finite unions of convex pieces with exact boolean algebra.

Dimension 1 stores sorted, merged closed intervals, so equal sets have
equal representations. Dimension 2 stores interior-disjoint convex
polygons and dimension 3 interior-disjoint axis-aligned boxes.
"""

from __future__ import annotations

import bisect
import math
from fractions import Fraction
from typing import Iterable, Sequence

from ..errors import PreconditionError, ValidationError
from ..linalg import Matrix
from .pieces import (
    Box,
    bounds_overlap,
    frac,
    make_polygon,
    polygon_affine,
    polygon_bounds,
    polygon_difference,
    polygon_intersect,
)

OPS = ("union", "intersect", "difference", "symmetric_difference")


def _canon_polygon(p: Sequence[tuple]) -> tuple:
    k = min(range(len(p)), key=lambda i: p[i])
    return tuple(p[k:]) + tuple(p[:k])


class Region:
    """A finite union of closed convex pieces in dimension 1, 2 or 3.

    Construct with :meth:`interval`, :meth:`box`, :meth:`polygon`,
    :meth:`from_pieces` or :meth:`from_json`. Pieces passed to
    :meth:`from_pieces` may overlap; they are made interior-disjoint so
    that :attr:`volume` is a plain sum.
    """

    __slots__ = ("dim", "pieces")

    def __init__(self, dim: int, pieces: tuple = ()):
        # trusted constructor: pieces already normalized and disjoint
        if dim not in (1, 2, 3):
            raise ValidationError("regions live in dimension 1, 2 or 3")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "pieces", tuple(pieces))

    def __setattr__(self, key, value):
        raise AttributeError("Region is immutable")

    # -- construction -----------------------------------------------------

    @classmethod
    def empty(cls, dim: int) -> "Region":
        return cls(dim, ())

    @classmethod
    def interval(cls, a, b) -> "Region":
        return cls.intervals([(a, b)])

    @classmethod
    def intervals(cls, pairs: Iterable[Sequence]) -> "Region":
        boxes = [Box.make((a,), (b,)) for a, b in pairs]
        return cls.from_pieces(1, [b for b in boxes if b is not None])

    @classmethod
    def box(cls, lo: Sequence, hi: Sequence) -> "Region":
        b = Box.make(lo, hi)
        n = len(b.lo) if b is not None else len(lo)
        if b is None:
            return cls.empty(n)
        if n == 2:
            return cls(2, (_canon_polygon(tuple(b.vertices())),))
        return cls(n, (b,))

    @classmethod
    def polygon(cls, vertices: Sequence) -> "Region":
        p = make_polygon(vertices)
        return cls(2, () if p is None else (_canon_polygon(p),))

    @classmethod
    def from_pieces(cls, dim: int, pieces: Iterable) -> "Region":
        """Union of arbitrary (possibly overlapping) pieces."""
        pieces = list(pieces)
        if dim == 1:
            return cls(1, _merge_intervals(pieces))
        out = cls.empty(dim)
        for p in pieces:
            out = out.union(cls(dim, (p,)))
        return out

    # -- basic queries ----------------------------------------------------

    def __repr__(self) -> str:
        return f"Region(dim={self.dim}, pieces={len(self.pieces)}, volume={self.volume})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Region) or other.dim != self.dim:
            return NotImplemented
        if self.pieces == other.pieces:
            return True
        return self.symmetric_difference(other).is_null()

    def __hash__(self):
        return hash((self.dim, self.volume))

    @property
    def volume(self) -> Fraction:
        return sum((_piece_volume(self.dim, p) for p in self.pieces), Fraction(0))

    def is_null(self) -> bool:
        return not self.pieces

    def piece_bounds(self, p) -> tuple[tuple, tuple]:
        return polygon_bounds(p) if self.dim == 2 else p.bounds()

    def bounding_box(self) -> tuple[tuple, tuple] | None:
        if not self.pieces:
            return None
        bs = [self.piece_bounds(p) for p in self.pieces]
        lo = tuple(min(b[0][i] for b in bs) for i in range(self.dim))
        hi = tuple(max(b[1][i] for b in bs) for i in range(self.dim))
        return lo, hi

    def vertices(self, p) -> list[tuple]:
        return list(p) if self.dim == 2 else p.vertices()

    def contains(self, x: Sequence) -> bool:
        """Closed membership test (boundary points count as inside)."""
        x = tuple(frac(c) for c in x)
        from .. import geometry

        for p in self.pieces:
            if self.dim == 2:
                if geometry.contains_point(p, x):
                    return True
            elif all(a <= c <= b for a, b, c in zip(p.lo, p.hi, x)):
                return True
        return False

    # -- norms used by window certificates -------------------------------

    def min_norm_sq(self) -> Fraction:
        """Squared Euclidean distance from the origin to the region."""
        if not self.pieces:
            raise PreconditionError("empty region has no distance to the origin")
        return min(_piece_min_norm_sq(self.dim, p) for p in self.pieces)

    def max_norm_sq(self) -> Fraction:
        if not self.pieces:
            return Fraction(0)
        return max(sum(c * c for c in v) for p in self.pieces for v in self.vertices(p))

    def coordinate_range(self, k: int) -> tuple[Fraction, Fraction]:
        """``(min |x_k|, max |x_k|)`` over the region."""
        lo, hi = None, None
        for p in self.pieces:
            (plo, phi) = self.piece_bounds(p)
            a, b = plo[k], phi[k]
            near = Fraction(0) if a <= 0 <= b else min(abs(a), abs(b))
            far = max(abs(a), abs(b))
            lo = near if lo is None else min(lo, near)
            hi = far if hi is None else max(hi, far)
        if lo is None:
            raise PreconditionError("empty region")
        return lo, hi

    # -- boolean algebra --------------------------------------------------

    def _check(self, other: "Region"):
        if not isinstance(other, Region):
            raise ValidationError("expected a Region")
        if other.dim != self.dim:
            raise ValidationError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def boolean(self, other: "Region", op: str) -> "Region":
        if op not in OPS:
            raise ValidationError(f"unknown operation {op!r}; expected one of {OPS}")
        return getattr(self, op)(other)

    def union(self, other: "Region") -> "Region":
        self._check(other)
        if self.dim == 1:
            return _sweep(self, other, lambda a, b: a or b)
        if not other.pieces:
            return self
        extra = other.difference(self)
        return Region(self.dim, self.pieces + extra.pieces)

    def intersect(self, other: "Region") -> "Region":
        self._check(other)
        if self.dim == 1:
            return _sweep(self, other, lambda a, b: a and b)
        out = []
        for p in self.pieces:
            bp = self.piece_bounds(p)
            for q in other.pieces:
                if not bounds_overlap(bp, other.piece_bounds(q)):
                    continue
                r = _piece_intersect(self.dim, p, q)
                if r is not None:
                    out.append(r)
        return Region(self.dim, tuple(out))

    def difference(self, other: "Region") -> "Region":
        self._check(other)
        if self.dim == 1:
            return _sweep(self, other, lambda a, b: a and not b)
        out = []
        others = [(q, other.piece_bounds(q)) for q in other.pieces]
        for p in self.pieces:
            frags = [p]
            bp = self.piece_bounds(p)
            for q, bq in others:
                if not bounds_overlap(bp, bq):
                    continue
                nxt = []
                for f in frags:
                    nxt.extend(_piece_difference(self.dim, f, q))
                frags = nxt
                if not frags:
                    break
            out.extend(frags)
        return Region(self.dim, tuple(out))

    def symmetric_difference(self, other: "Region") -> "Region":
        self._check(other)
        if self.dim == 1:
            return _sweep(self, other, lambda a, b: a != b)
        a = self.difference(other)
        b = other.difference(self)
        return Region(self.dim, a.pieces + b.pieces)

    __or__ = union
    __and__ = intersect
    __sub__ = difference
    __xor__ = symmetric_difference

    def issubset(self, other: "Region") -> bool:
        """Inclusion up to measure zero."""
        return self.difference(other).is_null()

    def overlap_volume(self, other: "Region") -> Fraction:
        return self.intersect(other).volume

    # -- affine maps ------------------------------------------------------

    def affine_image(self, m, t: Sequence | None = None) -> "Region":
        """Image under ``x -> M x + t`` with exact rational ``M`` (invertible)."""
        mm = _as_exact_matrix(m, self.dim)
        if mm.det() == 0:
            raise ValidationError("affine map must be invertible")
        t = tuple(frac(c) for c in (t if t is not None else [0] * self.dim))
        if len(t) != self.dim:
            raise ValidationError("translation has the wrong dimension")
        rows = [list(r) for r in mm.rows]
        if self.dim == 1:
            s = rows[0][0]
            return Region(1, _merge_intervals([p.diagonal_image((s,), t) for p in self.pieces]))
        if self.dim == 2:
            return Region(2, tuple(_canon_polygon(polygon_affine(p, rows, t)) for p in self.pieces))
        if not mm.is_diagonal():
            raise PreconditionError("3-D regions support diagonal linear maps only")
        d = mm.diagonal()
        return Region(3, tuple(p.diagonal_image(d, t) for p in self.pieces))

    def translate(self, t: Sequence) -> "Region":
        t = tuple(frac(c) for c in t)
        if self.dim == 2:
            return Region(2, tuple(tuple((x + t[0], y + t[1]) for x, y in p) for p in self.pieces))
        return Region(self.dim, tuple(p.translate(t) for p in self.pieces))

    def scale(self, s) -> "Region":
        return self.affine_image(Matrix.identity(self.dim).scale(frac(s)))

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "pieces": [{"vertices": [[_fmt(c) for c in v] for v in _json_vertices(self.dim, p)]} for p in self.pieces],
        }

    @classmethod
    def from_json(cls, data) -> "Region":
        if not isinstance(data, dict) or "dim" not in data or "pieces" not in data:
            raise ValidationError("region JSON needs 'dim' and 'pieces'")
        dim = data["dim"]
        if dim not in (1, 2, 3):
            raise ValidationError("region dim must be 1, 2 or 3")
        pieces = []
        for item in data["pieces"]:
            verts = item.get("vertices") if isinstance(item, dict) else item
            if not verts:
                raise ValidationError("piece without vertices")
            pts = [tuple(frac(c) for c in v) for v in verts]
            if any(len(p) != dim for p in pts):
                raise ValidationError("vertex dimension does not match region dim")
            if dim == 2:
                p = make_polygon(pts)
                if p is not None:
                    pieces.append(_canon_polygon(p))
            else:
                lo = tuple(min(p[i] for p in pts) for i in range(dim))
                hi = tuple(max(p[i] for p in pts) for i in range(dim))
                if dim == 3 and len(pts) not in (2, 8):
                    raise ValidationError("3-D pieces are axis-aligned boxes: give 2 corners or 8 vertices")
                b = Box.make(lo, hi)
                if b is not None:
                    pieces.append(b)
        return cls.from_pieces(dim, pieces)


# ---------------------------------------------------------------------------
# helpers


def _fmt(c: Fraction) -> str | int:
    return int(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _json_vertices(dim, p):
    if dim == 2:
        return list(p)
    if dim == 1:
        return [p.lo, p.hi]
    return [p.lo, p.hi]


def _piece_volume(dim, p) -> Fraction:
    if dim == 2:
        from ..geometry import area

        return area(p)
    return p.volume()


def _piece_intersect(dim, p, q):
    if dim == 2:
        r = polygon_intersect(p, q)
        return None if r is None else _canon_polygon(r)
    return p.intersect(q)


def _piece_difference(dim, p, q):
    if dim == 2:
        return [_canon_polygon(r) for r in polygon_difference(p, q)]
    return p.difference(q)


def _seg_dist_sq(a, b) -> Fraction:
    """Squared distance from the origin to the segment ``[a, b]``."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    ll = dx * dx + dy * dy
    t = -(a[0] * dx + a[1] * dy) / ll if ll else Fraction(0)
    t = min(max(t, Fraction(0)), Fraction(1))
    x, y = a[0] + t * dx, a[1] + t * dy
    return x * x + y * y


def _piece_min_norm_sq(dim, p) -> Fraction:
    if dim == 2:
        from .. import geometry

        if geometry.contains_point(p, (Fraction(0), Fraction(0))):
            return Fraction(0)
        m = len(p)
        return min(_seg_dist_sq(p[i], p[(i + 1) % m]) for i in range(m))
    s = Fraction(0)
    for a, b in zip(p.lo, p.hi):
        if a > 0:
            s += a * a
        elif b < 0:
            s += b * b
    return s


def _merge_intervals(boxes: Iterable[Box]) -> tuple:
    ivs = sorted((b.lo[0], b.hi[0]) for b in boxes)
    out: list[list] = []
    for a, b in ivs:
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return tuple(Box((a,), (b,)) for a, b in out)


def _sweep(r: Region, s: Region, keep) -> Region:
    """Boolean combination of two 1-D regions by an endpoint sweep."""
    ra = [(p.lo[0], p.hi[0]) for p in r.pieces]
    sa = [(p.lo[0], p.hi[0]) for p in s.pieces]
    xs = sorted({x for iv in ra + sa for x in iv})
    ra_lo = [a for a, _ in ra]
    sa_lo = [a for a, _ in sa]

    def inside(ivs, los, x):
        k = bisect.bisect_right(los, x) - 1
        return k >= 0 and ivs[k][0] < x < ivs[k][1]

    out: list[list] = []
    for x0, x1 in zip(xs, xs[1:]):
        mid = (x0 + x1) / 2
        if keep(inside(ra, ra_lo, mid), inside(sa, sa_lo, mid)):
            if out and out[-1][1] == x0:
                out[-1][1] = x1
            else:
                out.append([x0, x1])
    return Region(1, tuple(Box((a,), (b,)) for a, b in out))


def _as_exact_matrix(m, n: int) -> Matrix:
    if isinstance(m, Matrix):
        mm = m
    elif isinstance(m, (int, Fraction, str)) and n == 1:
        mm = Matrix.from_rows([[m]], mode="exact")
    else:
        mm = Matrix.from_rows(m, mode="exact")
    if not mm.exact:
        raise ValidationError("region maps need exact rational entries")
    if mm.n != n:
        raise ValidationError(f"matrix is {mm.n}x{mm.n}, region dimension is {n}")
    return mm


def union_all(dim: int, regions: Iterable[Region]) -> Region:
    """Union of many regions (pieces gathered, then made disjoint)."""
    if dim == 1:
        boxes = [p for r in regions for p in r.pieces]
        return Region(1, _merge_intervals(boxes))
    out = Region.empty(dim)
    for r in regions:
        out = out.union(r)
    return out


def norm_bounds(region: Region) -> tuple[float, float]:
    """Float ``(r0, r1)`` with ``r0 <= |x| <= r1`` on the region, rounded outward."""
    r0 = math.sqrt(float(region.min_norm_sq())) * (1 - 1e-12)
    r1 = math.sqrt(float(region.max_norm_sq())) * (1 + 1e-12)
    return r0, r1
