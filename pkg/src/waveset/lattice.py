"""Full-rank lattices and exact lattice-point counting in ellipsoids.

Counting works in lattice coordinates: a point ``z`` (integer coefficients)
lies in the body iff ``||G z - t||^2 <= r^2`` for a matrix ``G`` built from
the ellipsoid shape and the lattice basis. The search tree is pruned in
double precision after an LLL preconditioning step; every decision that
is close to the boundary is re-checked in exact rational arithmetic (or in
mpmath for irrational data, with a :class:`BoundaryWarning` when the point
sits within ``1e-12`` of the boundary).
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import mpmath
import numpy as np

from .errors import (
    AmbiguousMembershipError,
    BoundaryWarning,
    CountCapExceeded,
    PreconditionError,
    ValidationError,
)
from .linalg import Matrix, parse_scalar, rank, rref, to_float, to_mpf
from .reduction import (
    apply_unimodular,
    column_scale_to_integers,
    hnf_rows,
    integer_kernel,
    lll_gram,
    rational_to_integer_rows,
)

DEFAULT_CAP = 10**7
BOUNDARY_TOL = 1e-12


def unit_ball_volume(n: int):
    return mpmath.pi ** (mpmath.mpf(n) / 2) / mpmath.gamma(mpmath.mpf(n) / 2 + 1)


def _vec(values, exact: bool):
    out = [parse_scalar(v) for v in values]
    if not exact:
        out = [to_mpf(v) for v in out]
    return out


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True)
class Lattice:
    """Full-rank lattice; ``basis`` rows are the generators."""

    basis: Matrix

    def __post_init__(self):
        if self.basis.det() == 0:
            raise ValidationError("lattice basis is not full rank")

    @classmethod
    def from_rows(cls, rows, mode: str = "auto") -> "Lattice":
        return cls(Matrix.from_rows(rows, mode))

    @classmethod
    def from_json(cls, obj) -> "Lattice":
        if isinstance(obj, dict) and "basis" in obj:
            return cls(Matrix.from_rows(obj["basis"], obj.get("mode", "auto")))
        return cls(Matrix.from_json(obj))

    @classmethod
    def integer(cls, n: int) -> "Lattice":
        return cls(Matrix.identity(n))

    def to_json(self) -> dict:
        d = self.basis.to_json()
        return {"mode": d["mode"], "basis": d["rows"]}

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def exact(self) -> bool:
        return self.basis.exact

    @property
    def covolume(self):
        return self.basis.abs_det()

    @property
    def generators(self) -> list:
        return [list(r) for r in self.basis.rows]

    @property
    def column_matrix(self) -> Matrix:
        """Matrix ``L`` whose columns are the generators (``gamma = L z``)."""
        return self.basis.T

    def point(self, coeffs: Sequence[int]) -> tuple:
        return tuple(self.column_matrix @ [Fraction(c) for c in coeffs])

    def coordinates(self, x: Sequence) -> list:
        return self.column_matrix.inv() @ list(x)

    def contains(self, x: Sequence, tol: float = 1e-20) -> bool:
        coords = self.coordinates(_vec(x, self.exact))
        if self.exact and all(isinstance(c, Fraction) for c in coords):
            return all(c.denominator == 1 for c in coords)
        return all(abs(c - mpmath.nint(c)) <= tol for c in coords)

    def transform(self, s: Matrix) -> "Lattice":
        """The lattice ``S(Gamma)``."""
        return Lattice(self.basis @ s.T)

    def rebase(self, u: Sequence[Sequence[int]]) -> "Lattice":
        """Same point set with generators ``u @ basis`` (``u`` unimodular)."""
        um = Matrix.from_rows(u, "exact")
        if abs(um.det()) != 1:
            raise ValidationError("change of basis is not unimodular")
        return Lattice(um @ self.basis)

    def hermite(self) -> "Lattice":
        """Canonical Hermite-form basis (exact lattices only)."""
        if not self.exact:
            raise PreconditionError("Hermite form needs an exact lattice")
        ints, den = rational_to_integer_rows(self.basis.rows)
        h = hnf_rows(ints)
        return Lattice(Matrix.from_rows([[Fraction(x, den) for x in r] for r in h], "exact"))


@dataclass(frozen=True)
class Ellipsoid:
    """The body ``M(B(0, r)) + center``."""

    shape: Matrix
    radius: object = Fraction(1)
    center: tuple | None = None

    def __post_init__(self):
        self.shape.require_invertible()
        r = parse_scalar(self.radius)
        if r <= 0:
            raise ValidationError("ellipsoid radius must be positive")
        object.__setattr__(self, "radius", r)
        if self.center is not None:
            object.__setattr__(self, "center", tuple(parse_scalar(c) for c in self.center))

    @property
    def n(self) -> int:
        return self.shape.n

    @property
    def volume(self):
        return unit_ball_volume(self.n) * to_mpf(self.radius) ** self.n * to_mpf(self.shape.abs_det())

    def contains(self, x: Sequence, closed: bool = True) -> bool:
        c = self.center or (Fraction(0),) * self.n
        y = self.shape.inv() @ [a - b for a, b in zip(_vec(x, True), c)]
        q = sum(v * v for v in y)
        r2 = self.radius * self.radius
        return q <= r2 if closed else q < r2


@dataclass(frozen=True)
class SymmetricBox:
    """Axis-parallel box ``prod [-h_i, h_i]`` (or open)."""

    half_widths: tuple
    closed: bool = True

    def __post_init__(self):
        h = tuple(parse_scalar(x) for x in self.half_widths)
        if any(x <= 0 for x in h):
            raise ValidationError("box half-widths must be positive")
        object.__setattr__(self, "half_widths", h)

    @property
    def n(self) -> int:
        return len(self.half_widths)

    @property
    def volume(self):
        v = Fraction(1) if all(isinstance(h, Fraction) for h in self.half_widths) else mpmath.mpf(1)
        for h in self.half_widths:
            v *= 2 * h
        return v

    def contains(self, x: Sequence) -> bool:
        if self.closed:
            return all(abs(a) <= h for a, h in zip(x, self.half_widths))
        return all(abs(a) < h for a, h in zip(x, self.half_widths))


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of R^n given by independent basis rows."""

    basis: tuple
    n: int
    exact: bool = True

    @classmethod
    def span(cls, vectors: Sequence[Sequence], n: int | None = None, tol: float = 1e-30) -> "Subspace":
        vectors = [list(v) for v in vectors]
        if n is None:
            if not vectors:
                raise ValidationError("dimension needed for the zero subspace")
            n = len(vectors[0])
        parsed = [[parse_scalar(x) for x in v] for v in vectors]
        exact = all(isinstance(x, Fraction) for v in parsed for x in v)
        if not exact:
            parsed = [[to_mpf(x) for x in v] for v in parsed]
        keep: list = []
        t = 0 if exact else tol
        for v in parsed:
            if len(v) != n:
                raise ValidationError("subspace vectors have inconsistent length")
            if rank(keep + [v], t) > len(keep):
                keep.append(v)
        return cls(tuple(tuple(v) for v in keep), n, exact)

    @classmethod
    def coordinate(cls, n: int, indices: Sequence[int]) -> "Subspace":
        return cls.span([[1 if i == k else 0 for i in range(n)] for k in indices], n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def orthogonal_complement(self) -> list:
        """Basis rows of the orthogonal complement."""
        zero = Fraction(0) if self.exact else mpmath.mpf(0)
        one = zero + 1
        if not self.basis:
            return [[one if i == j else zero for j in range(self.n)] for i in range(self.n)]
        red, piv, _ = rref(self.basis, 0 if self.exact else 1e-30)
        free = [c for c in range(self.n) if c not in piv]
        out = []
        for f in free:
            v = [zero] * self.n
            v[f] = one
            for row, p in zip(red, piv):
                v[p] = -row[f]
            out.append(v)
        return out

    def contains(self, x: Sequence, tol: float = 1e-30) -> bool:
        x = _vec(x, self.exact)
        return rank(list(self.basis) + [x], 0 if self.exact and all(isinstance(a, Fraction) for a in x) else tol) == self.dim

    def orthonormal(self) -> np.ndarray:
        if not self.basis:
            return np.zeros((0, self.n))
        q, _ = np.linalg.qr(np.array([[to_float(x) for x in v] for v in self.basis]).T)
        return q.T

    def to_json(self) -> list:
        return [[str(x) if isinstance(x, Fraction) else float(x) for x in v] for v in self.basis]


@dataclass(frozen=True)
class CountSeries:
    """Counts ``N_j = #(A^{-j} B(0, r) ∩ Gamma)`` for consecutive j."""

    entries: tuple  # ((j, N_j), ...)
    radius: object = Fraction(1)
    matrix: dict | None = None
    lattice: dict | None = None
    truncated: bool = False
    truncated_at: int | None = None
    lower_bound: int | None = None
    boundary_warnings: int = 0

    def __post_init__(self):
        js = [j for j, _ in self.entries]
        if js and js != list(range(js[0], js[0] + len(js))):
            raise ValidationError("count series must be indexed by consecutive j")
        if any(c < 1 for _, c in self.entries):
            raise ValidationError("counts must be positive (the origin always belongs)")

    @property
    def counts(self) -> list[int]:
        return [c for _, c in self.entries]

    def partial_sums(self) -> list[Fraction]:
        out, s = [], Fraction(0)
        for _, c in self.entries:
            s += Fraction(1, c)
            out.append(s)
        return out

    def to_csv(self) -> str:
        lines = ["j,N_j,1/N_j,partial_sum"]
        for (j, c), s in zip(self.entries, self.partial_sums()):
            lines.append(f"{j},{c},{1 / c:.17g},{float(s):.17g}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "radius": str(self.radius) if isinstance(self.radius, Fraction) else float(self.radius),
            "entries": [{"j": j, "N_j": c} for j, c in self.entries],
            "partial_sum": float(self.partial_sums()[-1]) if self.entries else 0.0,
            "truncated": self.truncated,
            "truncated_at": self.truncated_at,
            "lower_bound": self.lower_bound,
            "boundary_warnings": self.boundary_warnings,
        }


# ---------------------------------------------------------------------------
# enumeration kernel


class _Quadratic:
    """Integer points z with ``||G z - t||^2 <= r2`` (or ``<``)."""

    def __init__(self, g: Matrix, t: Sequence | None, r2, closed: bool = True):
        self.n = g.n
        self.exact = g.exact and isinstance(r2, Fraction) and (t is None or all(isinstance(x, Fraction) for x in t))
        if not self.exact:
            g = g.to_mp()
            r2 = to_mpf(r2)
            t = None if t is None else [to_mpf(x) for x in t]
        self.closed = closed
        self.r2 = r2
        zero = g.rows[0][0] * 0
        n = self.n
        cols = list(zip(*g.rows))
        q = [[sum((a * b for a, b in zip(cols[i], cols[j])), zero) for j in range(n)] for i in range(n)]
        if t is None:
            h = [zero] * n
            tt = zero
        else:
            h = [sum((a * b for a, b in zip(cols[i], t)), zero) for i in range(n)]
            tt = sum((x * x for x in t), zero)
        u, _ = lll_gram(q)
        qp = apply_unimodular(q, u)
        hp = [sum((u[k][i] * h[k] for k in range(n)), zero) for i in range(n)]
        # put the widest coordinate innermost (index 0)
        qmp = mpmath.matrix([[to_mpf(x) for x in r] for r in qp])
        qinv = qmp ** -1
        order = sorted(range(n), key=lambda i: -qinv[i, i])
        self.perm = order
        self.u = u
        self.q = [[qp[order[i]][order[j]] for j in range(n)] for i in range(n)]
        self.h = [hp[order[i]] for i in range(n)]
        self.tt = tt
        qm = mpmath.matrix([[to_mpf(x) for x in r] for r in self.q])
        center = mpmath.lu_solve(qm, mpmath.matrix([to_mpf(x) for x in self.h]))
        const = to_mpf(tt) - sum(to_mpf(self.h[i]) * center[i] for i in range(n))
        self.rho2 = float(to_mpf(r2) - const)
        self.center = [float(center[i]) for i in range(n)]
        try:
            chol = mpmath.cholesky(qm)
        except (ZeroDivisionError, ValueError) as exc:
            raise ValidationError("degenerate quadratic form") from exc
        # chol is lower L with Q = L L^T; use R = L^T (upper)
        self.R = [[float(chol[j, i]) for j in range(n)] for i in range(n)]
        self.nodes = 0
        self.boundary_hits = 0

    # exact membership --------------------------------------------------
    def value(self, w: Sequence[int]):
        n = self.n
        s = self.tt
        for i in range(n):
            wi = w[i]
            if wi == 0:
                continue
            row = self.q[i]
            acc = row[i] * wi
            for j in range(i + 1, n):
                if w[j]:
                    acc += 2 * row[j] * w[j]
            s += wi * acc - 2 * self.h[i] * wi
        return s

    def inside(self, w: Sequence[int]) -> bool:
        v = self.value(w)
        if not self.exact:
            scale = max(abs(self.r2), mpmath.mpf(1))
            if abs(v - self.r2) <= BOUNDARY_TOL * scale:
                self.boundary_hits += 1
        return v <= self.r2 if self.closed else v < self.r2

    def to_z(self, w: Sequence[int]) -> list[int]:
        ww = [0] * self.n
        for i, p in enumerate(self.perm):
            ww[p] = w[i]
        return [sum(self.u[i][k] * ww[k] for k in range(self.n)) for i in range(self.n)]

    # search ------------------------------------------------------------
    def _innermost(self, w: list[int], rem: float, collect: list | None) -> int:
        r00 = self.R[0][0]
        c0 = self.center[0] - sum(self.R[0][j] * (w[j] - self.center[j]) for j in range(1, self.n)) / r00
        slack = 1e-9 * (abs(self.rho2) + 1e-300)
        hw = math.sqrt(max(rem + slack, 0.0)) / r00
        hw0 = math.sqrt(max(rem, 0.0)) / r00
        lo, hi = math.ceil(c0 - hw), math.floor(c0 + hw)
        if lo > hi:
            return 0
        delta = 1e-8 * (1.0 + abs(c0) + hw0)
        safe_lo = math.ceil(c0 - hw0 + delta)
        safe_hi = math.floor(c0 + hw0 - delta)
        if safe_lo > safe_hi:
            safe_lo, safe_hi = 0, -1
        count = 0
        if collect is None:
            if safe_hi >= safe_lo:
                count += safe_hi - safe_lo + 1
                fringe = itertools.chain(range(lo, safe_lo), range(safe_hi + 1, hi + 1))
            else:
                fringe = range(lo, hi + 1)
            for v in fringe:
                w[0] = v
                if self.inside(w):
                    count += 1
            return count
        for v in range(lo, hi + 1):
            w[0] = v
            if (safe_lo <= v <= safe_hi) or self.inside(w):
                collect.append(tuple(w))
                count += 1
        return count

    def search(self, collect: list | None, node_cap: int | None, point_cap: int | None) -> int:
        n = self.n
        w = [0] * n
        total = 0
        slack = 1e-9 * (abs(self.rho2) + 1e-300)

        def rec(i: int, partial: float) -> None:
            nonlocal total
            rem = self.rho2 - partial
            if rem < -slack:
                return
            if i == 0:
                total += self._innermost(w, rem, collect)
                if point_cap is not None and total > point_cap:
                    raise CountCapExceeded(f"more than {point_cap} lattice points", total)
                return
            rii = self.R[i][i]
            ci = self.center[i] - sum(self.R[i][j] * (w[j] - self.center[j]) for j in range(i + 1, n)) / rii
            hw = math.sqrt(max(rem + slack, 0.0)) / rii
            for v in range(math.ceil(ci - hw), math.floor(ci + hw) + 1):
                self.nodes += 1
                if node_cap is not None and self.nodes > node_cap:
                    raise CountCapExceeded(f"search exceeded {node_cap} nodes", total)
                w[i] = v
                d = rii * (v - ci)
                rec(i - 1, partial + d * d)
            w[i] = 0

        rec(n - 1, 0.0)
        return total


def _body_quadratic(e: Ellipsoid, lattice: Lattice, closed: bool) -> _Quadratic:
    minv = e.shape.inv()
    g = minv @ lattice.column_matrix
    t = None
    if e.center is not None and any(c != 0 for c in e.center):
        t = minv @ list(e.center)
    r = e.radius
    r2 = r * r
    return _Quadratic(g, t, r2, closed)


def _warn(q: _Quadratic) -> None:
    if q.boundary_hits:
        warnings.warn(
            f"{q.boundary_hits} lattice point(s) within {BOUNDARY_TOL} of the boundary",
            BoundaryWarning,
            stacklevel=3,
        )


def _check_dims(e, lattice: Lattice) -> None:
    if e.n != lattice.n:
        raise ValidationError(f"dimension mismatch: body in R^{e.n}, lattice in R^{lattice.n}")


def enumerate_points(e: Ellipsoid, lattice: Lattice, closed: bool = True, cap: int = DEFAULT_CAP) -> list[tuple]:
    """All lattice points of the ellipsoid, sorted by their lattice coefficients."""
    _check_dims(e, lattice)
    q = _body_quadratic(e, lattice, closed)
    found: list = []
    try:
        q.search(found, None, cap)
    except CountCapExceeded as exc:
        raise CountCapExceeded(str(exc), exc.lower_bound) from None
    _warn(q)
    zs = sorted(q.to_z(w) for w in found)
    lcol = lattice.column_matrix
    return [tuple(lcol @ [Fraction(c) for c in z]) if lattice.exact else tuple(lcol @ z) for z in zs]


def enumerate_coefficients(e: Ellipsoid, lattice: Lattice, closed: bool = True, cap: int = DEFAULT_CAP) -> list[tuple]:
    _check_dims(e, lattice)
    q = _body_quadratic(e, lattice, closed)
    found: list = []
    q.search(found, None, cap)
    _warn(q)
    return sorted(tuple(q.to_z(w)) for w in found)


def count_points(e: Ellipsoid, lattice: Lattice, closed: bool = True, cap: int = DEFAULT_CAP) -> int:
    """Number of lattice points in the ellipsoid.

    The innermost coordinate is counted in closed form, so the cost is
    governed by the number of search-tree nodes; ``cap`` bounds that number.
    """
    _check_dims(e, lattice)
    q = _body_quadratic(e, lattice, closed)
    total = q.search(None, cap, None)
    _warn(q)
    return total


def orbit_count(a: Matrix, lattice: Lattice, r, j: int, cap: int = DEFAULT_CAP) -> int:
    """``#(A^{-j} B(0, r) ∩ Gamma)`` with the closed-ball convention."""
    r = parse_scalar(r)
    g = a.power(j) @ lattice.column_matrix
    q = _Quadratic(g, None, r * r, True)
    total = q.search(None, cap, None)
    _warn(q)
    return total


def count_series(a: Matrix, lattice: Lattice, r=1, jmax: int = 20, cap: int = DEFAULT_CAP, jmin: int = 1) -> CountSeries:
    """The counts ``N_j`` for ``j = jmin..jmax``; requires ``|det A| >= 1``.

    A cap overflow truncates the series and records the partial lower bound.
    """
    if a.n != lattice.n:
        raise ValidationError("matrix and lattice dimensions differ")
    if a.abs_det() < 1:
        raise PreconditionError("count_series needs |det A| >= 1; pass the inverse matrix instead")
    r = parse_scalar(r)
    entries = []
    truncated, at, lower = False, None, None
    hits = 0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", BoundaryWarning)
        for j in range(jmin, jmax + 1):
            try:
                entries.append((j, orbit_count(a, lattice, r, j, cap)))
            except CountCapExceeded as exc:
                truncated, at, lower = True, j, exc.lower_bound
                break
        hits = sum(1 for w in caught if issubclass(w.category, BoundaryWarning))
    if hits:
        warnings.warn(f"{hits} count(s) had points near the boundary", BoundaryWarning, stacklevel=2)
    return CountSeries(
        tuple(entries), r, a.to_json(), lattice.to_json(), truncated, at, lower, hits
    )


def redundancy_sequence(a: Matrix, lattice: Lattice, r=1, jmax: int = 20, cap: int = DEFAULT_CAP) -> list[int]:
    """Redundancy bounds ``m_j = #(A^{-j} B(0, 2r) ∩ Gamma)``.

    If ``x, y`` lie in ``A^{-j} B(0, r)`` then ``x - y`` lies in the doubled
    body, so that body's lattice count bounds how many translates overlap.
    """
    r = parse_scalar(r)
    series = count_series(a, lattice, 2 * r, jmax, cap)
    if series.truncated:
        raise CountCapExceeded(f"redundancy count overflow at j={series.truncated_at}", series.lower_bound or 0)
    return series.counts


# ---------------------------------------------------------------------------
# Minkowski bounds


class MinkowskiResult(NamedTuple):
    lower: object
    upper: object
    count: int
    spans: bool


def _points_in_box(box: SymmetricBox, lattice: Lattice, cap: int) -> list[tuple]:
    n = box.n
    exact = lattice.exact and all(isinstance(h, Fraction) for h in box.half_widths)
    hs = box.half_widths if exact else [to_mpf(h) for h in box.half_widths]
    # the box lies in diag(h) B(0, sqrt(n)); enumerate there and filter
    dinv = Matrix.diag([1 / h for h in hs]) if exact else Matrix(
        tuple(tuple((1 / hs[i]) if i == j else mpmath.mpf(0) for j in range(n)) for i in range(n)), False)
    g = dinv @ lattice.column_matrix
    q = _Quadratic(g, None, Fraction(n) if exact else mpmath.mpf(n), True)
    found: list = []
    q.search(found, None, cap)
    lcol = lattice.column_matrix
    pts = []
    for w in found:
        z = q.to_z(w)
        x = lcol @ ([Fraction(c) for c in z] if lattice.exact else z)
        if box.contains(x):
            pts.append(tuple(x))
    return pts


def minkowski_bounds(body, lattice: Lattice, cap: int = DEFAULT_CAP) -> MinkowskiResult:
    """Volume bounds for lattice points in an origin-symmetric convex body.

    ``lower = |body| / (2^n covol)`` always bounds the count from below;
    ``upper = 3^n n! |body| / (2^n covol)`` is returned only when the lattice
    points of the body span R^n (otherwise ``None``).
    """
    n = lattice.n
    if body.n != n:
        raise ValidationError("dimension mismatch")
    if isinstance(body, Ellipsoid):
        if body.center is not None and any(c != 0 for c in body.center):
            raise PreconditionError("body must be symmetric about the origin")
        pts = enumerate_points(body, lattice, True, cap)
    elif isinstance(body, SymmetricBox):
        pts = _points_in_box(body, lattice, cap)
    else:
        raise ValidationError(f"unsupported body {type(body).__name__}")
    vol = body.volume
    cov = lattice.covolume
    if isinstance(vol, Fraction) and isinstance(cov, Fraction):
        lower = vol / (2**n * cov)
    else:
        lower = to_mpf(vol) / (2**n * to_mpf(cov))
    exact_pts = all(isinstance(x, Fraction) for p in pts for x in p)
    spans = rank([list(p) for p in pts], 0 if exact_pts else 1e-20) == n if pts else False
    upper = 3**n * math.factorial(n) * lower if spans else None
    return MinkowskiResult(lower, upper, len(pts), spans)


# ---------------------------------------------------------------------------
# sublattices in subspaces


class Sublattice(NamedTuple):
    rank: int
    basis: list  # generator vectors in R^n
    coefficients: list  # integer coefficient rows w.r.t. the lattice basis


RELATION_TOL_EXP = 40
AMBIGUOUS_TOL_EXP = 30


def intersection_lattice(lattice: Lattice, v: Subspace) -> Sublattice:
    """The sublattice ``Gamma ∩ V`` with a Hermite-reduced coefficient basis.

    Exact data is handled by an integer kernel computation. Irrational data
    goes through an LLL relation search at the working precision; a
    candidate relation whose residual is neither clearly zero nor clearly
    nonzero raises :class:`AmbiguousMembershipError`.
    """
    n = lattice.n
    if v.n != n:
        raise ValidationError("dimension mismatch")
    if v.dim == n:
        coeffs = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        return Sublattice(n, lattice.generators, coeffs)
    if v.dim == 0:
        return Sublattice(0, [], [])
    perp = v.orthogonal_complement()
    b = lattice.basis
    exact = b.exact and v.exact
    rows = b.rows if exact else b.to_mp().rows
    perp = perp if exact else [[to_mpf(x) for x in p] for p in perp]
    zero = rows[0][0] * 0
    mz = [[sum((x * y for x, y in zip(rows[i], p)), zero) for p in perp] for i in range(n)]
    if exact:
        coeffs = integer_kernel(column_scale_to_integers(mz))
    else:
        coeffs = _relations(mz)
    basis = [list(lattice.column_matrix @ ([Fraction(c) for c in z] if lattice.exact else z)) for z in coeffs]
    return Sublattice(len(coeffs), basis, coeffs)


def _relations(mz: list[list]) -> list[list[int]]:
    n, m = len(mz), len(mz[0])
    scale = max(max(abs(x) for x in r) for r in mz) or mpmath.mpf(1)
    norm = [[x / scale for x in r] for r in mz]
    k2 = mpmath.mpf(10) ** 50
    gram = [[(1 if i == j else 0) + k2 * sum(norm[i][c] * norm[j][c] for c in range(m)) for j in range(n)]
            for i in range(n)]
    u, _ = lll_gram(gram)
    rel_tol = mpmath.mpf(10) ** (-RELATION_TOL_EXP)
    amb_tol = mpmath.mpf(10) ** (-AMBIGUOUS_TOL_EXP)
    relations, near = [], []
    for col in range(n):
        z = [u[i][col] for i in range(n)]
        res = mpmath.sqrt(sum(sum(z[i] * norm[i][c] for i in range(n)) ** 2 for c in range(m)))
        size = mpmath.sqrt(sum(x * x for x in z))
        rel = res / size
        if rel <= rel_tol:
            relations.append(z)
        elif rel <= amb_tol:
            near.append({"coefficients": z, "relative_residual": float(rel)})
    if near:
        raise AmbiguousMembershipError("lattice membership is numerically ambiguous", near)
    return hnf_rows(relations)
