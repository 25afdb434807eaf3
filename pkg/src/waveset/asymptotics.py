"""Growth of subspace sections of dilated balls, and ellipsoid section formulas.

For an invertible ``B`` and a subspace ``V`` the section volumes
``m_d(V ∩ B^j(B(0, 1)))`` grow like ``b^j`` up to a constant. The base is
read off the real Jordan form of the positive-spectrum companion: write a
basis of ``V`` in Jordan coordinates (moduli ascending), row-reduce, and
multiply the moduli over the pivot columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .errors import JordanAmbiguityError, PreconditionError, ValidationError
from .geometry import area, halfplane_polygon
from .lattice import Ellipsoid, Subspace, unit_ball_volume
from .linalg import Matrix, _det, _inverse, positive_companion, rref, to_float, to_mpf

PIVOT_TOL = mpmath.mpf(10) ** (-30)
NUMERIC_PIVOT_TOL = 1e-9
FIT_R2_MIN = 0.99


@dataclass(frozen=True)
class PivotSet:
    """Pivot columns (0-based ``indices``) of a row-reduced subspace basis."""

    indices: tuple
    n: int
    reduced_basis: tuple = ()

    @property
    def sigma(self) -> tuple:
        """1-based pivot coordinates."""
        return tuple(i + 1 for i in self.indices)

    @property
    def d(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class GrowthRate:
    base: object  # Fraction when rational, else mpf
    constant: float
    certainty: str  # "exact" | "fitted" | "inconclusive"
    sigma: tuple = ()
    residual: float | None = None
    subspace: tuple = ()

    @property
    def expanding(self) -> bool:
        return self.base > 1

    def to_json(self) -> dict:
        return {
            "subspace": [[str(x) if isinstance(x, Fraction) else float(x) for x in v] for v in self.subspace],
            "sigma": list(self.sigma),
            "base": str(self.base) if isinstance(self.base, Fraction) else float(self.base),
            "constant": self.constant,
            "certainty": self.certainty,
            "residual": self.residual,
        }


def pivot_columns(rows: Sequence[Sequence], tol=0) -> PivotSet:
    """Pivot columns of the reduced row echelon form of independent rows."""
    rows = [list(r) for r in rows]
    if not rows:
        return PivotSet((), 0, ())
    n = len(rows[0])
    red, piv, _ = rref(rows, tol)
    if len(piv) < len(rows):
        raise ValidationError("subspace basis rows are linearly dependent")
    return PivotSet(tuple(piv), n, tuple(tuple(r) for r in red))


# ---------------------------------------------------------------------------
# section volumes


def _gram(rows, other=None):
    other = rows if other is None else other
    zero = rows[0][0] * 0
    return [[sum((a * b for a, b in zip(u, v)), zero) for v in other] for u in rows]


def _mp_rows(rows):
    return [[to_mpf(x) for x in r] for r in rows]


def ellipsoid_subspace_section(shape: Matrix, v: Subspace, radius=1):
    """``m_d(V ∩ shape(B(0, radius)))`` in closed form.

    With ``U`` the basis rows of ``V`` the section is
    ``{U^T c : c^T K c <= r^2}``, ``K = U S^{-T} S^{-1} U^T``, so its volume
    is ``c_d r^d sqrt(det(U U^T) / det K)``.
    """
    d = v.dim
    if d == 0:
        return mpmath.mpf(1)
    sinv = shape.inv()
    u = list(v.basis)
    if not (shape.exact and v.exact):
        u = _mp_rows(u)
        sinv = sinv.to_mp()
    w = [sinv @ row for row in u]
    k = _gram(w)
    g = _gram(u)
    ratio = _det(g) / _det(k)
    return unit_ball_volume(d) * to_mpf(radius) ** d * mpmath.sqrt(to_mpf(ratio))


def section_volume(b: Matrix, v: Subspace, j: int, radius=1):
    """``m_d(V ∩ B^j(B(0, radius)))``."""
    return ellipsoid_subspace_section(b.power(j), v, radius)


def parallelotope_section(m: Matrix, v: Subspace):
    """Exact ``m_d(V ∩ M([-1, 1]^n))`` for ``d <= 2`` and exact data.

    Returns ``(rational_measure, gram_det)``; the section measure is
    ``rational_measure * sqrt(gram_det)`` where ``gram_det = det(U U^T)``.
    In the plane case the slice is the polygon
    ``{c : |(M^{-1} U^T c)_i| <= 1}`` in basis coordinates, clipped exactly.
    """
    if not (m.exact and v.exact):
        raise PreconditionError("exact parallelotope sections need rational data")
    d = v.dim
    u = list(v.basis)
    g = _det(_gram(u))
    minv = m.inv()
    cols = [minv @ row for row in u]  # M^{-1} u_k
    n = m.n
    if d == 1:
        # |c * a_i| <= 1 for every coordinate
        bound = min(1 / abs(cols[0][i]) for i in range(n) if cols[0][i] != 0)
        return 2 * bound, g
    if d != 2:
        raise PreconditionError("exact sections are implemented for d <= 2")
    cons = [(cols[0][i], cols[1][i]) for i in range(n) if cols[0][i] != 0 or cols[1][i] != 0]
    # |c_k| is bounded by the l1-norm of row k of (U U^T)^{-1} U M (sup-norm 1 input)
    ginv = _inverse(_gram(u))
    proj = [[sum((ginv[k][t] * u[t][i] for t in range(2)), Fraction(0)) for i in range(n)] for k in range(2)]
    pm = [[sum((proj[k][i] * m.rows[i][s] for i in range(n)), Fraction(0)) for s in range(n)] for k in range(2)]
    bound = max(sum(abs(x) for x in row) for row in pm) + 1
    poly = halfplane_polygon(cons, bound)
    return area(poly), g


def cube_section_area(a: Matrix, v: Subspace, j: int):
    """``m_2(V ∩ A^{-j}([-1, 1]^n))`` as an mpf (exact up to the final sqrt)."""
    rat, g = parallelotope_section(a.power(-j), v)
    return to_mpf(rat) * mpmath.sqrt(to_mpf(g))


# ---------------------------------------------------------------------------
# growth rates


def _fit(js: Sequence[int], values: Sequence) -> tuple[float, float, float]:
    """Least-squares ``log v = log C + j log b``; returns (b, C, R^2)."""
    x = np.array(js, dtype=float)
    y = np.array([float(mpmath.log(v)) for v in values])
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot <= 1e-24 * max(1.0, float(np.sum(y * y))) else 1.0 - ss_res / ss_tot
    return math.exp(slope), math.exp(intercept), r2


def _empirical_constant(base, vols: Sequence, js: Sequence[int]) -> float:
    c = mpmath.mpf(1)
    bb = to_mpf(base)
    for j, v in zip(js, vols):
        ratio = v / bb**j
        c = max(c, ratio, 1 / ratio)
    return float(c)


def fitted_growth(b: Matrix, v: Subspace, jmax: int = 24) -> GrowthRate:
    """Growth base from a log-linear fit over ``j in [J/2, J]``."""
    js = list(range(max(1, jmax // 2), jmax + 1))
    vols = [section_volume(b, v, j) for j in js]
    base, const, r2 = _fit(js, vols)
    certainty = "fitted" if r2 >= FIT_R2_MIN else "inconclusive"
    return GrowthRate(mpmath.mpf(base), max(const, 1 / const), certainty, (), 1.0 - r2, v.basis)


def subspace_growth(b: Matrix, v: Subspace, jcheck: int = 12, companion=None) -> GrowthRate:
    """Exact growth base of ``m_d(V ∩ B^j(B(0, 1)))``, or a fitted fallback.

    The exact route maps ``V`` by the Jordan change of basis ``P`` of the
    positive-spectrum companion (``P B~ P^{-1}`` has the moduli on its
    diagonal, ascending), takes RREF pivots and multiplies the moduli.
    A numerically ambiguous Jordan structure or pivot falls back to the fit.
    ``companion`` may carry a precomputed :func:`positive_companion` of ``b``.
    """
    b.require_invertible()
    if v.n != b.n:
        raise ValidationError("dimension mismatch")
    if v.dim == 0:
        raise PreconditionError("subspace must be nontrivial")
    try:
        comp = companion if companion is not None else positive_companion(b)
    except JordanAmbiguityError:
        return fitted_growth(b, v)
    jd = comp.jordan
    p = jd.basis_change
    exact = jd.exact and v.exact
    rows = [p @ list(row) for row in (v.basis if exact else _mp_rows(v.basis))]
    if not exact:
        rows = [[to_mpf(x) for x in r] for r in rows]
        scale = max(abs(x) for r in rows for x in r)
        rows = [[x / scale for x in r] for r in rows]
        tol = PIVOT_TOL if jd.exact or b.exact else NUMERIC_PIVOT_TOL
    else:
        tol = 0
    red, piv, min_pivot = rref(rows, tol)
    if len(piv) < v.dim:
        raise ValidationError("subspace basis is degenerate in Jordan coordinates")
    if not exact and min_pivot is not None and min_pivot < 1e3 * tol:
        return fitted_growth(b, v)
    moduli = []
    for blk in jd.blocks:
        if blk.exact_value is not None:
            val = abs(blk.exact_value)
        else:
            val = mpmath.sqrt(mpmath.mpf(blk.eigenvalue.real) ** 2 + mpmath.mpf(blk.eigenvalue.imag) ** 2)
        moduli.extend([val] * blk.real_dim)
    base = Fraction(1) if all(isinstance(moduli[i], Fraction) for i in piv) else mpmath.mpf(1)
    for i in piv:
        base = base * moduli[i]
    js = list(range(1, jcheck + 1))
    vols = [section_volume(b, v, j) for j in js]
    const = _empirical_constant(base, vols, js)
    return GrowthRate(base, const, "exact", tuple(i + 1 for i in piv), None, v.basis)


def pivot_sandwich_ratio(bj: Matrix, v: Subspace, j: int, radius=1):
    """Ratio bounded by ``n^{±d/2}`` for positive-spectrum Jordan-form ``bj``.

    Numerator: ``m_d(P_sigma(V ∩ bj^j(B(0, r))))``; denominator:
    ``m_d((P_sigma bj P_sigma)^j(B(0, r)))`` in the pivot coordinates.
    """
    ps = pivot_columns(v.basis if v.exact else _mp_rows(v.basis), 0 if v.exact else PIVOT_TOL)
    red = [list(r) for r in ps.reduced_basis]
    bpow = bj.power(j)
    binv = bpow.inv()
    if not (bj.exact and v.exact):
        red = _mp_rows(red)
        binv = binv.to_mp()
    w = [binv @ r for r in red]
    k = _det(_gram(w))
    num = unit_ball_volume(ps.d) * to_mpf(radius) ** ps.d / mpmath.sqrt(to_mpf(k))
    sub = [[bj.rows[a][c] for c in ps.indices] for a in ps.indices]
    den = unit_ball_volume(ps.d) * to_mpf(radius) ** ps.d * abs(to_mpf(_det(sub))) ** j
    return num / den


# ---------------------------------------------------------------------------
# ellipsoid sections and projections


def section_constant(n: int):
    """``C_n = pi^{(n-1)/2} / Gamma((n+1)/2)``, the (n-1)-ball volume."""
    return mpmath.pi ** (mpmath.mpf(n - 1) / 2) / mpmath.gamma(mpmath.mpf(n + 1) / 2)


def ellipsoid_section_volume(a: Matrix, xi: Sequence):
    """Central hyperplane section of ``A(B(0,1))`` orthogonal to unit ``xi``.

    Equals ``C_n |det A| / ||A^T xi||``.
    """
    xi = [to_mpf(x) for x in xi]
    norm = mpmath.sqrt(sum(x * x for x in xi))
    if abs(norm - 1) > mpmath.mpf(10) ** -12:
        raise ValidationError("xi must be a unit vector")
    at = a.to_mp().T
    w = at @ xi
    return section_constant(a.n) * to_mpf(a.abs_det()) / mpmath.sqrt(sum(x * x for x in w))


def _sample_ball(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    g = rng.standard_normal((size, n))
    g /= np.linalg.norm(g, axis=1)[:, None]
    r = rng.random(size) ** (1.0 / n)
    return g * r[:, None]


def monte_carlo_section(a: Matrix, xi: Sequence, samples: int = 10**6, seed: int = 0) -> float:
    """Slab estimate of the central section of ``A(B(0,1))`` orthogonal to ``xi``.

    Points are drawn uniformly from the ellipsoid; the fraction landing in the
    slab ``|<x, xi>| <= h/2`` times the volume, divided by ``h``, estimates the
    section. Two slab widths (``w/2`` and ``w/4``, ``w`` the support width
    ``||A^T xi||``) are combined by Richardson extrapolation to remove the
    ``h^2`` bias.
    """
    arr = a.to_numpy()
    n = arr.shape[0]
    rng = np.random.default_rng(seed)
    xs = _sample_ball(rng, n, samples) @ arr.T
    xi = np.asarray(xi, dtype=float)
    proj = np.abs(xs @ xi)
    w = float(np.linalg.norm(arr.T @ xi))
    vol = float(unit_ball_volume(n)) * abs(float(np.linalg.det(arr)))
    est = []
    for h in (w / 2, w / 4):
        frac = float(np.mean(proj <= h / 2))
        est.append(frac * vol / h)
    return (4 * est[1] - est[0]) / 3


def _semi_axes(e: Ellipsoid) -> list[float]:
    sv = np.linalg.svd(e.shape.to_numpy(), compute_uv=False)
    return sorted((float(s) * to_float(e.radius) for s in sv), reverse=True)


def section_upper_bound(e: Ellipsoid, v: Subspace):
    """``c_k * prod`` of the ``k`` largest semi-axes of ``e`` (``k = dim V``)."""
    k = v.dim
    axes = _semi_axes(e)
    prod = mpmath.mpf(1)
    for s in axes[:k]:
        prod *= s
    return unit_ball_volume(k) * prod


def projection_volume(e: Ellipsoid, v: Subspace):
    """Volume of the orthogonal projection of ``e`` onto ``V^perp``."""
    perp = v.orthogonal_complement() if v.dim < v.n else []
    k = len(perp)
    if k == 0:
        return mpmath.mpf(1)
    nr = _mp_rows(perp)
    sm = e.shape.to_mp()
    nm = [list(sm.T @ row) for row in nr]  # rows of N M
    num = _det(_gram(nm))
    den = _det(_gram(nr))
    return unit_ball_volume(k) * to_mpf(e.radius) ** k * mpmath.sqrt(num / den)


def projection_section_check(e: Ellipsoid, v: Subspace):
    """``(lhs, rhs, holds)`` for ``m_d(E ∩ V) m_{n-d}(Q E) <= 2^n m_n(E)``."""
    if e.center is not None and any(c != 0 for c in e.center):
        raise PreconditionError("ellipsoid must be centred at the origin")
    sec = ellipsoid_subspace_section(e.shape, v, e.radius)
    lhs = sec * projection_volume(e, v)
    rhs = 2**e.n * e.volume
    return lhs, rhs, bool(lhs <= rhs)


# ---------------------------------------------------------------------------
# ball slices of dilated packing sets


@dataclass(frozen=True)
class SliceBound:
    """``|B(x, 1) ∩ A(W)|`` enclosed in ``[inner, outer]`` against ``C / count``."""

    inner: Fraction
    outer: Fraction
    bound: float
    count: int
    constant: float

    @property
    def measured(self) -> float:
        return float(self.outer + self.inner) / 2

    @property
    def gap(self) -> Fraction:
        return self.outer - self.inner

    @property
    def holds(self) -> bool:
        return float(self.outer) <= self.bound

    def to_json(self) -> dict:
        return {
            "measured": self.measured,
            "inner": float(self.inner),
            "outer": float(self.outer),
            "gap": float(self.gap),
            "bound": self.bound,
            "count": self.count,
            "constant": self.constant,
            "holds": self.holds,
        }


def _ball_polygons(center, sides: int):
    """Rational polygons ``P_in ⊆ B(center, 1) ⊆ P_out`` (regular ``sides``-gons)."""
    from .regions import Region

    inner, outer = [], []
    grow = 1 / math.cos(math.pi / sides)
    for k in range(sides):
        t = 2 * math.pi * k / sides
        c, s = math.cos(t), math.sin(t)
        # small outward/inward slack absorbs the rounding of cos and sin
        inner.append((Fraction(c * (1 - 1e-9)).limit_denominator(10**12), Fraction(s * (1 - 1e-9)).limit_denominator(10**12)))
        outer.append((Fraction(c * grow * (1 + 1e-9)).limit_denominator(10**12), Fraction(s * grow * (1 + 1e-9)).limit_denominator(10**12)))
    cx, cy = center
    pin = Region.polygon([(x + cx, y + cy) for x, y in inner])
    pout = Region.polygon([(x + cx, y + cy) for x, y in outer])
    return pin, pout


def _ball_cells(center, cells: int):
    """Grid boxes inside / meeting ``B(center, 1)`` in 3-D, as two piece lists."""
    from .regions.pieces import Box

    h = Fraction(2, cells)
    inside, meeting = [], []
    for idx in np.ndindex(cells, cells, cells):
        lo = [Fraction(-1) + i * h for i in idx]
        hi = [c + h for c in lo]
        far = sum(max(a * a, b * b) for a, b in zip(lo, hi))
        near = sum(Fraction(0) if a <= 0 <= b else min(a * a, b * b) for a, b in zip(lo, hi))
        box = Box(tuple(a + c for a, c in zip(lo, center)), tuple(b + c for b, c in zip(hi, center)))
        if far <= 1:
            inside.append(box)
        if near <= 1:
            meeting.append(box)
    return inside, meeting


def slice_bound_check(w, a: Matrix, x: Sequence = None, lattice=None, sides: int = 256, cells: int = 16) -> SliceBound:
    """Compare ``|B(x, 1) ∩ A(W)|`` with ``C / #(A^{-1} B(0, 1) ∩ Gamma)``.

    ``W`` must pack by ``Gamma`` translations; ``C = 3^n n! m_n(B(0, 1))``.
    The ball is replaced by inscribed and circumscribed polygons (dim 2),
    grid-cell unions (dim 3) or the exact interval (dim 1), so the measured
    value comes as an exact enclosure ``[inner, outer]``; ``holds`` uses the
    outer value.
    """
    from .lattice import Lattice, orbit_count
    from .regions import Region, translation_check
    from .regions.pieces import frac

    n = w.dim
    lattice = Lattice.integer(n) if lattice is None else lattice
    if not translation_check(w, lattice).packs:
        raise PreconditionError("W does not pack by lattice translations")
    x = tuple(frac(c) for c in (x if x is not None else [0] * n))
    aw = w.affine_image(a)
    if n == 1:
        inner = outer = aw.intersect(Region.interval(x[0] - 1, x[0] + 1)).volume
    elif n == 2:
        pin, pout = _ball_polygons(x, sides)
        inner = aw.intersect(pin).volume
        outer = aw.intersect(pout).volume
    else:
        ins, meet = _ball_cells(x, cells)
        inner = sum((aw.intersect(Region(3, (b,))).volume for b in ins), Fraction(0))
        outer = sum((aw.intersect(Region(3, (b,))).volume for b in meet), Fraction(0))
    count = orbit_count(a, lattice, 1, 1)
    const = 3**n * math.factorial(n) * float(unit_ball_volume(n))
    return SliceBound(inner, outer, const / count, count, const)
