"""Packing, covering and tiling checks by lattice translations and by dilations.

Translation checks work in lattice coordinates ``c = L^{-1} x``, where the
half-open parallelepiped of the basis becomes the unit cube. Each piece is
cut along the integer grid and shifted into the cube; overlaps among the
shifted pieces are then counted layer by layer.

Dilation checks compare ``A^m S`` with ``S`` for finitely many ``m`` and
certify that no other power can overlap. Two certificates are available:

* norm separation, for expanding matrices: if ``S`` lies in the annulus
  ``r0 <= |x| <= r1`` then ``A^m S`` lies outside radius ``r0 / ||A^{-m}||``;
* coordinate separation, for diagonal matrices: a coordinate with
  ``|d_k| > 1`` on which ``S`` stays away from zero separates the images.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..errors import PreconditionError, ValidationError, WindowError
from ..lattice import Lattice
from ..linalg import Matrix, spectrum
from .region import Region, union_all

MAX_WINDOW = 100_000
PROBE_POWERS = 8


@dataclass(frozen=True)
class TilingReport:
    """Outcome of a pack/cover check.

    ``excess_volume`` is zero exactly when the set packs. For translations
    it is the overlap measure ``sum |reduced pieces| - |reduced union|``; for
    dilations it is ``sum_{m >= 1} |S ∩ A^m S|``. ``deficit_volume`` is
    measured against ``reference_volume`` (the fundamental domain, or the
    reference dilation generator). ``truncation_bound`` is the certified
    overlap outside the checked window, zero when the certificate holds.
    """

    packs: bool
    covers: bool | None
    excess_volume: Fraction
    deficit_volume: Fraction | None
    truncation_bound: Fraction = Fraction(0)
    multiplicity: int | None = None
    window: tuple | None = None
    reference_volume: Fraction | None = None
    certificate: str = ""
    notes: tuple = ()

    @property
    def tiles(self) -> bool:
        return bool(self.packs and self.covers)

    def to_json(self) -> dict:
        def f(x):
            if x is None:
                return None
            return str(x) if isinstance(x, Fraction) and x.denominator != 1 else (int(x) if isinstance(x, Fraction) else x)

        return {
            "packs": self.packs,
            "covers": self.covers,
            "tiles": self.tiles,
            "excess_volume": f(self.excess_volume),
            "deficit_volume": f(self.deficit_volume),
            "truncation_bound": f(self.truncation_bound),
            "multiplicity": self.multiplicity,
            "window": None if self.window is None else list(self.window),
            "reference_volume": f(self.reference_volume),
            "certificate": self.certificate,
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
# lattice coordinates


def _lattice_map(lattice: Lattice, dim: int) -> Matrix:
    if not lattice.exact:
        raise PreconditionError("region checks need a lattice with rational generators")
    if lattice.n != dim:
        raise ValidationError(f"lattice dimension {lattice.n} does not match region dimension {dim}")
    lmat = lattice.column_matrix
    if dim == 3 and not lmat.is_diagonal():
        raise PreconditionError("3-D region checks need a lattice with a diagonal basis")
    return lmat


def to_lattice_coordinates(s: Region, lattice: Lattice) -> Region:
    return s.affine_image(_lattice_map(lattice, s.dim).inv())


def from_lattice_coordinates(s: Region, lattice: Lattice) -> Region:
    return s.affine_image(_lattice_map(lattice, s.dim))


@dataclass(frozen=True)
class FundamentalDomain:
    """Half-open basis parallelepiped ``{L t : t in [0, 1)^n}`` of a lattice."""

    region: Region
    covolume: Fraction
    lattice: Lattice

    @classmethod
    def of(cls, lattice: Lattice) -> "FundamentalDomain":
        n = lattice.n
        cube = Region.box([0] * n, [1] * n)
        return cls(from_lattice_coordinates(cube, lattice), lattice.covolume, lattice)


def _unit_cube(dim: int) -> Region:
    return Region.box([0] * dim, [1] * dim)


def _piece_key(dim, p):
    return tuple(sorted(p)) if dim == 2 else (p.lo, p.hi)


def reduce_modulo(sc: Region) -> list[tuple[tuple, Region]]:
    """Cut a region given in lattice coordinates into pieces of the unit cube.

    Returns ``(k, piece)`` pairs with ``piece + k`` a part of the input, sorted
    lexicographically by the reduced piece's vertices and then by ``k``.
    """
    dim = sc.dim
    cube = _unit_cube(dim)
    out = []
    for p in sc.pieces:
        lo, hi = sc.piece_bounds(p)
        ranges = [range(math.floor(a), math.ceil(b)) for a, b in zip(lo, hi)]
        single = Region(dim, (p,))
        for k in itertools.product(*ranges):
            moved = single.translate([-c for c in k]).intersect(cube)
            for q in moved.pieces:
                out.append((tuple(k), Region(dim, (q,))))
    out.sort(key=lambda item: (_piece_key(dim, item[1].pieces[0]), item[0]))
    return out


def _layers(reduced, limit: int | None = None):
    """Multiplicity layers: layer m holds points covered at least m+1 times.

    Returns ``(layers, assignment, overflow)``, where ``assignment[m]`` lists
    ``(k, part)`` pairs placed in layer ``m`` and ``overflow`` is the measure
    that did not fit under ``limit`` layers.
    """
    layers: list[Region] = []
    assignment: list[list] = []
    overflow = Fraction(0)
    for k, piece in reduced:
        rem = piece
        m = 0
        while not rem.is_null():
            if limit is not None and m >= limit:
                overflow += rem.volume
                break
            if m == len(layers):
                layers.append(Region.empty(piece.dim))
                assignment.append([])
            part = rem.difference(layers[m])
            if not part.is_null():
                if piece.dim == 1:
                    layers[m] = layers[m].union(part)
                else:
                    layers[m] = Region(piece.dim, layers[m].pieces + part.pieces)
                assignment[m].append((k, part))
                rem = rem.difference(part)
            m += 1
    return layers, assignment, overflow


def translation_check(s: Region, lattice: Lattice) -> TilingReport:
    """Pack/cover test of ``S`` under translations by ``lattice``."""
    if s.dim != lattice.n:
        raise ValidationError("region and lattice dimensions differ")
    sc = to_lattice_coordinates(s, lattice)
    reduced = reduce_modulo(sc)
    layers, _, _ = _layers(reduced)
    covol = lattice.covolume
    total = sum((r.volume for _, r in reduced), Fraction(0))
    union = layers[0].volume if layers else Fraction(0)
    excess = (total - union) * covol
    deficit = (1 - union) * covol
    return TilingReport(
        packs=excess == 0,
        covers=deficit == 0,
        excess_volume=excess,
        deficit_volume=deficit,
        multiplicity=len(layers),
        reference_volume=covol,
        certificate="exact reduction modulo the lattice",
    )


def redundant_partition(u: Region, lattice: Lattice, m: int) -> list[Region]:
    """Split an ``m``-redundantly packing set into ``m`` translation-packing sets.

    Layer ``i`` collects, in lexicographic order of reduced pieces, whatever
    part of each piece is not yet covered in layers ``0..i-1``.
    """
    if m < 1:
        raise ValidationError("M must be at least 1")
    sc = to_lattice_coordinates(u, lattice)
    reduced = reduce_modulo(sc)
    _, assignment, overflow = _layers(reduced, limit=m)
    if overflow:
        raise PreconditionError(
            f"set does not pack {m}-redundantly: measure {overflow * lattice.covolume} is covered more than {m} times"
        )
    out = []
    for i in range(m):
        parts = assignment[i] if i < len(assignment) else []
        moved = [part.translate(k) for k, part in parts]
        out.append(from_lattice_coordinates(union_all(u.dim, moved), lattice))
    return out


def tau_map(v: Region, u: Region, lattice: Lattice) -> Region:
    """``tau_U(V) = union over gamma of (gamma + V) ∩ U`` (finitely many gamma)."""
    if v.dim != u.dim:
        raise ValidationError("dimension mismatch")
    if u.is_null() or v.is_null():
        return Region.empty(u.dim)
    vc = to_lattice_coordinates(v, lattice)
    uc = to_lattice_coordinates(u, lattice)
    ulo, uhi = uc.bounding_box()
    parts = []
    for p in vc.pieces:
        plo, phi = vc.piece_bounds(p)
        # shifts k with (p + k) meeting the open bounding box of U
        ranges = [range(math.floor(a - d) + 1, math.ceil(b - c)) for a, b, c, d in zip(ulo, uhi, plo, phi)]
        single = Region(v.dim, (p,))
        for k in itertools.product(*ranges):
            parts.append(single.translate(k).intersect(uc))
    return from_lattice_coordinates(union_all(u.dim, parts), lattice)


# ---------------------------------------------------------------------------
# dilation windows


def _exact_matrix(a, dim: int) -> Matrix:
    from .region import _as_exact_matrix

    return _as_exact_matrix(a, dim)


class _NormRoute:
    """Spectral norms of ``B^m`` for ``B = M^{-1}``, ``M`` expanding, with a tail bound.

    Once ``||B^K|| = rho < 1``, submultiplicativity gives
    ``||B^m|| <= rho^q * max_{s < K} ||B^s||`` for ``m = qK + s``.
    """

    def __init__(self, b: np.ndarray, norms: list, power: np.ndarray, period: int):
        self.b = b
        self.norms = norms
        self.power = power
        self.period = period
        self.rho = norms[period]
        self.cmax = max(norms[:period])

    @classmethod
    def build(cls, a: Matrix, kmax: int = 400) -> "_NormRoute | None":
        b = np.linalg.inv(a.to_numpy())
        p = np.eye(a.n)
        norms = [1.0]
        for k in range(1, kmax + 1):
            p = p @ b
            norms.append(float(np.linalg.norm(p, 2)) * (1 + 1e-9))
            if norms[-1] < 1:
                return cls(b, norms, p, k)
        return None

    def norm(self, m: int) -> float:
        while len(self.norms) <= m:
            self.power = self.power @ self.b
            self.norms.append(float(np.linalg.norm(self.power, 2)) * (1 + 1e-9))
        return self.norms[m]

    def last_failure(self, ratio: float) -> int:
        """Largest ``m >= 1`` with ``||B^m|| >= ratio`` (0 if none)."""
        q0 = 0
        if self.cmax >= ratio:
            q0 = math.floor(math.log(self.cmax / ratio) / math.log(1 / self.rho)) + 1
        top = q0 * self.period
        if top > MAX_WINDOW:
            raise WindowError(f"norm certificate needs more than {MAX_WINDOW} powers", required=top)
        last = 0
        for m in range(1, top + 1):
            if self.norm(m) >= ratio:
                last = m
        return last


class DilationWindow:
    """Certifies ``|A^m X ∩ Y| = 0`` beyond a finite index for an exact matrix ``A``."""

    def __init__(self, a, dim: int | None = None):
        self.a = _exact_matrix(a, dim if dim is not None else (a.n if isinstance(a, Matrix) else 1))
        if self.a.det() == 0:
            raise ValidationError("matrix must be invertible")
        self.dim = self.a.n
        self.inverse = self.a.inv()
        self._routes = {}

    def _norm_route(self, forward: bool):
        key = ("norm", forward)
        if key not in self._routes:
            m = self.a if forward else self.inverse
            sp = spectrum(m)
            self._routes[key] = _NormRoute.build(m) if sp.all_greater_than_one() else None
        return self._routes[key]

    def _one_way(self, forward: bool, x: Region, y: Region) -> tuple[int, str] | None:
        """Index for the expanding direction ``forward`` (A if True, A^{-1} if False)."""
        best = None
        route = self._norm_route(forward)
        if route is not None:
            r0 = math.sqrt(float(x.min_norm_sq())) * (1 - 1e-12)
            r1 = math.sqrt(float(y.max_norm_sq())) * (1 + 1e-12)
            if r0 > 0:
                best = (route.last_failure(r0 / r1), "norm")
        m = self.a if forward else self.inverse
        if m.is_diagonal():
            for k, d in enumerate(m.diagonal()):
                if abs(d) <= 1:
                    continue
                lo, _ = x.coordinate_range(k)
                _, hi = y.coordinate_range(k)
                if lo <= 0:
                    continue
                # smallest M with lo |d|^m > hi for every m > M
                idx, val = 0, lo * abs(d)
                while val <= hi:
                    idx += 1
                    val *= abs(d)
                if best is None or idx < best[0]:
                    best = (idx, f"coordinate {k + 1}")
        return best

    def separation(self, x: Region, y: Region) -> tuple[int, str]:
        """``M`` with ``|A^m X ∩ Y| = 0`` for every ``m > M``, and the certificate used.

        ``A^m X ∩ Y`` is null iff ``X ∩ A^{-m} Y`` is, so both the expanding
        route on ``(X, Y)`` and the inverse route on ``(Y, X)`` are tried.
        """
        if x.is_null() or y.is_null():
            return 0, "empty"
        options = [o for o in (self._one_way(True, x, y), self._one_way(False, y, x)) if o is not None]
        if not options:
            raise WindowError(
                "no certificate: the matrix is neither expanding nor diagonal with a coordinate "
                "on which the sets stay away from zero",
                required=None,
            )
        return min(options)

    def two_sided(self, x: Region, y: Region) -> tuple[int, int, str]:
        """``(lo, hi)`` such that ``A^j X`` can meet ``Y`` only for ``lo <= j <= hi``."""
        hi, c1 = self.separation(x, y)
        back = DilationWindow(self.inverse)
        lo, c2 = back.separation(x, y)
        return -lo, hi, f"{c1} / {c2}"


def d_map(v: Region, w: Region, a, window: tuple | None = None) -> Region:
    """``d_W(V) = union over j of A^j V ∩ W`` over a certified window."""
    if v.dim != w.dim:
        raise ValidationError("dimension mismatch")
    if v.is_null() or w.is_null():
        return Region.empty(w.dim)
    cert = DilationWindow(a, v.dim)
    lo, hi, _ = cert.two_sided(v, w)
    if window is not None:
        wlo, whi = window
        if wlo > lo or whi < hi:
            raise WindowError(f"window {window} is too small; need [{lo}, {hi}]", required=(lo, hi))
    return union_all(w.dim, (_power_image(v, cert, j).intersect(w) for j in range(lo, hi + 1)))


def _power_image(s: Region, cert: DilationWindow, j: int) -> Region:
    return s.affine_image(cert.a.power(j)) if j else s


def dilation_check(
    s: Region, a, window: tuple | None = None, reference: Region | None = None
) -> TilingReport:
    """Pack/cover test of ``S`` under the dilation group generated by ``A``.

    Packing: ``|S ∩ A^m S| = 0`` for ``1 <= m <= M`` where ``M`` comes from a
    separation certificate. Covering: ``d_R(S) = R`` for the reference
    generator ``R`` (default: :func:`dilation_generator`), which tiles by
    dilations, so ``S`` covers wherever ``R``'s dilates do.
    """
    cert = DilationWindow(a, s.dim)
    det = cert.a.det()
    if abs(det) == 1:
        raise PreconditionError("dilation checks need |det A| != 1")
    if s.is_null():
        raise PreconditionError("empty set")
    try:
        big, how = cert.separation(s, s)
    except WindowError:
        # no certificate; an overlap at a small power still decides packing
        for m in range(1, PROBE_POWERS + 1):
            overlap = _power_image(s, cert, m).intersect(s).volume
            if overlap:
                return TilingReport(
                    packs=False,
                    covers=None,
                    excess_volume=overlap,
                    deficit_volume=None,
                    truncation_bound=None,
                    window=(-m, m),
                    certificate=f"overlap |S ∩ A^{m} S| > 0 found; no separation certificate",
                    notes=("excess is a lower bound",),
                )
        raise
    if window is not None:
        wlo, whi = window
        if min(-wlo, whi) < big:
            raise WindowError(f"window {window} is too small; need [-{big}, {big}]", required=(-big, big))
    excess = Fraction(0)
    for m in range(1, big + 1):
        excess += _power_image(s, cert, m).intersect(s).volume
    notes = []
    covers = None
    deficit = None
    ref_vol = None
    if reference is None:
        try:
            gen = dilation_generator(cert.a)
            reference = gen.region
            if gen.truncated:
                notes.append(f"reference truncated at L = {gen.L}")
        except PreconditionError as exc:
            notes.append(f"no reference generator: {exc}")
    if reference is not None:
        try:
            image = d_map(s, reference, cert.a)
        except WindowError as exc:
            notes.append(f"coverage undetermined: {exc}")
        else:
            ref_vol = reference.volume
            deficit = ref_vol - image.volume
            covers = deficit == 0
    return TilingReport(
        packs=excess == 0,
        covers=covers,
        excess_volume=excess,
        deficit_volume=deficit,
        window=(-big, big),
        reference_volume=ref_vol,
        certificate=f"{how} separation beyond |j| = {big}",
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# reference generators


@dataclass(frozen=True)
class DilationGenerator:
    """A set whose dilates tile (or, when truncated, pack) and its provenance."""

    region: Region
    kind: str
    truncated: bool = False
    L: Fraction | None = None
    approximate: bool = False
    note: str = ""


def _cube(dim: int, h=1) -> Region:
    return Region.box([-h] * dim, [h] * dim)


def dilation_generator(a, L=None, kind: str = "auto") -> DilationGenerator:
    """Exact generator ``D`` with ``A^j D`` pairwise null-overlapping.

    Kinds:

    * ``"interval"`` (dim 1): ``[-l, -1] ∪ [1, l]`` with ``l = |a|`` (or ``1/|a|``).
    * ``"cube-annulus"``: ``A Q \\ Q`` for the cube ``Q = [-1, 1]^n`` when
      ``A`` expands and ``A Q ⊇ Q``; the dilates tile ``R^n \\ {0}``.
    * ``"real-band"`` (diagonal ``A``): ``1 <= |x_k| <= |d_k|`` for an
      expanding coordinate ``k``, other coordinates truncated to ``[-L, L]``.
      The dilates pack; they cover only the truncated window.
    """
    dim = a.n if isinstance(a, Matrix) else 1
    m = _exact_matrix(a, dim)
    if abs(m.det()) == 1 and not m.is_diagonal():
        raise PreconditionError("generators need |det A| != 1 or a diagonal matrix")
    if abs(m.det()) < 1:
        m = m.inv()
    if dim == 1 and kind in ("auto", "interval"):
        lam = abs(m[0, 0])
        return DilationGenerator(Region.intervals([(-lam, -1), (1, lam)]), "interval")
    sp = spectrum(m)
    if kind in ("auto", "cube-annulus") and sp.all_greater_than_one():
        q = _cube(dim)
        aq = q.affine_image(m) if dim < 3 or m.is_diagonal() else None
        if aq is not None and q.issubset(aq):
            return DilationGenerator(aq.difference(q), "cube-annulus")
        if kind == "cube-annulus":
            raise PreconditionError("A Q does not contain the unit cube Q")
    if kind in ("auto", "real-band") and m.is_diagonal():
        d = m.diagonal()
        k = max(range(dim), key=lambda i: (abs(d[i]), -i))
        if abs(d[k]) <= 1:
            raise PreconditionError("no expanding coordinate")
        big = Fraction(4) if L is None else Fraction(L)
        lo = [-big] * dim
        hi = [big] * dim
        pieces = []
        for sign in (-1, 1):
            plo, phi = list(lo), list(hi)
            a1, b1 = sign * 1, sign * abs(d[k])
            plo[k], phi[k] = min(a1, b1), max(a1, b1)
            pieces.append(Region.box(plo, phi))
        region = union_all(dim, pieces)
        return DilationGenerator(region, "real-band", truncated=dim > 1, L=big if dim > 1 else None)
    raise PreconditionError(f"no exact generator of kind {kind!r} for this matrix")
