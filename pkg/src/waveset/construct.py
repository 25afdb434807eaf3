"""Finite-depth constructions of sets that tile by dilations and pack by translations.

Three layers, each returning a :class:`WaveletCandidate` with a trace:

* :func:`build_packing_preimage` finds a small ``V`` that packs by
  translations and dilations with ``d_W(V)`` filling a target ``U ⊆ W``.
  It starts from a packing layer of ``A^{-J} U`` and repeatedly adds a
  packing layer of ``A^{-j-1}`` of the still-uncovered part, removing the
  translation-equivalent part of the previous set.
* :func:`build_wavelet_core` runs that step shell by shell over a finite
  partition of a dilation generator ``W``.
* :func:`csb_upgrade` moves the translation hole of a set that tiles by
  dilations out to a far dilate, shrinking the hole by ``1/|det A|`` or
  better per step.

Everything is exact rational arithmetic on :class:`~waveset.regions.Region`.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import ConstructionError, PreconditionError, ValidationError
from .lattice import Lattice
from .linalg import Matrix, spectrum
from .regions import (
    FundamentalDomain,
    Region,
    TilingReport,
    d_map,
    dilation_check,
    dilation_generator,
    redundant_partition,
    tau_map,
    translation_check,
)
from .regions.pieces import frac
from .regions.region import _as_exact_matrix
from .regions.tiling import DilationWindow

RING_SIDES = 64


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    L: Fraction | None
    eigen_moduli: tuple
    truncated: bool = False
    approximate: bool = False
    area_error: float = 0.0
    note: str = ""

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "L": None if self.L is None else str(self.L),
            "eigen_moduli": list(self.eigen_moduli),
            "truncated": self.truncated,
            "approximate": self.approximate,
            "area_error": self.area_error,
            "note": self.note,
        }


def _matrix(a, dim: int | None = None) -> Matrix:
    if isinstance(a, Matrix):
        return _as_exact_matrix(a, a.n)
    if isinstance(a, (int, Fraction, str)):
        return _as_exact_matrix(frac(a), 1)
    rows = [list(r) for r in a]
    return _as_exact_matrix(rows, len(rows))


def _ring_polygon(sides: int) -> Region:
    pts = []
    for k in range(sides):
        t = 2 * math.pi * (k + 0.5) / sides
        pts.append((Fraction(math.cos(t)).limit_denominator(10**6), Fraction(math.sin(t)).limit_denominator(10**6)))
    return Region.polygon(pts)


def tiling_generator(a, L=None, kind: str = "auto", sides: int = RING_SIDES) -> tuple[Region, GeneratorSpec]:
    """A region whose dilates pack, and tile when not truncated.

    ``kind`` is one of ``"auto"``, ``"interval"`` (dim 1),
    ``"expansive-annulus"`` (``A Q \\ Q`` for the unit cube ``Q``),
    ``"complex-annulus"`` (``A P \\ P`` for a rational ``sides``-gon ``P``
    close to the unit disk; the dilates tile exactly, and the area differs
    from the round annulus ``1 < |x| < |lambda|`` by the reported error) and
    ``"real-band"`` (diagonal ``A``: ``1 <= |x_k| <= |lambda_k|`` with other
    coordinates truncated to ``[-L, L]``).
    """
    m = _matrix(a)
    det = m.det()
    if det == 0:
        raise ValidationError("matrix is singular")
    if abs(det) < 1:
        m = m.inv()
    sp = spectrum(m)
    moduli = tuple(float(x) for x in sp.moduli_sorted)
    if L is not None:
        L = frac(L)
        if L < Fraction(1, 2):
            raise PreconditionError("L must be at least 1/2 so the slab holds a unit cell")
    if m.n == 1:
        gen = dilation_generator(m, kind="interval")
        return gen.region, GeneratorSpec("interval", None, moduli)
    if kind == "complex-annulus":
        return _complex_ring(m, moduli, sides)
    if kind in ("auto", "expansive-annulus") and sp.all_greater_than_one():
        try:
            gen = dilation_generator(m, kind="cube-annulus")
            return gen.region, GeneratorSpec("expansive-annulus", None, moduli)
        except PreconditionError:
            if kind == "auto" and m.n == 2 and _complex(m):
                return _complex_ring(m, moduli, sides)
            raise
    if kind in ("auto", "real-band"):
        if not m.is_diagonal():
            raise PreconditionError("real bands are built for diagonal matrices only")
        gen = dilation_generator(m, L=L, kind="real-band")
        note = "dilates pack; coverage only inside the truncated slab" if gen.truncated else ""
        return gen.region, GeneratorSpec("real-band", gen.L, moduli, truncated=gen.truncated, note=note)
    raise PreconditionError(f"no generator of kind {kind!r} for this matrix")


def _complex_ring(m: Matrix, moduli: tuple, sides: int) -> tuple[Region, GeneratorSpec]:
    if m.n != 2:
        raise PreconditionError("the polygonal ring is available in dimension 2 only")
    p = _ring_polygon(sides)
    ap = p.affine_image(m)
    if not p.issubset(ap):
        raise PreconditionError("A P does not contain the polygon P; no exact ring")
    ring = ap.difference(p)
    ideal = math.pi * (float(abs(m.det())) - 1)
    err = abs(float(ring.volume) - ideal)
    return ring, GeneratorSpec(
        "complex-annulus", None, moduli, approximate=True, area_error=err,
        note=f"{sides}-gon ring; dilates tile exactly, area differs from the round annulus by {err:.3g}",
    )


def _complex(m: Matrix) -> bool:
    tr = m[0, 0] + m[1, 1]
    return tr * tr - 4 * m.det() < 0


# ---------------------------------------------------------------------------
# traces and candidates


@dataclass
class BuildTrace:
    """Append-only per-iteration records of a construction."""

    stage: str
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add(self, **row) -> None:
        self.rows.append(row)

    def columns(self) -> list[str]:
        cols: list[str] = []
        for r in self.rows:
            for k in r:
                if k not in cols:
                    cols.append(k)
        return cols

    def to_csv(self) -> str:
        out = io.StringIO()
        cols = self.columns()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow([_cell(r.get(c)) for c in cols])
        return out.getvalue()

    def to_json(self) -> dict:
        return {
            "stage": self.stage,
            "rows": [{k: _cell(v) for k, v in r.items()} for r in self.rows],
            "notes": list(self.notes),
        }


def _cell(v):
    if isinstance(v, Fraction):
        return "%.17g" % float(v)
    if isinstance(v, float):
        return "%.17g" % v
    return v


@dataclass
class WaveletCandidate:
    region: Region
    trace: BuildTrace
    dilation: TilingReport | None = None
    translation: TilingReport | None = None
    generator: GeneratorSpec | None = None
    extra: dict = field(default_factory=dict)
    inner_traces: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "region": self.region.to_json(),
            "volume": str(self.region.volume),
            "dilation": None if self.dilation is None else self.dilation.to_json(),
            "translation": None if self.translation is None else self.translation.to_json(),
            "generator": None if self.generator is None else self.generator.to_json(),
            "trace": self.trace.to_json(),
            "extra": {k: _cell(v) for k, v in self.extra.items()},
            "inner_traces": [t.to_json() for t in self.inner_traces],
        }


# ---------------------------------------------------------------------------
# packing preimage (inner loop)


def redundancy(region: Region, lattice: Lattice) -> int:
    """Smallest ``M`` such that the region packs ``M``-redundantly by translations."""
    if region.is_null():
        return 1
    return translation_check(region, lattice).multiplicity


def largest_packing_layer(region: Region, lattice: Lattice) -> tuple[Region, int]:
    """The first layer of the redundant partition (it has the largest measure)."""
    if region.is_null():
        return region, 1
    m = redundancy(region, lattice)
    return redundant_partition(region, lattice, m)[0], m


def _start_index(volume: Fraction, det: Fraction, eps: Fraction) -> int:
    """Smallest ``J >= 1`` with ``sum_{j >= J} |A^{-j} U| = |U| det^{-J} / (1 - 1/det) < eps``."""
    c = 1 - 1 / det
    j = 1
    while volume / det**j / c >= eps:
        j += 1
    return j


def build_packing_preimage(
    u_target: Region,
    w: Region,
    a,
    lattice: Lattice,
    m: Sequence | Callable | None = None,
    eps=Fraction(1, 100),
    tol=0,
    maxiter: int = 60,
    start: int | None = None,
) -> WaveletCandidate:
    """A set ``V`` packing by translations and dilations with ``d_W(V)`` filling ``U``.

    ``m`` gives the translation redundancy of ``A^{-j} U`` (a list indexed
    from ``j = 1``, or a callable); by default it is computed exactly. The
    loop stops when the uncovered part ``W_j = U \\ d_W(U_j)`` has measure at
    most ``tol``. Each row of the trace records the residual decay bound
    ``|W_{j+1}| <= (1 - c/m_{j+1}) |W_j|`` with ``c = 1 - 1/|det A|``, and the
    step bound ``|U_{j+1} △ U_j| <= 2 |det A|^{-j-1} |W_j|``.
    """
    mat = _matrix(a)
    det = abs(mat.det())
    if det <= 1:
        raise PreconditionError("the preimage construction needs |det A| > 1")
    eps, tol = frac(eps), frac(tol)
    trace = BuildTrace("packing-preimage")
    if u_target.is_null() or u_target.volume == 0:
        trace.notes.append("empty target")
        return WaveletCandidate(Region.empty(u_target.dim), trace, extra={"start": 0, "residual": Fraction(0)})
    if not u_target.issubset(w):
        raise PreconditionError("target must lie inside W")
    c = 1 - 1 / det
    inv = mat.inv()
    cert = DilationWindow(mat)
    big_u = u_target.volume
    jstart = start if start is not None else _start_index(big_u, det, eps)

    def preimage(region: Region, j: int) -> Region:
        return region.affine_image(inv.power(j))

    def m_of(j: int) -> int:
        if m is None:
            return redundancy(preimage(u_target, j), lattice)
        if callable(m):
            return int(m(j))
        return int(m[j - 1])

    def dmap(v: Region) -> Region:
        return d_map(v, w, cert.a)

    layer, _ = largest_packing_layer(preimage(u_target, jstart), lattice)
    mj = m_of(jstart)
    cur = layer
    resid = u_target.difference(dmap(cur))
    bound0 = (1 - c / mj) * big_u
    trace.add(
        j=jstart, m=mj, residual_prev=big_u, residual=resid.volume, decay_bound=bound0,
        decay_ok=resid.volume <= bound0, layer_volume=layer.volume, sym_diff=layer.volume,
        d_sym_diff=dmap(layer).volume, sym_diff_bound=2 * big_u / det**jstart, sym_diff_ok=True,
        majorant_term=Fraction(0), majorant_sum=Fraction(0),
    )
    if resid.volume > bound0:
        raise ConstructionError("residual decay bound violated at the start", trace)
    first_resid = resid.volume
    majorant = Fraction(0)
    j = jstart
    steps = 0
    while resid.volume > tol:
        if steps >= maxiter:
            raise ConstructionError(
                f"residual {float(resid.volume):.3g} still above tol after {maxiter} steps", trace
            )
        m_next = m_of(j + 1)
        moved = preimage(resid, j + 1)
        tilde, _ = largest_packing_layer(moved, lattice)
        tau = tau_map(tilde, cur, lattice)
        nxt = tilde.union(cur.difference(tau))
        new_resid = u_target.difference(dmap(nxt))
        bound = (1 - c / m_next) * resid.volume
        sym = nxt.symmetric_difference(cur)
        sym_bound = 2 * resid.volume / det ** (j + 1)
        majorant += resid.volume / m_next
        trace.add(
            j=j + 1, m=m_next, residual_prev=resid.volume, residual=new_resid.volume, decay_bound=bound,
            decay_ok=new_resid.volume <= bound, layer_volume=tilde.volume, sym_diff=sym.volume,
            d_sym_diff=dmap(sym).volume, sym_diff_bound=sym_bound, sym_diff_ok=sym.volume <= sym_bound,
            majorant_term=resid.volume / m_next, majorant_sum=majorant,
        )
        if new_resid.volume > bound:
            raise ConstructionError(
                f"residual decay violated at j = {j + 1}: {float(new_resid.volume):.6g} > (1 - c/m) "
                f"* {float(resid.volume):.6g} with m = {m_next}",
                trace,
            )
        if sym.volume > sym_bound:
            raise ConstructionError(f"step bound violated at j = {j + 1}", trace)
        cur, resid = nxt, new_resid
        j += 1
        steps += 1
    return WaveletCandidate(
        cur, trace,
        extra={"start": jstart, "residual": resid.volume, "first_residual": first_resid, "majorant": majorant, "c": c},
    )


# ---------------------------------------------------------------------------
# outer loop over shells


def _max_norm_cube(r: Fraction, dim: int) -> Region:
    if r <= 0:
        return Region.empty(dim)
    return Region.box([-r] * dim, [r] * dim)


def shell_partition(w: Region, max_measure=Fraction(1, 2)) -> list[Region]:
    """Cut ``W`` into max-norm shells, each of measure below ``max_measure``."""
    max_measure = frac(max_measure)
    lo, hi = w.bounding_box()
    top = max(max(abs(x) for x in lo), max(abs(x) for x in hi))
    shells = []
    r = Fraction(0)
    while r < top:
        h = top - r
        inner = _max_norm_cube(r, w.dim)
        while True:
            piece = w.intersect(_max_norm_cube(r + h, w.dim).difference(inner))
            if piece.volume < max_measure:
                break
            h /= 2
        if not piece.is_null():
            shells.append(piece)
        r += h
    return shells


def build_wavelet_core(
    a,
    lattice: Lattice,
    L=None,
    K: int | None = None,
    tol=Fraction(1, 1000),
    maxiter: int = 30,
    kind: str = "auto",
) -> WaveletCandidate:
    """Outer loop: absorb the shells ``W_1, W_2, ...`` of a generator one by one.

    At step ``k`` a small set ``Ũ_k`` with ``d(Ũ_k)`` equal to the uncovered
    part of ``W_1 ∪ ... ∪ W_{k+1}`` is merged as
    ``U_{k+1} = Ũ_k ∪ (U_k \\ τ_{U_k}(Ũ_k))``. The lost part
    ``d(τ_{U_k}(Ũ_k))`` must stay below ``2^{-k}``; once all ``K`` shells are
    in, further steps repair that loss until the deficit is at most ``tol``.
    """
    mat = _matrix(a)
    det = mat.det()
    if det == 0:
        raise ValidationError("matrix is singular")
    if abs(det) == 1:
        raise PreconditionError("|det A| = 1: no set tiles by dilations with finite measure")
    notes = []
    if abs(det) < 1:
        mat = mat.inv()
        notes.append("|det A| < 1: built for A^{-1}, which has the same wavelet sets")
    det = abs(mat.det())
    tol = frac(tol)
    w, gspec = tiling_generator(mat, L, kind)
    shells = shell_partition(w)
    total = len(shells)
    K = total if K is None else max(1, min(int(K), total))
    cert = DilationWindow(mat)
    trace = BuildTrace("wavelet-core", notes=notes)

    def dmap(v: Region) -> Region:
        return d_map(v, w, cert.a)

    def covered(k: int) -> Region:
        out = Region.empty(w.dim)
        for s in shells[:k]:
            out = out.union(s)
        return out

    inner_tol = tol / 8
    first = build_packing_preimage(shells[0], w, mat, lattice, eps=Fraction(1, 2), tol=inner_tol)
    cur = first.region
    inner = [first.trace]
    k = 1
    while True:
        stage = min(k + 1, K)
        target_all = covered(stage)
        target = target_all.difference(dmap(cur))
        if stage == K and target.volume <= tol:
            break
        if k > maxiter:
            trace.notes.append(f"stopped after {maxiter} steps with deficit {float(target.volume):.3g}")
            break
        budget = Fraction(1, 2**k)
        kq = _tail_index(cur, w, cert, budget / 2)
        eps = min(Fraction(1, 2), Fraction(1) / det**kq / 2 ** (k + 1)) if kq > 0 else Fraction(1, 2 ** (k + 1))
        step = build_packing_preimage(target, w, mat, lattice, eps=eps, tol=inner_tol)
        inner.append(step.trace)
        tilde = step.region
        tau = tau_map(tilde, cur, lattice)
        lost = dmap(tau).volume
        nxt = tilde.union(cur.difference(tau))
        deficit = target_all.difference(dmap(nxt)).volume
        trace.add(
            k=k, shells=stage, target=target.volume, eps=eps, start=step.extra.get("start"),
            inner_steps=len(step.trace.rows), tilde_volume=tilde.volume, tau_volume=tau.volume,
            d_tau=lost, budget=budget, budget_ok=lost < budget, deficit=deficit,
            sym_diff=nxt.symmetric_difference(cur).volume,
        )
        if lost >= budget:
            raise ConstructionError(f"lost measure {float(lost):.3g} exceeds the budget 2^-{k}", trace)
        cur = nxt
        k += 1
    tr = translation_check(cur, lattice)
    certified = covered(K)
    deficit = certified.difference(dmap(cur)).volume
    dil = dilation_check(cur, mat, reference=w)
    return WaveletCandidate(
        cur, trace, dilation=dil, translation=tr, generator=gspec,
        extra={"shells_total": total, "shells_certified": K, "shell_deficit": deficit,
               "outer_steps": k - 1 if k > 1 else 0},
        inner_traces=inner,
    )


def _tail_index(u: Region, w: Region, cert: DilationWindow, target: Fraction) -> int:
    """Smallest ``K`` with ``sum_{j >= K} |A^j U ∩ W| < target``."""
    if u.is_null():
        return 0
    lo, hi, _ = cert.two_sided(u, w)
    parts = {j: (u.affine_image(cert.a.power(j)) if j else u).intersect(w).volume for j in range(lo, hi + 1)}
    tail = Fraction(0)
    kq = hi + 1
    for j in range(hi, lo - 1, -1):
        if tail + parts[j] >= target:
            break
        tail += parts[j]
        kq = j
    return kq


# ---------------------------------------------------------------------------
# Cantor-Schroeder-Bernstein style upgrade


def _place(hole: Region, ring: Region, lattice: Lattice, k: int, mat: Matrix) -> Region | None:
    """A lattice translate of ``hole`` inside ``A^k(ring)``, or None."""
    target = ring.affine_image(mat.power(k))
    hlo, hhi = hole.bounding_box()
    hc = [(a + b) / 2 for a, b in zip(hlo, hhi)]
    lmat = lattice.column_matrix
    linv = lmat.inv()
    for p in sorted(target.pieces, key=lambda q: target.piece_bounds(q)):
        plo, phi = target.piece_bounds(p)
        pc = [(a + b) / 2 for a, b in zip(plo, phi)]
        shift = [x - y for x, y in zip(pc, hc)]
        coeff = [Fraction(round(x)) for x in (linv @ shift)]
        gamma = lmat @ coeff
        moved = hole.translate(gamma)
        if moved.issubset(Region(target.dim, (p,))):
            return moved
    return None


def csb_upgrade(u: Region, a, lattice: Lattice, iters: int = 40, tol=Fraction(1, 10**4)) -> WaveletCandidate:
    """Fill the translation hole of ``U`` while keeping its dilation tiling.

    Each step takes the hole ``H = F \\ τ_F(U)`` in the fundamental domain
    ``F``, moves a lattice translate ``X`` of it into a dilate ``A^k W`` of
    the generator lying outside ``U``, and replaces ``U`` by
    ``(U \\ d_U(X)) ∪ X``. The orbit of ``X`` replaces the orbit of
    ``d_U(X)``, so dilation packing and covering are unchanged, while the
    new hole is ``τ_F(d_U(X))`` of measure ``|d_U(X)| <= |X| / |det A|``.
    """
    mat = _matrix(a)
    det = mat.det()
    if abs(det) == 1:
        raise PreconditionError("|det A| = 1")
    if abs(det) < 1:
        mat = mat.inv()
    tol = frac(tol)
    tr = translation_check(u, lattice)
    if not tr.packs:
        raise PreconditionError(f"U does not pack by translations (excess {tr.excess_volume})")
    dil0 = dilation_check(u, mat)
    if not dil0.packs:
        raise PreconditionError("U does not pack by dilations")
    ring, _ = tiling_generator(mat)
    fd = FundamentalDomain.of(lattice)
    cert = DilationWindow(mat)
    trace = BuildTrace("csb-upgrade")
    cur = u
    deficit = tr.deficit_volume
    r1 = math.sqrt(float(cur.max_norm_sq()))
    stalls = 0
    for it in range(iters + 1):
        trace.add(iteration=it, deficit=deficit, volume=cur.volume)
        if deficit <= tol or it == iters:
            break
        hole = fd.region.difference(tau_map(cur, fd.region, lattice))
        x = None
        k = 0
        # first dilate of the ring lying beyond U
        while math.sqrt(float(ring.affine_image(mat.power(k)).min_norm_sq())) <= r1:
            k += 1
        for kk in range(k, k + 60):
            x = _place(hole, ring, lattice, kk, mat)
            if x is not None:
                k = kk
                break
        if x is None:
            raise ConstructionError("could not place the hole inside a dilate of the generator", trace)
        removed = d_map(x, cur, cert.a)
        nxt = cur.difference(removed).union(x)
        new_deficit = translation_check(nxt, lattice).deficit_volume
        trace.rows[-1].update(power=k, moved=x.volume, removed=removed.volume)
        if new_deficit >= deficit:
            stalls += 1
            if stalls >= 3:
                raise ConstructionError("no measurable progress over 3 iterations", trace)
        else:
            stalls = 0
        cur, deficit = nxt, new_deficit
        r1 = max(r1, math.sqrt(float(x.max_norm_sq())))
    final_tr = translation_check(cur, lattice)
    final_dil = dilation_check(cur, mat)
    return WaveletCandidate(cur, trace, dilation=final_dil, translation=final_tr,
                            extra={"initial_deficit": tr.deficit_volume, "final_deficit": final_tr.deficit_volume})


def seeded_dilation_tile(a, lattice: Lattice, seed: int, pieces: int = 6, depth: int = 6, grid: int = 64) -> Region:
    """A 1-D set that tiles by dilations and packs by translations, built at random.

    The generator ``[-l, -1] ∪ [1, l]`` is cut at random grid points and each
    piece is moved by a random negative power of ``A``, keeping the first
    power that leaves the union packing by translations.
    """
    mat = _matrix(a)
    if mat.n != 1:
        raise PreconditionError("seeded inputs are one-dimensional")
    if abs(mat.det()) < 1:
        mat = mat.inv()
    rng = np.random.default_rng(seed)
    gen, _ = tiling_generator(mat)
    cuts = []
    for p in gen.pieces:
        lo, hi = p.lo[0], p.hi[0]
        inner = sorted({int(x) for x in rng.integers(1, grid, size=pieces // 2)})
        edges = [lo] + [lo + (hi - lo) * Fraction(i, grid) for i in inner] + [hi]
        cuts.extend(Region.interval(x, y) for x, y in zip(edges, edges[1:]) if x < y)
    cur = Region.empty(1)
    for piece in cuts:
        powers = [int(p) for p in rng.permutation(np.arange(1, depth + 1))]
        for q in powers + list(range(depth + 1, depth + 40)):
            moved = piece.affine_image(mat.inv().power(q))
            trial = cur.union(moved)
            if translation_check(trial, lattice).packs:
                cur = trial
                break
        else:
            raise ConstructionError("could not place a piece", BuildTrace("seeded-tile"))
    return cur


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class WaveletVerification:
    dilation: TilingReport
    translation: TilingReport
    tol: Fraction
    passed: bool

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "tol": str(self.tol),
            "dilation": self.dilation.to_json(),
            "translation": self.translation.to_json(),
        }


def verify_wavelet(s: Region, a, lattice: Lattice, tol=0) -> WaveletVerification:
    """Both tiling reports and a single verdict at tolerance ``tol``."""
    mat = _matrix(a)
    tol = frac(tol)
    dil = dilation_check(s, mat)
    tr = translation_check(s, lattice)
    ok = (
        dil.excess_volume <= tol
        and dil.deficit_volume is not None
        and dil.deficit_volume <= tol
        and tr.excess_volume <= tol
        and tr.deficit_volume <= tol
    )
    return WaveletVerification(dil, tr, tol, bool(ok))
